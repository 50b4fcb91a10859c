#pragma once

#include <vector>

#include "doboc/graph.hpp"
#include "doboc/objectives.hpp"
#include "doboc/parallel.hpp"
#include "doboc/stacked_vector.hpp"

namespace doboc {

/// Penalty surrogate of the consensus problem:
///
///   F(x) = sum_i f_i(x^i) + (1/(2 lambda)) x^T (I - kron(W, I)) x
///
/// The quadratic term is evaluated in edge form and the gradient/Hessian
/// residuals in neighbor-difference form, so consensus points annihilate
/// the penalty exactly.  Immutable after construction and shareable across
/// workers; all evaluations use fixed-order reductions.
class PenaltyProblem {
 public:
  PenaltyProblem(CommGraph graph, std::vector<LocalObjectivePtr> locals, double lambda);

  const CommGraph& graph() const { return graph_; }
  int agents() const { return graph_.size(); }
  int dim() const { return locals_.front()->dim(); }
  double lambda() const { return lambda_; }
  const LocalObjective& local(int i) const { return *locals_[i]; }
  const LocalObjectivePtr& local_ptr(int i) const { return locals_[i]; }

  double value(const StackedVector& x, Execution exec = Execution::Serial) const;
  StackedVector gradient(const StackedVector& x, Execution exec = Execution::Serial) const;
  /// (hess h(x) + (1/lambda)(I - Z)) v, block by block.
  StackedVector hessian_vec(const StackedVector& x, const StackedVector& v,
                            Execution exec = Execution::Serial) const;

  double strong_convexity() const { return m_; }   // m = min_i m_i
  double smoothness() const { return big_m_; }     // M = max_i M_i
  double hessian_lipschitz() const { return lips_; }  // L = max_i L_i

 private:
  void check_conformance(const StackedVector& x) const;

  CommGraph graph_;
  std::vector<LocalObjectivePtr> locals_;
  double lambda_ = 0.0;
  double m_ = 0.0;
  double big_m_ = 0.0;
  double lips_ = 0.0;
};

}  // namespace doboc
