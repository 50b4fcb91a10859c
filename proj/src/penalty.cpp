#include "doboc/penalty.hpp"

#include <algorithm>
#include <string>

#include "doboc/detail/accumulate.hpp"

namespace doboc {

PenaltyProblem::PenaltyProblem(CommGraph graph, std::vector<LocalObjectivePtr> locals, double lambda)
    : graph_(std::move(graph)), locals_(std::move(locals)), lambda_(lambda) {
  if (!(lambda_ > 0.0)) throw ObjectiveError("penalty coefficient lambda must be > 0");
  if (static_cast<int>(locals_.size()) != graph_.size())
    throw DimensionError("got " + std::to_string(locals_.size()) + " local objectives for " +
                         std::to_string(graph_.size()) + " agents");
  const int p = locals_.front()->dim();
  for (const auto& f : locals_)
    if (f->dim() != p) throw DimensionError("local objectives must share one dimension");

  m_ = locals_.front()->strong_convexity();
  big_m_ = locals_.front()->smoothness();
  lips_ = locals_.front()->hessian_lipschitz();
  for (const auto& f : locals_) {
    m_ = std::min(m_, f->strong_convexity());
    big_m_ = std::max(big_m_, f->smoothness());
    lips_ = std::max(lips_, f->hessian_lipschitz());
  }
}

void PenaltyProblem::check_conformance(const StackedVector& x) const {
  if (x.agents() != agents() || x.dim() != dim())
    throw DimensionError("stacked vector shape (" + std::to_string(x.agents()) + " x " +
                         std::to_string(x.dim()) + ") does not match problem (" +
                         std::to_string(agents()) + " x " + std::to_string(dim()) + ")");
}

double PenaltyProblem::value(const StackedVector& x, Execution exec) const {
  check_conformance(x);
  const int n = agents();
  std::vector<double> local_values(n);
  parallel_for(n, exec, [&](int i) { local_values[i] = locals_[i]->value(x.block(i)); });
  double h = 0.0;
  for (int i = 0; i < n; ++i) h += local_values[i];
  return h + (0.5 / lambda_) * graph_.disagreement(x);
}

StackedVector PenaltyProblem::gradient(const StackedVector& x, Execution exec) const {
  check_conformance(x);
  StackedVector out(agents(), dim());
  const double inv_lambda = 1.0 / lambda_;
  parallel_for(agents(), exec, [&](int i) {
    Eigen::VectorXd lap(dim());
    detail::laplacian_accumulate(lap, x.block(i), graph_.neighbors(i), graph_.neighbor_weights(i),
                                 [&](std::size_t t) { return x.block(graph_.neighbors(i)[t]); });
    out.block(i) = locals_[i]->gradient(x.block(i)) + inv_lambda * lap;
  });
  return out;
}

StackedVector PenaltyProblem::hessian_vec(const StackedVector& x, const StackedVector& v,
                                          Execution exec) const {
  check_conformance(x);
  check_conformance(v);
  StackedVector out(agents(), dim());
  const double inv_lambda = 1.0 / lambda_;
  parallel_for(agents(), exec, [&](int i) {
    Eigen::VectorXd lap(dim());
    detail::laplacian_accumulate(lap, v.block(i), graph_.neighbors(i), graph_.neighbor_weights(i),
                                 [&](std::size_t t) { return v.block(graph_.neighbors(i)[t]); });
    out.block(i) = locals_[i]->hessian_vec(x.block(i), v.block(i)) + inv_lambda * lap;
  });
  return out;
}

}  // namespace doboc
