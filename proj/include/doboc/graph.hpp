#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "doboc/parallel.hpp"
#include "doboc/stacked_vector.hpp"

namespace doboc {

/// Undirected communication topology with per-edge mixing weights.
///
/// Agents are 0-based internally (external formats are 1-based).  Neighbor
/// lists are sorted; each unordered edge carries a single weight that is
/// copied verbatim into both adjacency rows, so W = W^T holds exactly for
/// graphs built by `metropolis`.  `from_weights` preserves whatever the
/// caller supplied -- including invalid matrices -- so that
/// `validate_weights` can report violations.
class CommGraph {
 public:
  /// Metropolis-Hastings weights: w_ij = 1/(1+max(deg_i,deg_j)) on each
  /// edge, w_ii = 1 - sum_j w_ij.  Rejects empty, malformed, or
  /// disconnected edge sets.
  static CommGraph metropolis(int n, const std::vector<std::pair<int, int>>& edges);

  /// Wrap an explicit square weight matrix.  Shape and finiteness are
  /// checked here; the stochasticity/symmetry conditions are checked by
  /// validate_weights so that bad matrices can be reported, not thrown.
  static CommGraph from_weights(const Eigen::MatrixXd& w);

  int size() const { return n_; }
  int degree(int i) const { return offset_[i + 1] - offset_[i]; }

  std::span<const int> neighbors(int i) const {
    return {nbr_.data() + offset_[i], static_cast<std::size_t>(degree(i))};
  }
  std::span<const double> neighbor_weights(int i) const {
    return {w_.data() + offset_[i], static_cast<std::size_t>(degree(i))};
  }
  double self_weight(int i) const { return self_w_[i]; }
  double min_self_weight() const;

  /// Weight of directed entry (i, j); 0 when j is not a neighbor of i.
  double weight(int i, int j) const;

  /// Unordered edges (i < j), sorted lexicographically.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  /// Total directed edge count, sum_i |N_i|.
  long long directed_edges() const { return static_cast<long long>(nbr_.size()); }

  /// out = kron(W, I) x, one block per agent.
  void mix_into(const StackedVector& x, StackedVector& out, Execution exec = Execution::Serial) const;
  StackedVector mix(const StackedVector& x, Execution exec = Execution::Serial) const;

  /// out = (I - kron(W, I)) x via neighbor differences.
  void laplacian_into(const StackedVector& x, StackedVector& out, Execution exec = Execution::Serial) const;
  StackedVector laplacian(const StackedVector& x, Execution exec = Execution::Serial) const;

  /// x^T (I - kron(W, I)) x in edge form: sum over edges of w_ij ||x^i - x^j||^2.
  /// Nonnegative by construction and exactly zero at consensus.
  double disagreement(const StackedVector& x) const;

 private:
  CommGraph() = default;
  void check_conformance(const StackedVector& x) const;

  int n_ = 0;
  std::vector<int> offset_;   // CSR offsets, size n_+1
  std::vector<int> nbr_;      // sorted neighbor ids per row
  std::vector<double> w_;     // weights aligned with nbr_
  std::vector<double> self_w_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<double> edge_w_;  // weight of edges_[e], taken from the i<j direction
};

struct ValidationCheck {
  bool pass = true;
  double max_violation = 0.0;
  std::string detail;
};

struct ValidationReport {
  ValidationCheck nonnegative;
  ValidationCheck symmetry;      // exact: stored w_ij must equal w_ji bitwise
  ValidationCheck row_sums;      // |row sum - 1| <= 1e-12
  ValidationCheck self_positive; // w_ii > 0
  ValidationCheck support;       // w_ij != 0 exactly on edges
  ValidationCheck connected;
  double w_min = 0.0;            // min_i w_ii, reported not enforced

  bool all_pass() const {
    return nonnegative.pass && symmetry.pass && row_sums.pass && self_positive.pass &&
           support.pass && connected.pass;
  }
  std::string summary() const;
};

/// Report-only check of the mixing-matrix conditions.
ValidationReport validate_weights(const CommGraph& g);

inline constexpr double kRowSumTolerance = 1e-12;

}  // namespace doboc
