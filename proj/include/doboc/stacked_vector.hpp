#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "doboc/errors.hpp"

namespace doboc {

/// Block vector in R^{n*p}: one p-dimensional block per agent, stored
/// flat so it doubles as the stacked vector of the whole network.
class StackedVector {
 public:
  StackedVector() = default;

  StackedVector(int agents, int dim)
      : n_(agents), p_(dim), data_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(agents) * dim)) {
    if (agents < 1 || dim < 1) throw DimensionError("StackedVector needs agents >= 1 and dim >= 1");
  }

  static StackedVector from_flat(int agents, int dim, Eigen::VectorXd flat) {
    StackedVector x(agents, dim);
    if (flat.size() != x.data_.size()) throw DimensionError("flat vector does not match agents*dim");
    x.data_ = std::move(flat);
    return x;
  }

  int agents() const { return n_; }
  int dim() const { return p_; }
  Eigen::Index size() const { return data_.size(); }

  Eigen::Ref<Eigen::VectorXd> block(int i) { return data_.segment(static_cast<Eigen::Index>(i) * p_, p_); }
  Eigen::Ref<const Eigen::VectorXd> block(int i) const {
    return data_.segment(static_cast<Eigen::Index>(i) * p_, p_);
  }
  const double* block_data(int i) const { return data_.data() + static_cast<Eigen::Index>(i) * p_; }

  Eigen::VectorXd& flat() { return data_; }
  const Eigen::VectorXd& flat() const { return data_; }

  /// Block average, accumulated in agent order.
  Eigen::VectorXd mean_block() const {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(p_);
    for (int i = 0; i < n_; ++i) acc += block(i);
    return acc / static_cast<double>(n_);
  }

  /// max_i ||x^i - mean||.
  double consensus_error() const {
    const Eigen::VectorXd mean = mean_block();
    double worst = 0.0;
    for (int i = 0; i < n_; ++i) worst = std::max(worst, (block(i) - mean).norm());
    return worst;
  }

  bool all_finite() const { return data_.allFinite(); }

  /// Index of the first agent holding a non-finite entry, or -1.
  int first_nonfinite_agent() const {
    for (int i = 0; i < n_; ++i)
      if (!block(i).allFinite()) return i;
    return -1;
  }

  void swap(StackedVector& other) noexcept {
    std::swap(n_, other.n_);
    std::swap(p_, other.p_);
    data_.swap(other.data_);
  }

  bool same_shape(const StackedVector& other) const { return n_ == other.n_ && p_ == other.p_; }

 private:
  int n_ = 0;
  int p_ = 0;
  Eigen::VectorXd data_;
};

}  // namespace doboc
