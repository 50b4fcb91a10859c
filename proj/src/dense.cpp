#include "doboc/dense.hpp"

#include <string>

namespace doboc {

namespace {

void guard_size(long long np, const char* what) {
  if (np > kDenseLimit)
    throw DimensionError(std::string(what) + ": n*p = " + std::to_string(np) +
                         " exceeds the desk-scale dense limit " + std::to_string(kDenseLimit));
}

}  // namespace

Eigen::MatrixXd dense_weight_matrix(const CommGraph& g) {
  const int n = g.size();
  guard_size(n, "dense_weight_matrix");
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    w(i, i) = g.self_weight(i);
    const auto ids = g.neighbors(i);
    const auto ws = g.neighbor_weights(i);
    for (std::size_t t = 0; t < ids.size(); ++t) w(i, ids[t]) = ws[t];
  }
  return w;
}

Eigen::MatrixXd dense_mixing_matrix(const CommGraph& g, int p) {
  const long long np = static_cast<long long>(g.size()) * p;
  guard_size(np, "dense_mixing_matrix");
  const Eigen::MatrixXd w = dense_weight_matrix(g);
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(np, np);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(p, p);
  for (int i = 0; i < g.size(); ++i)
    for (int j = 0; j < g.size(); ++j)
      if (w(i, j) != 0.0) z.block(static_cast<long long>(i) * p, static_cast<long long>(j) * p, p, p) =
          w(i, j) * eye;
  return z;
}

Eigen::MatrixXd dense_penalty_hessian(const PenaltyProblem& prob, const StackedVector& x) {
  const long long np = static_cast<long long>(prob.agents()) * prob.dim();
  guard_size(np, "dense_penalty_hessian");
  const int p = prob.dim();
  Eigen::MatrixXd h =
      (1.0 / prob.lambda()) *
      (Eigen::MatrixXd::Identity(np, np) - dense_mixing_matrix(prob.graph(), p));
  for (int i = 0; i < prob.agents(); ++i)
    h.block(static_cast<long long>(i) * p, static_cast<long long>(i) * p, p, p) +=
        prob.local(i).hessian(x.block(i));
  return h;
}

}  // namespace doboc
