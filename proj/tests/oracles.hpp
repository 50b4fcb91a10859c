#pragma once

// Test-side oracles, independent of the library code paths they check:
// central finite differences for derivatives, the dense affine recursion
// for the inner loop, and a harness that assembles AgentViews by hand.

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "doboc/algorithms.hpp"
#include "doboc/penalty.hpp"
#include "doboc/stacked_vector.hpp"

namespace testing {

inline Eigen::VectorXd fd_gradient(const doboc::PenaltyProblem& prob, const doboc::StackedVector& x,
                                   double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  doboc::StackedVector probe = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double saved = probe.flat()[j];
    probe.flat()[j] = saved + h;
    const double up = prob.value(probe);
    probe.flat()[j] = saved - h;
    const double down = prob.value(probe);
    probe.flat()[j] = saved;
    g[j] = (up - down) / (2.0 * h);
  }
  return g;
}

inline Eigen::VectorXd fd_hessian_vec(const doboc::PenaltyProblem& prob,
                                      const doboc::StackedVector& x, const doboc::StackedVector& v,
                                      double h = 1e-6) {
  doboc::StackedVector up(x.agents(), x.dim()), down(x.agents(), x.dim());
  up.flat() = x.flat() + h * v.flat();
  down.flat() = x.flat() - h * v.flat();
  return (prob.gradient(up).flat() - prob.gradient(down).flat()) / (2.0 * h);
}

/// ghat after `inner` rounds of the stacked affine recursion
/// g <- eta grad + (I - eta H) g, evaluated with dense linear algebra.
inline Eigen::VectorXd dense_ghat_recursion(const Eigen::MatrixXd& hess,
                                            const Eigen::VectorXd& grad, double eta, int inner) {
  Eigen::VectorXd g = eta * grad;
  for (int l = 0; l < inner; ++l) g = eta * grad + g - eta * (hess * g).eval();
  return g;
}

/// Hand-built AgentView over explicit payload copies (what the simulator's
/// mailbox would deliver).  Owns the payload storage.
struct AgentHarness {
  std::vector<double> xs;
  std::vector<double> gs;
  std::unique_ptr<doboc::AgentView> view;
};

inline AgentHarness make_view(const doboc::PenaltyProblem& prob, const doboc::StackedVector& x,
                              int agent, const doboc::StackedVector* ghat = nullptr) {
  const auto& graph = prob.graph();
  const int p = prob.dim();
  AgentHarness h;
  for (int j : graph.neighbors(agent))
    for (int d = 0; d < p; ++d) h.xs.push_back(x.block(j)[d]);
  if (ghat) {
    for (int j : graph.neighbors(agent))
      for (int d = 0; d < p; ++d) h.gs.push_back(ghat->block(j)[d]);
  }
  h.view = std::make_unique<doboc::AgentView>(
      agent, p, &prob.local(agent), graph.self_weight(agent), graph.neighbors(agent),
      graph.neighbor_weights(agent), x.block_data(agent), ghat ? ghat->block_data(agent) : nullptr,
      h.xs.data(), ghat ? h.gs.data() : nullptr);
  return h;
}

}  // namespace testing
