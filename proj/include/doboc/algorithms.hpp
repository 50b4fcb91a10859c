#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>

#include "doboc/objectives.hpp"
#include "doboc/penalty.hpp"
#include "doboc/stacked_vector.hpp"

namespace doboc {

enum class Algo { Dgd, Doboc, DobocK };

Algo algo_from_string(const std::string& name);
std::string to_string(Algo a);

struct AlgoConfig {
  double eta = 0.0;       // inner-recursion step; unused by DGD
  double lambda = 0.0;    // penalty coefficient, also the DGD step size
  int inner_rounds = 1;   // K; only read by DOBOC-K
  long long max_iter = 1000;
  double tol = 1e-10;     // stop once ||grad F|| <= tol

  void validate(Algo algo) const;
};

/// Everything one agent may read while computing a step: its own state,
/// the latest neighbor payloads, the incident weights, and its local
/// objective.  The simulator populates neighbor payloads from mailbox
/// copies, so non-neighbor information is structurally out of reach.
struct AgentView {
  AgentView(int agent, int dim, const LocalObjective* local, double self_weight,
            std::span<const int> neighbor_ids, std::span<const double> neighbor_weights,
            const double* own_x_data, const double* own_g_data, const double* neighbor_x_data,
            const double* neighbor_g_data)
      : agent(agent),
        dim(dim),
        local(local),
        self_weight(self_weight),
        neighbor_ids(neighbor_ids),
        neighbor_weights(neighbor_weights),
        own_x(own_x_data, own_x_data ? dim : 0),
        own_g(own_g_data, own_g_data ? dim : 0),
        neighbor_x(neighbor_x_data),
        neighbor_g(neighbor_g_data) {}

  int agent = -1;
  int dim = 0;
  const LocalObjective* local = nullptr;
  double self_weight = 0.0;
  std::span<const int> neighbor_ids;        // ascending
  std::span<const double> neighbor_weights; // aligned with neighbor_ids
  Eigen::Map<const Eigen::VectorXd> own_x;
  Eigen::Map<const Eigen::VectorXd> own_g;  // empty until the inner loop runs
  const double* neighbor_x = nullptr;       // |N_i| blocks of dim, ascending by sender
  const double* neighbor_g = nullptr;       // same layout; null before round 0 of the inner loop

  Eigen::Map<const Eigen::VectorXd> x_from(std::size_t t) const {
    return {neighbor_x + t * static_cast<std::size_t>(dim), dim};
  }
  Eigen::Map<const Eigen::VectorXd> g_from(std::size_t t) const {
    return {neighbor_g + t * static_cast<std::size_t>(dim), dim};
  }
  bool has_x_messages() const { return neighbor_x != nullptr || neighbor_ids.empty(); }
  bool has_g_messages() const { return neighbor_g != nullptr || neighbor_ids.empty(); }
};

/// ghat_0^i = eta [ grad f_i(x^i) + (1/lambda)(x^i - sum_j w_ij x^j) ].
/// This one kernel also backs the DGD step (eta := lambda) and, stacked,
/// the centralized gradient step, which is what makes those bitwise
/// identities hold.
Eigen::VectorXd doboc_inner_init(const AgentView& view, double eta, double lambda);
Eigen::VectorXd doboc_inner_init(const AgentView& view, const AlgoConfig& cfg);

/// Per-outer-iteration cache: ghat_0 and the local Hessian at x_k^i are
/// constant across the inner loop, so they are evaluated once.
struct OuterScratch {
  Eigen::VectorXd ghat0;
  Eigen::MatrixXd hess;  // empty when the inner loop will not run
};

OuterScratch prepare_outer(const AgentView& view, const AlgoConfig& cfg, bool with_hessian);

/// ghat_{l+1}^i = ghat_0^i + (1 - eta/lambda) ghat_l^i
///                - eta hess_i ghat_l^i + (eta/lambda) sum_j w_ij ghat_l^j.
Eigen::VectorXd doboc_inner_step(const AgentView& view, const OuterScratch& scratch,
                                 const AlgoConfig& cfg);

/// x_{k+1}^i = x_k^i - g.
Eigen::VectorXd doboc_outer_update(const Eigen::Ref<const Eigen::VectorXd>& x_i,
                                   const Eigen::Ref<const Eigen::VectorXd>& g_final);

/// x_{k+1}^i = sum_j w_ij x_k^j - lambda grad f_i(x_k^i), via the shared
/// kernel (the gradient is evaluated at the agent's own block).
Eigen::VectorXd dgd_step(const AgentView& view, const AlgoConfig& cfg);

/// x - step * grad F(x).  Blockwise identical to stacking dgd_step when
/// step == lambda.
StackedVector centralized_gd_step(const PenaltyProblem& prob, const StackedVector& x, double step);

/// Damped Newton on the dense penalty Hessian; reference minimizer of F.
/// Desk scale only (n*p <= 1000).
StackedVector centralized_newton_solve(const PenaltyProblem& prob, const StackedVector& x0,
                                       double tol = 1e-12, int max_iter = 200);

}  // namespace doboc
