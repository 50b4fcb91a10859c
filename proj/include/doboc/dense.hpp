#pragma once

#include <Eigen/Dense>

#include "doboc/graph.hpp"
#include "doboc/penalty.hpp"

namespace doboc {

// Dense desk-scale materializations.  The distributed algorithms never
// touch these; they exist as oracles for validation and as the engine of
// the centralized reference solvers.

inline constexpr int kDenseLimit = 1000;  // max n*p any dense routine accepts

/// n-by-n mixing matrix W.
Eigen::MatrixXd dense_weight_matrix(const CommGraph& g);

/// np-by-np matrix kron(W, I_p).
Eigen::MatrixXd dense_mixing_matrix(const CommGraph& g, int p);

/// np-by-np penalty Hessian blockdiag(hess f_i(x^i)) + (1/lambda)(I - kron(W, I)).
Eigen::MatrixXd dense_penalty_hessian(const PenaltyProblem& prob, const StackedVector& x);

}  // namespace doboc
