#pragma once

#include <cstdint>
#include <vector>

#include "doboc/penalty.hpp"
#include "doboc/simulator.hpp"
#include "doboc/stacked_vector.hpp"

namespace doboc {

/// Theoretical constants for a problem instance at a given (eta, K):
/// the spectral bounds of the penalty Hessian, the step-size windows of
/// the superlinear and linear rate results, and the per-step contraction
/// quantities they predict.
struct BoundReport {
  // problem constants
  double m = 0.0;
  double big_m = 0.0;
  double lips = 0.0;
  double lambda = 0.0;
  double w_min = 0.0;
  double a = 0.0;  // M + 2(1 - w_min)/lambda, upper spectral bound of hess F

  // echoed inputs
  double eta = 0.0;
  int inner_rounds = 1;  // K
  double f_gap0 = 0.0;   // F(x0) - F(x*)

  // superlinear regime
  double eta_thm1_max = 0.0;    // 2/a
  double contraction_c = 0.0;   // ||I - eta hess F(x*)||
  bool thm1_ok = false;         // 0 < eta < 2/a

  // linear regime (K-limited)
  double eta_f_max = 0.0;     // min{1, 1/a, 2m/(a^2 K^2)}
  double eta_lin_max = 0.0;   // additionally min{m/(a^2 K^2), cubic-term bound}
  double epsilon = 0.0;       // predicted per-step gap contraction
  bool f_ok = false;          // eta below eta_f_max
  bool lin_ok = false;        // eta below every linear-regime bound
  bool epsilon_valid = false; // lin_ok and 0 < epsilon < 1

  bool dgd_equivalent = false;  // K == 1 and eta == lambda
};

/// Evaluate every bound at (eta, K) with gap baseline x0.  Pass a
/// precomputed reference to skip the Newton solves.
BoundReport compute_bounds(const PenaltyProblem& prob, double eta, int inner_rounds,
                           const StackedVector& x0, const Reference* ref = nullptr);

/// eta = 1/a: the midpoint of the superlinear window (0, 2/a).
double auto_eta_superlinear(const PenaltyProblem& prob);

/// 0.99 times the smallest linear-regime bound at this K.
double auto_eta_linear(const PenaltyProblem& prob, int inner_rounds, const StackedVector& x0,
                       const Reference* ref = nullptr);

/// Closed-form inner direction
///   ghat_k(x) = [I - (I - eta H)^{k+1}] H^{-1} grad F(x),  H = hess F(x),
/// evaluated densely (linear solve plus repeated matrix-vector products).
/// This is the centralized oracle the distributed recursion is checked
/// against.  Desk scale only.
StackedVector closed_form_ghat(const PenaltyProblem& prob, const StackedVector& x, double eta, int k);
/// ghat_0..ghat_{k_max} in one pass.
std::vector<StackedVector> closed_form_ghat_sequence(const PenaltyProblem& prob,
                                                     const StackedVector& x, double eta, int k_max);

struct RateReport {
  std::vector<double> error_ratios;  // r_k = err_{k+1}/err_k over usable rows
  bool superlinear = false;          // ratios strictly decreasing
  double linear_rate = 0.0;          // geometric mean of F-gap ratios
  int usable = 0;                    // rows with err_x above the discard floor
  // max over k of measured-minus-envelope; <= 0 means the envelope holds
  double thm1_envelope_slack = 0.0;  // vs c^{k+1} err_k (when c supplied)
  double thm2_envelope_slack = 0.0;  // vs (1-eps)^k gap_0 (when eps supplied)
};

inline constexpr double kRateDiscardFloor = 1e-13;

/// Per-step convergence diagnostics from a trace.  Rows with err_x below
/// the discard floor are ignored; fewer than three usable iterations is an
/// error.  Pass contraction_c/epsilon from compute_bounds to fill the
/// envelope comparisons (NaN skips them).
RateReport estimate_rates(const RunTrace& trace, double contraction_c, double epsilon);
RateReport estimate_rates(const RunTrace& trace);

struct CubicBoundReport {
  int samples = 0;
  double max_violation = 0.0;  // positive means the bound failed by that much
  bool ok = true;
};

/// Sample check of the cubic upper bound
///   F(y) <= F(x) + grad F(x)^T (y-x) + 1/2 (y-x)^T hess F(x) (y-x)
///           + (L/6) ||y-x||^3
/// on seeded random pairs, with 1e-9 slack.
CubicBoundReport verify_lemma4_bound(const PenaltyProblem& prob, int samples, std::uint64_t seed);

}  // namespace doboc
