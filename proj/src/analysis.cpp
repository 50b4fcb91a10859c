#include "doboc/analysis.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "doboc/dense.hpp"
#include "doboc/rng.hpp"

namespace doboc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double spectral_bound_a(const PenaltyProblem& prob) {
  return prob.smoothness() + 2.0 * (1.0 - prob.graph().min_self_weight()) / prob.lambda();
}

// ||I - eta H|| for symmetric H via its eigenvalues.
double contraction_norm(const Eigen::MatrixXd& hess, double eta) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hess, Eigen::EigenvaluesOnly);
  double c = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    c = std::max(c, std::abs(1.0 - eta * es.eigenvalues()[i]));
  return c;
}

// Largest eta the linear-rate analysis admits beyond the eta_f window:
// min{ m/(a^2 K^2), [6 m^5 / (a^4 (2a)^{3/2} K^3 L sqrt(gap0))]^{1/2} }.
// The second entry forces the cubic term of epsilon below m^2 eta / a, so
// epsilon stays positive; with L = 0 it is vacuous.
double linear_regime_extra_bound(double m, double a, int k, double lips, double gap0) {
  const double quad = m / (a * a * static_cast<double>(k) * static_cast<double>(k));
  if (lips <= 0.0 || gap0 <= 0.0) return quad;
  const double k3 = std::pow(static_cast<double>(k), 3);
  const double denom = std::pow(a, 4) * std::pow(2.0 * a, 1.5) * k3 * lips * std::sqrt(gap0);
  const double cubic = std::sqrt(6.0 * std::pow(m, 5) / denom);
  return std::min(quad, cubic);
}

double epsilon_formula(double m, double a, int k, double lips, double eta, double gap0) {
  const double kk = static_cast<double>(k);
  const double lead = (2.0 * m * m * eta - m * a * a * eta * eta * kk * kk) / a;
  if (lips <= 0.0 || gap0 <= 0.0) return lead;
  const double cubic = std::pow(a, 3) * std::pow(2.0 * a, 1.5) * std::pow(eta, 3) * std::pow(kk, 3) *
                       lips / (6.0 * std::pow(m, 3)) * std::sqrt(gap0);
  return lead - cubic;
}

}  // namespace

BoundReport compute_bounds(const PenaltyProblem& prob, double eta, int inner_rounds,
                           const StackedVector& x0, const Reference* ref) {
  if (inner_rounds < 1) throw ConfigError("K must be >= 1", "K");
  Reference local_ref;
  if (!ref) {
    local_ref = compute_reference(prob);
    ref = &local_ref;
  }

  BoundReport r;
  r.m = prob.strong_convexity();
  r.big_m = prob.smoothness();
  r.lips = prob.hessian_lipschitz();
  r.lambda = prob.lambda();
  r.w_min = prob.graph().min_self_weight();
  r.a = spectral_bound_a(prob);
  r.eta = eta;
  r.inner_rounds = inner_rounds;
  r.f_gap0 = prob.value(x0) - ref->f_star;

  r.eta_thm1_max = 2.0 / r.a;
  r.contraction_c = contraction_norm(dense_penalty_hessian(prob, ref->x_star), eta);
  r.thm1_ok = eta > 0.0 && eta < r.eta_thm1_max;

  const double kk = static_cast<double>(inner_rounds);
  r.eta_f_max = std::min({1.0, 1.0 / r.a, 2.0 * r.m / (r.a * r.a * kk * kk)});
  r.eta_lin_max = linear_regime_extra_bound(r.m, r.a, inner_rounds, r.lips, r.f_gap0);
  r.epsilon = epsilon_formula(r.m, r.a, inner_rounds, r.lips, eta, r.f_gap0);
  r.f_ok = eta > 0.0 && eta < r.eta_f_max;
  r.lin_ok = r.f_ok && eta < r.eta_lin_max;
  r.epsilon_valid = r.lin_ok && r.epsilon > 0.0 && r.epsilon < 1.0;

  r.dgd_equivalent = inner_rounds == 1 && eta == prob.lambda();
  return r;
}

double auto_eta_superlinear(const PenaltyProblem& prob) { return 1.0 / spectral_bound_a(prob); }

double auto_eta_linear(const PenaltyProblem& prob, int inner_rounds, const StackedVector& x0,
                       const Reference* ref) {
  if (inner_rounds < 1) throw ConfigError("K must be >= 1", "K");
  Reference local_ref;
  if (!ref) {
    local_ref = compute_reference(prob);
    ref = &local_ref;
  }
  const double m = prob.strong_convexity();
  const double a = spectral_bound_a(prob);
  const double kk = static_cast<double>(inner_rounds);
  const double gap0 = prob.value(x0) - ref->f_star;
  const double eta_f = std::min({1.0, 1.0 / a, 2.0 * m / (a * a * kk * kk)});
  const double extra = linear_regime_extra_bound(m, a, inner_rounds, prob.hessian_lipschitz(), gap0);
  return 0.99 * std::min(eta_f, extra);
}

std::vector<StackedVector> closed_form_ghat_sequence(const PenaltyProblem& prob,
                                                     const StackedVector& x, double eta, int k_max) {
  if (k_max < 0) throw ConfigError("k must be >= 0", "k");
  const long long np = static_cast<long long>(prob.agents()) * prob.dim();
  if (np > kDenseLimit)
    throw DimensionError("closed_form_ghat is a desk-scale oracle; n*p = " + std::to_string(np) +
                         " exceeds " + std::to_string(kDenseLimit));

  const Eigen::MatrixXd hess = dense_penalty_hessian(prob, x);
  const Eigen::VectorXd grad = prob.gradient(x).flat();
  const Eigen::VectorXd newton_dir = hess.llt().solve(grad);

  // ghat_k = [I - (I - eta H)^{k+1}] H^{-1} grad F; the power is applied by
  // repeated products, matching the recursion's arithmetic more closely
  // than an eigendecomposition would.
  std::vector<StackedVector> seq;
  seq.reserve(k_max + 1);
  Eigen::VectorXd w = newton_dir;
  for (int k = 0; k <= k_max; ++k) {
    w -= eta * (hess * w).eval();
    seq.push_back(StackedVector::from_flat(prob.agents(), prob.dim(), newton_dir - w));
  }
  return seq;
}

StackedVector closed_form_ghat(const PenaltyProblem& prob, const StackedVector& x, double eta,
                               int k) {
  return closed_form_ghat_sequence(prob, x, eta, k).back();
}

RateReport estimate_rates(const RunTrace& trace, double contraction_c, double epsilon) {
  // err sequence: initial row then per-iteration rows.
  std::vector<double> err;
  err.push_back(trace.initial.err_x);
  for (const TraceRow& r : trace.rows) err.push_back(r.err_x);

  int usable = 0;
  for (double e : err)
    if (e > kRateDiscardFloor) ++usable;
  if (usable < 3)
    throw Error("trace too short to estimate rates: " + std::to_string(usable) +
                " iterations with error above " + std::to_string(kRateDiscardFloor));

  RateReport report;
  report.usable = usable;
  for (std::size_t k = 0; k + 1 < err.size(); ++k) {
    if (err[k] <= kRateDiscardFloor || err[k + 1] <= kRateDiscardFloor) break;
    report.error_ratios.push_back(err[k + 1] / err[k]);
  }

  report.superlinear = report.error_ratios.size() >= 2;
  for (std::size_t k = 0; k + 1 < report.error_ratios.size(); ++k)
    if (!(report.error_ratios[k + 1] < report.error_ratios[k])) report.superlinear = false;

  // Geometric mean of gap ratios over rows with trustworthy positive gaps.
  double log_sum = 0.0;
  int gap_count = 0;
  double prev_gap = trace.initial.f_gap;
  for (const TraceRow& r : trace.rows) {
    if (prev_gap > kRateDiscardFloor && r.f_gap > kRateDiscardFloor) {
      log_sum += std::log(r.f_gap / prev_gap);
      ++gap_count;
    }
    prev_gap = r.f_gap;
  }
  report.linear_rate = gap_count > 0 ? std::exp(log_sum / gap_count) : kNaN;

  report.thm1_envelope_slack = -kInf;
  if (std::isfinite(contraction_c)) {
    for (std::size_t k = 0; k + 1 < err.size(); ++k) {
      if (err[k] <= kRateDiscardFloor || err[k + 1] <= kRateDiscardFloor) break;
      const double envelope = std::pow(contraction_c, static_cast<double>(k + 1)) * err[k];
      report.thm1_envelope_slack = std::max(report.thm1_envelope_slack, err[k + 1] - envelope);
    }
  }

  report.thm2_envelope_slack = -kInf;
  if (std::isfinite(epsilon)) {
    const double gap0 = trace.initial.f_gap;
    for (std::size_t k = 0; k < trace.rows.size(); ++k) {
      const double envelope = std::pow(1.0 - epsilon, static_cast<double>(k + 1)) * gap0;
      report.thm2_envelope_slack =
          std::max(report.thm2_envelope_slack, trace.rows[k].f_gap - envelope);
    }
  }
  return report;
}

RateReport estimate_rates(const RunTrace& trace) { return estimate_rates(trace, kNaN, kNaN); }

CubicBoundReport verify_lemma4_bound(const PenaltyProblem& prob, int samples, std::uint64_t seed) {
  Rng rng(seed);
  const int n = prob.agents();
  const int p = prob.dim();
  CubicBoundReport report;
  report.samples = samples;
  const double lips = prob.hessian_lipschitz();
  for (int s = 0; s < samples; ++s) {
    StackedVector x(n, p), y(n, p);
    x.flat() = rng.normal_vector(static_cast<int>(x.size()));
    y.flat() = x.flat() + rng.uniform(0.0, 2.0) * rng.normal_vector(static_cast<int>(x.size()));

    StackedVector step(n, p);
    step.flat() = y.flat() - x.flat();
    const double lhs = prob.value(y);
    const double rhs = prob.value(x) + prob.gradient(x).flat().dot(step.flat()) +
                       0.5 * step.flat().dot(prob.hessian_vec(x, step).flat()) +
                       lips / 6.0 * std::pow(step.flat().norm(), 3);
    const double violation = lhs - rhs;
    report.max_violation = std::max(report.max_violation, violation);
    if (violation > 1e-9) report.ok = false;
  }
  return report;
}

}  // namespace doboc
