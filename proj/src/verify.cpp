#include "doboc/verify.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "doboc/dense.hpp"
#include "doboc/rng.hpp"

namespace doboc::verify {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

StackedVector seeded_point(const PenaltyProblem& prob, Rng& rng, double scale = 1.0) {
  StackedVector x(prob.agents(), prob.dim());
  x.flat() = scale * rng.normal_vector(static_cast<int>(x.size()));
  return x;
}

double spectral_a(const PenaltyProblem& prob) {
  return prob.smoothness() + 2.0 * (1.0 - prob.graph().min_self_weight()) / prob.lambda();
}

// Central finite differences of the penalty value / gradient.
Eigen::VectorXd fd_gradient(const PenaltyProblem& prob, const StackedVector& x, double h) {
  Eigen::VectorXd g(x.size());
  StackedVector probe = x;
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

Eigen::VectorXd fd_hessian_vec(const PenaltyProblem& prob, const StackedVector& x,
                               const StackedVector& v, double h) {
  StackedVector up(x.agents(), x.dim()), down(x.agents(), x.dim());
  up.flat() = x.flat() + h * v.flat();
  down.flat() = x.flat() - h * v.flat();
  return (prob.gradient(up).flat() - prob.gradient(down).flat()) / (2.0 * h);
}

// Dense mirror of the inner recursion: ghat after `inner` update rounds at
// frozen state x.
Eigen::VectorXd dense_ghat(const Eigen::MatrixXd& hess, const Eigen::VectorXd& grad, double eta,
                           int inner) {
  Eigen::VectorXd g = eta * grad;
  for (int l = 0; l < inner; ++l) g = eta * grad + g - eta * (hess * g).eval();
  return g;
}

bool trace_bitwise_equal(const RunTrace& a, const RunTrace& b) {
  auto row_eq = [](const TraceRow& x, const TraceRow& y) {
    return x.iter == y.iter && x.rounds == y.rounds && x.messages == y.messages &&
           std::memcmp(&x.f_gap, &y.f_gap, sizeof(double)) == 0 &&
           std::memcmp(&x.grad_norm, &y.grad_norm, sizeof(double)) == 0 &&
           std::memcmp(&x.consensus_err, &y.consensus_err, sizeof(double)) == 0 &&
           std::memcmp(&x.err_x, &y.err_x, sizeof(double)) == 0 &&
           std::memcmp(&x.err_ybar, &y.err_ybar, sizeof(double)) == 0;
  };
  if (!row_eq(a.initial, b.initial) || a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i)
    if (!row_eq(a.rows[i], b.rows[i])) return false;
  if (a.final_x.size() != b.final_x.size()) return false;
  return std::memcmp(a.final_x.flat().data(), b.final_x.flat().data(),
                     sizeof(double) * a.final_x.size()) == 0;
}

Fixture path3_quadratic() {
  CommGraph g = CommGraph::metropolis(3, {{0, 1}, {1, 2}});
  std::vector<QuadraticSpec> specs(3);
  for (int i = 0; i < 3; ++i) {
    specs[i].a = Eigen::MatrixXd::Identity(1, 1);
    specs[i].b = Eigen::VectorXd::Constant(1, static_cast<double>(i - 1));
  }
  return Fixture("path3-quadratic", PenaltyProblem(std::move(g), make_quadratic_family(specs), 1.0));
}

}  // namespace

Fixture two_agent_quadratic(double lambda) {
  CommGraph g = CommGraph::metropolis(2, {{0, 1}});
  std::vector<QuadraticSpec> specs(2);
  specs[0].a = Eigen::MatrixXd::Identity(1, 1);
  specs[0].b = Eigen::VectorXd::Constant(1, -1.0);
  specs[0].c = 0.5;  // f_1(y) = 1/2 (y - 1)^2
  specs[1].a = Eigen::MatrixXd::Identity(1, 1);
  specs[1].b = Eigen::VectorXd::Constant(1, 1.0);
  specs[1].c = 0.5;  // f_2(y) = 1/2 (y + 1)^2
  return Fixture("two-agent-quadratic",
                 PenaltyProblem(std::move(g), make_quadratic_family(specs), lambda));
}

Fixture ring5_quadratic() {
  CommGraph g = CommGraph::metropolis(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}});
  return Fixture("ring5-quadratic",
                 PenaltyProblem(std::move(g), make_quadratic_family(5, 3, 7, 1.0, 10.0), 1.0));
}

Fixture star4_logistic() {
  CommGraph g = CommGraph::metropolis(4, {{0, 1}, {0, 2}, {0, 3}});
  auto data = make_synthetic_logistic_data(4, 2, 4, 11);
  return Fixture("star4-logistic",
                 PenaltyProblem(std::move(g), make_logistic_family(2, data, 0.5), 1.0));
}

Fixture single_agent_quadratic() {
  CommGraph g = CommGraph::metropolis(1, {});
  std::vector<QuadraticSpec> specs(1);
  specs[0].a = Eigen::Vector3d(1.0, 2.0, 4.0).asDiagonal();
  specs[0].b = Eigen::VectorXd::Ones(3);
  return Fixture("single-agent-quadratic",
                 PenaltyProblem(std::move(g), make_quadratic_family(specs), 1.0));
}

std::vector<Fixture> standard_fixtures() {
  return {two_agent_quadratic(), ring5_quadratic(), star4_logistic()};
}

Scale scale_from_string(const std::string& s) {
  if (s == "tiny") return Scale::Tiny;
  if (s == "default") return Scale::Default;
  if (s == "full") return Scale::Full;
  throw ConfigError("scale must be tiny, default, or full; got \"" + s + "\"", "scale");
}

CheckResult check_mix_properties(int graphs, std::uint64_t seed) {
  CheckResult result{"mix-properties", true, ""};
  Rng rng(seed);
  for (int trial = 0; trial < graphs; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform(0.0, 8.0));
    const int p = 1 + static_cast<int>(rng.uniform(0.0, 4.0));
    std::vector<std::pair<int, int>> edges;
    for (int v = 1; v < n; ++v) edges.emplace_back(static_cast<int>(rng.uniform(0.0, v)), v);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng.uniform() < 0.25) {
          bool present = false;
          for (auto [a, b] : edges) present |= (a == std::min(i, j) && b == std::max(i, j));
          if (!present) edges.emplace_back(i, j);
        }
    const CommGraph g = CommGraph::metropolis(n, edges);

    const ValidationReport report = validate_weights(g);
    if (!report.all_pass()) {
      result.pass = false;
      result.detail = "metropolis output failed validation on trial " + std::to_string(trial) +
                      " (n=" + std::to_string(n) + "):\n" + report.summary();
      return result;
    }

    StackedVector x(n, p), y(n, p);
    x.flat() = rng.normal_vector(n * p);
    y.flat() = rng.normal_vector(n * p);

    // dense agreement
    const Eigen::MatrixXd z = dense_mixing_matrix(g, p);
    const double dense_err = (g.mix(x).flat() - z * x.flat()).cwiseAbs().maxCoeff();
    // linearity
    const double alpha = rng.uniform(-2.0, 2.0), beta = rng.uniform(-2.0, 2.0);
    StackedVector combo(n, p);
    combo.flat() = alpha * x.flat() + beta * y.flat();
    const double lin_err =
        (g.mix(combo).flat() - alpha * g.mix(x).flat() - beta * g.mix(y).flat()).cwiseAbs().maxCoeff();
    // fixed consensus direction
    const Eigen::VectorXd v = rng.normal_vector(p);
    StackedVector ones(n, p);
    for (int i = 0; i < n; ++i) ones.block(i) = v;
    const double ones_err = (g.mix(ones).flat() - ones.flat()).cwiseAbs().maxCoeff();

    // evaluation order must not matter
    const StackedVector serial = g.mix(x, Execution::Serial);
    const StackedVector parallel = g.mix(x, Execution::OpenMP);
    if (std::memcmp(serial.flat().data(), parallel.flat().data(), sizeof(double) * serial.size()) !=
        0) {
      result.pass = false;
      result.detail = "trial " + std::to_string(trial) + ": serial and OpenMP mix differ bitwise";
      return result;
    }

    if (dense_err > 1e-12 || lin_err > 1e-12 || ones_err > 1e-15) {
      result.pass = false;
      result.detail = "trial " + std::to_string(trial) + " (n=" + std::to_string(n) +
                      ", p=" + std::to_string(p) + "): dense=" + fmt(dense_err) +
                      " linearity=" + fmt(lin_err) + " ones=" + fmt(ones_err);
      return result;
    }
  }
  result.detail = std::to_string(graphs) + " random graphs";
  return result;
}

CheckResult check_gradient_fd(const Fixture& fx, int points, std::uint64_t seed) {
  CheckResult result{"gradient-fd:" + fx.name(), true, ""};
  Rng rng(seed);
  double worst = 0.0;
  for (int t = 0; t < points; ++t) {
    const StackedVector x = seeded_point(fx.problem(), rng);
    const Eigen::VectorXd exact = fx.problem().gradient(x).flat();
    const Eigen::VectorXd approx = fd_gradient(fx.problem(), x, 1e-6);
    const double rel = (exact - approx).norm() / std::max(1.0, exact.norm());
    worst = std::max(worst, rel);
    if (rel > 1e-6) {
      result.pass = false;
      result.detail = fx.name() + " point " + std::to_string(t) + ": relative error " + fmt(rel);
      return result;
    }
  }
  result.detail = "max relative error " + fmt(worst);
  return result;
}

CheckResult check_hessian_vec_fd(const Fixture& fx, int points, std::uint64_t seed) {
  CheckResult result{"hessian-vec-fd:" + fx.name(), true, ""};
  Rng rng(seed);
  double worst = 0.0;
  for (int t = 0; t < points; ++t) {
    const StackedVector x = seeded_point(fx.problem(), rng);
    const StackedVector v = seeded_point(fx.problem(), rng);
    const Eigen::VectorXd exact = fx.problem().hessian_vec(x, v).flat();
    const Eigen::VectorXd approx = fd_hessian_vec(fx.problem(), x, v, 1e-6);
    const double rel = (exact - approx).norm() / std::max(1.0, exact.norm());
    worst = std::max(worst, rel);
    if (rel > 1e-5) {
      result.pass = false;
      result.detail = fx.name() + " point " + std::to_string(t) + ": relative error " + fmt(rel);
      return result;
    }
  }
  result.detail = "max relative error " + fmt(worst);
  return result;
}

CheckResult check_consensus_annihilation(const Fixture& fx, int points, std::uint64_t seed) {
  CheckResult result{"consensus-annihilation:" + fx.name(), true, ""};
  Rng rng(seed);
  const PenaltyProblem& prob = fx.problem();
  for (int t = 0; t < points; ++t) {
    const Eigen::VectorXd v = rng.normal_vector(prob.dim());
    StackedVector x(prob.agents(), prob.dim());
    for (int i = 0; i < prob.agents(); ++i) x.block(i) = v;

    if (prob.graph().disagreement(x) != 0.0) {
      result.pass = false;
      result.detail = fx.name() + ": nonzero penalty term at a consensus point";
      return result;
    }
    double locals = 0.0;
    for (int i = 0; i < prob.agents(); ++i) locals += prob.local(i).value(v);
    if (prob.value(x) != locals) {
      result.pass = false;
      result.detail = fx.name() + ": F at consensus != sum of local values";
      return result;
    }
    const StackedVector grad = prob.gradient(x);
    for (int i = 0; i < prob.agents(); ++i) {
      const Eigen::VectorXd gi = prob.local(i).gradient(v);
      if ((grad.block(i) - gi).cwiseAbs().maxCoeff() != 0.0) {
        result.pass = false;
        result.detail = fx.name() + ": penalty gradient != stacked local gradients at consensus";
        return result;
      }
    }
  }
  result.detail = std::to_string(points) + " consensus points, exact";
  return result;
}

CheckResult check_spectral_sandwich(const Fixture& fx, int points, std::uint64_t seed) {
  CheckResult result{"spectral-sandwich:" + fx.name(), true, ""};
  Rng rng(seed);
  const PenaltyProblem& prob = fx.problem();
  const double m = prob.strong_convexity();
  const double a = spectral_a(prob);
  double lo_seen = std::numeric_limits<double>::infinity(), hi_seen = 0.0;
  for (int t = 0; t < points; ++t) {
    const StackedVector x = seeded_point(prob, rng);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_penalty_hessian(prob, x),
                                                      Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    lo_seen = std::min(lo_seen, lo);
    hi_seen = std::max(hi_seen, hi);
    if (lo < m - 1e-9 || hi > a + 1e-9) {
      result.pass = false;
      result.detail = fx.name() + " point " + std::to_string(t) + ": eigenvalues [" + fmt(lo) + ", " +
                      fmt(hi) + "] outside [" + fmt(m) + ", " + fmt(a) + "]";
      return result;
    }
  }
  result.detail = "eigenvalues within [" + fmt(lo_seen) + ", " + fmt(hi_seen) + "] of bound [" +
                  fmt(m) + ", " + fmt(a) + "]";
  return result;
}

CheckResult check_convexity_envelopes(const Fixture& fx, int pairs, std::uint64_t seed) {
  CheckResult result{"convexity-envelopes:" + fx.name(), true, ""};
  Rng rng(seed);
  const PenaltyProblem& prob = fx.problem();
  const double m = prob.strong_convexity();
  const double a = spectral_a(prob);
  for (int t = 0; t < pairs; ++t) {
    const StackedVector x = seeded_point(prob, rng);
    const StackedVector y = seeded_point(prob, rng);
    const Eigen::VectorXd d = y.flat() - x.flat();
    const double fy = prob.value(y);
    const double base = prob.value(x) + prob.gradient(x).flat().dot(d);
    const double slack = 1e-8 * std::max(1.0, std::abs(fy));
    const double lower = base + 0.5 * m * d.squaredNorm();
    const double upper = base + 0.5 * a * d.squaredNorm();
    if (fy < lower - slack || fy > upper + slack) {
      result.pass = false;
      result.detail = fx.name() + " pair " + std::to_string(t) + ": F(y)=" + fmt(fy) +
                      " outside [" + fmt(lower) + ", " + fmt(upper) + "]";
      return result;
    }
  }
  result.detail = std::to_string(pairs) + " random pairs";
  return result;
}

CheckResult check_cubic_bound(const Fixture& fx, int samples, std::uint64_t seed) {
  CheckResult result{"cubic-upper-bound:" + fx.name(), true, ""};
  const CubicBoundReport report = verify_lemma4_bound(fx.problem(), samples, seed);
  result.pass = report.ok;
  result.detail = std::to_string(report.samples) + " pairs, max violation " + fmt(report.max_violation);
  return result;
}

CheckResult check_oracle_equivalence(const Fixture& fx, int points, int k_max, std::uint64_t seed,
                                     double tol, Execution exec) {
  CheckResult result{"oracle-equivalence:" + fx.name(), true, ""};
  Rng rng(seed);
  const PenaltyProblem& prob = fx.problem();
  const double a = spectral_a(prob);
  const double etas[3] = {0.1 / a, 1.0 / a, 1.9 / a};
  double worst = 0.0;
  for (int t = 0; t < points; ++t) {
    const StackedVector x = seeded_point(prob, rng);
    for (double eta : etas) {
      const auto distributed = distributed_ghat_sequence(prob, x, eta, k_max, exec);
      const auto oracle = closed_form_ghat_sequence(prob, x, eta, k_max);
      for (int k = 0; k <= k_max; ++k) {
        const double err =
            (distributed[k].flat() - oracle[k].flat()).cwiseAbs().maxCoeff();
        worst = std::max(worst, err);
        if (err > tol) {
          result.pass = false;
          std::ostringstream os;
          os << fx.name() << " seed=" << seed << " point=" << t << " eta=" << fmt(eta) << " k=" << k
             << ": max entry deviation " << fmt(err) << " > " << fmt(tol);
          result.detail = os.str();
          return result;
        }
      }
    }
  }
  result.detail = std::to_string(points) + " points x 3 etas x k<=" + std::to_string(k_max) +
                  ", max deviation " + fmt(worst);
  return result;
}

CheckResult check_simulator_centralized(const Fixture& fx, int iterations, Execution exec) {
  CheckResult result{"simulator-centralized:" + fx.name(), true, ""};
  const PenaltyProblem& prob = fx.problem();
  const double a = spectral_a(prob);
  const double eta = 1.0 / a;

  struct Setup {
    Algo algo;
    double eta;
    int inner_rounds;
  };
  std::vector<Setup> setups = {{Algo::Doboc, eta, 1}, {Algo::DobocK, eta, 3}};
  if (prob.lambda() * a <= 2.0) setups.push_back({Algo::Dgd, prob.lambda(), 1});

  for (const Setup& s : setups) {
    StackedVector x(prob.agents(), prob.dim());
    for (int k = 0; k < iterations; ++k) {
      const int inner = s.algo == Algo::Doboc ? k : (s.algo == Algo::DobocK ? s.inner_rounds - 1 : 0);
      const StackedVector dist = distributed_ghat(prob, x, s.eta, inner, exec);
      const Eigen::MatrixXd hess = dense_penalty_hessian(prob, x);
      const Eigen::VectorXd grad = prob.gradient(x).flat();
      const Eigen::VectorXd dense = dense_ghat(hess, grad, s.eta, inner);
      const double err = (dist.flat() - dense).cwiseAbs().maxCoeff();
      if (err > 1e-12) {
        result.pass = false;
        result.detail = fx.name() + " " + to_string(s.algo) + " iteration " + std::to_string(k) +
                        ": distributed vs dense ghat deviates by " + fmt(err);
        return result;
      }
      x.flat() -= dist.flat();
    }

    // The engine must compose the very same per-iteration updates.
    if (s.algo != Algo::Dgd) {
      AlgoConfig cfg;
      cfg.eta = s.eta;
      cfg.lambda = prob.lambda();
      cfg.inner_rounds = s.inner_rounds;
      cfg.max_iter = iterations;
      cfg.tol = 0.0;
      const RunTrace trace = run(prob, s.algo, cfg, StackedVector(prob.agents(), prob.dim()),
                                 &fx.reference(), exec);
      if (std::memcmp(trace.final_x.flat().data(), x.flat().data(), sizeof(double) * x.size()) != 0) {
        result.pass = false;
        result.detail = fx.name() + " " + to_string(s.algo) + ": engine run differs from composed steps";
        return result;
      }
    }
  }
  result.detail = std::to_string(iterations) + " iterations per algorithm";
  return result;
}

CheckResult check_dgd_recovery(const Fixture& fx, int iterations, Execution exec) {
  CheckResult result{"dgd-recovery:" + fx.name(), true, ""};
  const PenaltyProblem& prob = fx.problem();

  AlgoConfig dgd_cfg;
  dgd_cfg.lambda = prob.lambda();
  dgd_cfg.eta = prob.lambda();
  dgd_cfg.max_iter = iterations;
  dgd_cfg.tol = 0.0;

  AlgoConfig k1_cfg = dgd_cfg;
  k1_cfg.inner_rounds = 1;

  // Per-iterate comparison: both rules are stationary (no dependence on the
  // outer index), so stepping one iteration at a time is faithful.
  AlgoConfig step_dgd = dgd_cfg;
  step_dgd.max_iter = 1;
  AlgoConfig step_k1 = k1_cfg;
  step_k1.max_iter = 1;
  StackedVector x(prob.agents(), prob.dim());
  for (int k = 0; k < iterations; ++k) {
    const RunTrace a = run(prob, Algo::Dgd, step_dgd, x, &fx.reference(), exec);
    const RunTrace b = run(prob, Algo::DobocK, step_k1, x, &fx.reference(), exec);
    if (std::memcmp(a.final_x.flat().data(), b.final_x.flat().data(),
                    sizeof(double) * x.size()) != 0) {
      result.pass = false;
      result.detail = fx.name() + ": iterate " + std::to_string(k + 1) +
                      " differs between dgd and doboc-k(K=1, eta=lambda)";
      return result;
    }
    x = a.final_x;
  }

  const StackedVector x0(prob.agents(), prob.dim());
  const RunTrace dgd_trace = run(prob, Algo::Dgd, dgd_cfg, x0, &fx.reference(), exec);
  const RunTrace k1_trace = run(prob, Algo::DobocK, k1_cfg, x0, &fx.reference(), exec);
  if (!trace_bitwise_equal(dgd_trace, k1_trace)) {
    result.pass = false;
    result.detail = fx.name() + ": doboc-k(K=1, eta=lambda) trace differs from dgd";
    return result;
  }
  result.detail = std::to_string(iterations) + " iterates and traces bitwise equal";
  return result;
}

CheckResult check_locality(Execution exec) {
  CheckResult result{"locality", true, ""};
  const Fixture fx = path3_quadratic();
  const PenaltyProblem& prob = fx.problem();

  StackedVector x(3, 1);
  x.block(0)[0] = 0.3;
  x.block(1)[0] = -0.2;
  x.block(2)[0] = 0.7;
  StackedVector perturbed = x;
  perturbed.block(2)[0] = 99.0;  // agent 3 is not a neighbor of agent 1

  const StackedVector g_base = distributed_ghat(prob, x, 0.25, 0, exec);
  const StackedVector g_pert = distributed_ghat(prob, perturbed, 0.25, 0, exec);
  if (std::memcmp(g_base.block_data(0), g_pert.block_data(0), sizeof(double)) != 0) {
    result.pass = false;
    result.detail = "ghat_0 of agent 1 changed when a non-neighbor's state changed";
    return result;
  }

  AlgoConfig cfg;
  cfg.lambda = prob.lambda();
  cfg.eta = prob.lambda();
  cfg.max_iter = 1;
  cfg.tol = 0.0;
  const RunTrace base = run(prob, Algo::Dgd, cfg, x, &fx.reference(), exec);
  const RunTrace pert = run(prob, Algo::Dgd, cfg, perturbed, &fx.reference(), exec);
  if (std::memcmp(base.final_x.block_data(0), pert.final_x.block_data(0), sizeof(double)) != 0) {
    result.pass = false;
    result.detail = "one dgd round leaked non-neighbor state into agent 1";
    return result;
  }
  result.detail = "agent output invariant to non-neighbor perturbation";
  return result;
}

CheckResult check_protocol_enforcement() {
  CheckResult result{"protocol-enforcement", true, ""};
  const Fixture fx = path3_quadratic();
  RoundMailbox box(fx.problem().graph(), 1);
  box.begin_round(3);

  bool threw = false;
  try {
    box.deliver(2, 0, Eigen::VectorXd::Ones(1));  // agents 3 -> 1: not neighbors
  } catch (const ProtocolError& e) {
    threw = e.agent == 0 && e.peer == 2 && e.round == 3;
  }
  if (!threw) {
    result.pass = false;
    result.detail = "non-neighbor delivery was not rejected with (agent, peer, round)";
    return result;
  }

  box.begin_round(4);
  threw = false;
  try {
    box.require_complete(1);  // nothing delivered to agent 2 this round
  } catch (const ProtocolError& e) {
    threw = e.agent == 1 && (e.peer == 0 || e.peer == 2) && e.round == 4;
  }
  if (!threw) {
    result.pass = false;
    result.detail = "missing-message barrier was not enforced";
    return result;
  }
  result.detail = "non-neighbor delivery and missing messages rejected";
  return result;
}

CheckResult check_accounting(const Fixture& fx, int iterations, Execution exec) {
  CheckResult result{"communication-accounting:" + fx.name(), true, ""};
  const PenaltyProblem& prob = fx.problem();
  const long long per_round = prob.graph().directed_edges() * prob.dim();
  const long long T = iterations;

  auto run_with = [&](Algo algo, int k) {
    AlgoConfig cfg;
    cfg.lambda = prob.lambda();
    cfg.eta = 0.5 / spectral_a(prob);
    cfg.inner_rounds = k;
    cfg.max_iter = T;
    cfg.tol = 0.0;
    return run(prob, algo, cfg, StackedVector(prob.agents(), prob.dim()), &fx.reference(), exec);
  };

  const RunTrace doboc = run_with(Algo::Doboc, 1);
  const RunTrace dgd = run_with(Algo::Dgd, 1);
  const RunTrace k2 = run_with(Algo::DobocK, 2);
  const RunTrace k5 = run_with(Algo::DobocK, 5);

  auto check = [&](const RunTrace& t, const char* label, auto rounds_after) -> bool {
    long long expected_rounds = 0;
    for (long long k = 0; k < T; ++k) {
      expected_rounds += rounds_after(k);
      if (t.rows[k].rounds != expected_rounds ||
          t.rows[k].messages != expected_rounds * per_round) {
        result.pass = false;
        result.detail = fx.name() + std::string(" ") + label + " iteration " + std::to_string(k) +
                        ": rounds=" + std::to_string(t.rows[k].rounds) + " messages=" +
                        std::to_string(t.rows[k].messages) + ", expected rounds=" +
                        std::to_string(expected_rounds);
        return false;
      }
    }
    return true;
  };

  if (!check(doboc, "doboc", [](long long k) { return k + 1; })) return result;
  if (!check(dgd, "dgd", [](long long) { return 1; })) return result;
  if (!check(k2, "doboc-k(2)", [](long long) { return 2; })) return result;
  if (!check(k5, "doboc-k(5)", [](long long) { return 5; })) return result;

  if (doboc.rows[T - 1].rounds != T * (T + 1) / 2) {
    result.pass = false;
    result.detail = "doboc total rounds after " + std::to_string(T) + " iterations is " +
                    std::to_string(doboc.rows[T - 1].rounds) + ", expected " +
                    std::to_string(T * (T + 1) / 2);
    return result;
  }
  result.detail = "rounds T(T+1)/2 / K*T / T and exact message counts, T=" + std::to_string(T);
  return result;
}

CheckResult check_thm1_envelope(const Fixture& fx, int max_iter, Execution exec) {
  CheckResult result{"superlinear-envelope:" + fx.name(), true, ""};
  const PenaltyProblem& prob = fx.problem();
  const StackedVector x0(prob.agents(), prob.dim());
  const double eta = auto_eta_superlinear(prob);
  const BoundReport bounds = compute_bounds(prob, eta, 1, x0, &fx.reference());
  if (!bounds.thm1_ok || bounds.contraction_c >= 1.0) {
    result.pass = false;
    result.detail = "step-size preconditions failed: eta=" + fmt(eta) +
                    " c=" + fmt(bounds.contraction_c);
    return result;
  }

  AlgoConfig cfg;
  cfg.eta = eta;
  cfg.lambda = prob.lambda();
  cfg.max_iter = max_iter;
  cfg.tol = 0.0;
  const RunTrace trace = run(prob, Algo::Doboc, cfg, x0, &fx.reference(), exec);
  const RateReport rates = estimate_rates(trace, bounds.contraction_c, kNaN);

  if (rates.thm1_envelope_slack > 1e-12) {
    result.pass = false;
    result.detail = fx.name() + ": err_{k+1} exceeds c^{k+1} err_k by " +
                    fmt(rates.thm1_envelope_slack);
    return result;
  }
  if (!rates.superlinear || rates.error_ratios.size() < 5) {
    result.pass = false;
    result.detail = fx.name() + ": ratio sequence not strictly decreasing (" +
                    std::to_string(rates.error_ratios.size()) + " usable ratios)";
    return result;
  }
  result.detail = "c=" + fmt(bounds.contraction_c) + ", " +
                  std::to_string(rates.error_ratios.size()) + " ratios strictly decreasing, slack " +
                  fmt(rates.thm1_envelope_slack);
  return result;
}

CheckResult check_thm2_envelope(const Fixture& fx, int inner_rounds, int iterations, Execution exec) {
  CheckResult result{"linear-envelope:" + fx.name() + ":K=" + std::to_string(inner_rounds), true, ""};
  const PenaltyProblem& prob = fx.problem();
  const StackedVector x0(prob.agents(), prob.dim());
  const double eta = auto_eta_linear(prob, inner_rounds, x0, &fx.reference());
  const BoundReport bounds = compute_bounds(prob, eta, inner_rounds, x0, &fx.reference());
  if (!bounds.epsilon_valid) {
    result.pass = false;
    result.detail = "epsilon invalid at eta=" + fmt(eta) + ": epsilon=" + fmt(bounds.epsilon);
    return result;
  }

  AlgoConfig cfg;
  cfg.eta = eta;
  cfg.lambda = prob.lambda();
  cfg.inner_rounds = inner_rounds;
  cfg.max_iter = iterations;
  cfg.tol = 0.0;
  const RunTrace trace = run(prob, Algo::DobocK, cfg, x0, &fx.reference(), exec);

  const double gap0 = trace.initial.f_gap;
  double envelope = gap0;
  for (std::size_t k = 0; k < trace.rows.size(); ++k) {
    envelope *= 1.0 - bounds.epsilon;
    if (trace.rows[k].f_gap > envelope * (1.0 + 1e-9)) {
      result.pass = false;
      result.detail = "K=" + std::to_string(inner_rounds) + " iteration " + std::to_string(k + 1) +
                      ": gap " + fmt(trace.rows[k].f_gap) + " above envelope " + fmt(envelope);
      return result;
    }
  }
  result.detail = "epsilon=" + fmt(bounds.epsilon) + ", " + std::to_string(trace.rows.size()) +
                  " iterations inside the (1-eps)^k envelope";
  return result;
}

CheckResult check_newton_limit() {
  CheckResult result{"newton-limit", true, ""};
  const Fixture fx = single_agent_quadratic();
  const PenaltyProblem& prob = fx.problem();

  StackedVector x(1, 3);
  x.block(0) = Eigen::Vector3d(2.0, -1.0, 0.5);
  const double eta = 1.0 / prob.smoothness();  // 1/M = 0.25
  const double m = prob.strong_convexity();
  const int k_final = 200;

  const Eigen::MatrixXd hess = dense_penalty_hessian(prob, x);
  const Eigen::VectorXd newton = hess.llt().solve(prob.gradient(x).flat());
  const double newton_norm = newton.norm();

  const auto seq = closed_form_ghat_sequence(prob, x, eta, k_final);

  // Envelope ||ghat_k - newton|| <= (1-eta m)^{k+1} ||newton|| (1+1e-9),
  // checked while the deviation sits above the float cancellation floor.
  const double factor = 1.0 - eta * m;
  double envelope = newton_norm;
  std::vector<double> dev(k_final + 1);
  for (int k = 0; k <= k_final; ++k) dev[k] = (seq[k].flat() - newton).norm();
  for (int k = 0; k <= 50; ++k) {
    envelope *= factor;
    if (dev[k] > envelope * (1.0 + 1e-9)) {
      result.pass = false;
      result.detail = "k=" + std::to_string(k) + ": deviation " + fmt(dev[k]) + " above envelope " +
                      fmt(envelope);
      return result;
    }
  }

  // Geometric decrease of consecutive deviations, above the noise floor.
  int checked = 0;
  for (int k = 0; k + 1 <= k_final && dev[k + 1] >= 1e-4 * newton_norm; ++k, ++checked) {
    if (dev[k + 1] > (factor + 1e-12) * dev[k]) {
      result.pass = false;
      result.detail = "k=" + std::to_string(k) + ": ratio " + fmt(dev[k + 1] / dev[k]) +
                      " above 1 - eta m = " + fmt(factor);
      return result;
    }
  }

  if (dev[k_final] > 1e-8 * newton_norm) {
    result.pass = false;
    result.detail = "k=200 relative deviation " + fmt(dev[k_final] / newton_norm) + " > 1e-8";
    return result;
  }

  // The distributed recursion agrees with the closed form en route.
  for (int k : {0, 5, 10}) {
    const StackedVector dist = distributed_ghat(prob, x, eta, k);
    if ((dist.flat() - seq[k].flat()).cwiseAbs().maxCoeff() > 1e-10) {
      result.pass = false;
      result.detail = "distributed ghat_" + std::to_string(k) + " deviates from the closed form";
      return result;
    }
  }
  result.detail = std::to_string(checked) + " geometric ratios <= " + fmt(factor) +
                  ", k=200 relative deviation " + fmt(dev[k_final] / newton_norm);
  return result;
}

CheckResult check_penalty_gap_trend() {
  CheckResult result{"penalty-gap-trend", true, ""};
  const double lambdas[3] = {1.0, 0.1, 0.01};
  double previous = std::numeric_limits<double>::infinity();
  std::ostringstream os;
  for (double lambda : lambdas) {
    const Fixture fx = two_agent_quadratic(lambda);
    const Reference& ref = fx.reference();
    StackedVector consensus(fx.problem().agents(), fx.problem().dim());
    for (int i = 0; i < fx.problem().agents(); ++i) consensus.block(i) = ref.y_star;
    const double distance = (ref.x_star.flat() - consensus.flat()).norm();
    os << " lambda=" << fmt(lambda) << " -> " << fmt(distance);
    if (!(distance < previous)) {
      result.pass = false;
      result.detail = "distance to the consensus solution did not shrink:" + os.str();
      return result;
    }
    previous = distance;
  }
  result.detail = os.str();
  return result;
}

CheckResult check_determinism(const Fixture& fx, int iterations) {
  CheckResult result{"determinism:" + fx.name(), true, ""};
  const PenaltyProblem& prob = fx.problem();
  AlgoConfig cfg;
  cfg.eta = auto_eta_superlinear(prob);
  cfg.lambda = prob.lambda();
  cfg.max_iter = iterations;
  cfg.tol = 0.0;
  const StackedVector x0(prob.agents(), prob.dim());

  const RunTrace serial = run(prob, Algo::Doboc, cfg, x0, &fx.reference(), Execution::Serial);
  const RunTrace parallel1 = run(prob, Algo::Doboc, cfg, x0, &fx.reference(), Execution::OpenMP);
  const RunTrace parallel2 = run(prob, Algo::Doboc, cfg, x0, &fx.reference(), Execution::OpenMP);

  if (!trace_bitwise_equal(serial, parallel1) || !trace_bitwise_equal(parallel1, parallel2)) {
    result.pass = false;
    result.detail = fx.name() + ": serial and OpenMP traces are not bitwise identical";
    return result;
  }
  result.detail = "serial and OpenMP traces bitwise identical over " + std::to_string(iterations) +
                  " iterations";
  return result;
}

std::vector<CheckResult> run_verification(Scale scale, Execution exec) {
  std::vector<CheckResult> results;
  auto add = [&](CheckResult r) { results.push_back(std::move(r)); };

  const bool tiny = scale == Scale::Tiny;
  const int points = scale == Scale::Full ? 20 : (tiny ? 3 : 10);
  const int k_max = scale == Scale::Full ? 12 : (tiny ? 4 : 10);
  const int recovery_iters = scale == Scale::Full ? 100 : (tiny ? 10 : 50);
  const int cubic_samples = scale == Scale::Full ? 300 : (tiny ? 25 : 100);

  add(check_mix_properties(tiny ? 4 : 12, 2024));
  add(check_locality(exec));
  add(check_protocol_enforcement());

  std::vector<Fixture> fixtures;
  if (tiny) {
    fixtures.push_back(two_agent_quadratic());
  } else {
    fixtures = standard_fixtures();
  }

  for (const Fixture& fx : fixtures) {
    add(check_gradient_fd(fx, points, 31));
    add(check_hessian_vec_fd(fx, points, 37));
    add(check_consensus_annihilation(fx, tiny ? 3 : 5, 41));
    add(check_spectral_sandwich(fx, points, 43));
    add(check_convexity_envelopes(fx, tiny ? 5 : 20, 47));
    add(check_cubic_bound(fx, cubic_samples, 53));
    add(check_oracle_equivalence(fx, points, k_max, 59, 1e-10, exec));
    add(check_dgd_recovery(fx, recovery_iters, exec));
    if (!tiny) add(check_simulator_centralized(fx, 20, exec));
  }

  const Fixture ring = ring5_quadratic();
  add(check_accounting(tiny ? fixtures.front() : ring, 10, exec));
  add(check_determinism(tiny ? fixtures.front() : ring, tiny ? 5 : 10));

  if (!tiny) {
    add(check_thm1_envelope(ring, 30, exec));
    add(check_thm2_envelope(ring, 2, 100, exec));
    add(check_thm2_envelope(ring, 5, 100, exec));
    add(check_newton_limit());
    add(check_penalty_gap_trend());
  }
  return results;
}

}  // namespace doboc::verify
