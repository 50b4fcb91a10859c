#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "doboc/analysis.hpp"
#include "doboc/parallel.hpp"
#include "doboc/penalty.hpp"
#include "doboc/simulator.hpp"

namespace doboc::verify {

/// Named problem instance used by the self-check suite and the CLI
/// `verify` subcommand.  The reference solution is computed lazily and
/// shared across copies.
class Fixture {
 public:
  Fixture(std::string name, PenaltyProblem problem)
      : name_(std::move(name)),
        problem_(std::make_shared<PenaltyProblem>(std::move(problem))),
        ref_(std::make_shared<std::unique_ptr<Reference>>()) {}

  const std::string& name() const { return name_; }
  const PenaltyProblem& problem() const { return *problem_; }

  const Reference& reference() const {
    if (!*ref_) *ref_ = std::make_unique<Reference>(compute_reference(*problem_));
    return **ref_;
  }

 private:
  std::string name_;
  std::shared_ptr<PenaltyProblem> problem_;
  std::shared_ptr<std::unique_ptr<Reference>> ref_;
};

// The standard desk-scale instances.
Fixture two_agent_quadratic(double lambda = 1.0);  // n=2, p=1, scalar quadratics
Fixture ring5_quadratic();                         // n=5 ring, p=3, seeded spectrum [1,10]
Fixture star4_logistic();                          // n=4 star, p=2, synthetic data
Fixture single_agent_quadratic();                  // n=1, p=3, diag(1,2,4)
std::vector<Fixture> standard_fixtures();

struct CheckResult {
  std::string name;
  bool pass = true;
  std::string detail;  // failure counterexample or pass summary
};

// Individual checks, parameterized so callers can pin their own budgets.
CheckResult check_mix_properties(int graphs, std::uint64_t seed);
CheckResult check_gradient_fd(const Fixture& fx, int points, std::uint64_t seed);
CheckResult check_hessian_vec_fd(const Fixture& fx, int points, std::uint64_t seed);
CheckResult check_consensus_annihilation(const Fixture& fx, int points, std::uint64_t seed);
CheckResult check_spectral_sandwich(const Fixture& fx, int points, std::uint64_t seed);
CheckResult check_convexity_envelopes(const Fixture& fx, int pairs, std::uint64_t seed);
CheckResult check_cubic_bound(const Fixture& fx, int samples, std::uint64_t seed);
CheckResult check_oracle_equivalence(const Fixture& fx, int points, int k_max, std::uint64_t seed,
                                     double tol, Execution exec);
CheckResult check_simulator_centralized(const Fixture& fx, int iterations, Execution exec);
CheckResult check_dgd_recovery(const Fixture& fx, int iterations, Execution exec);
CheckResult check_locality(Execution exec);
CheckResult check_protocol_enforcement();
CheckResult check_accounting(const Fixture& fx, int iterations, Execution exec);
CheckResult check_thm1_envelope(const Fixture& fx, int max_iter, Execution exec);
CheckResult check_thm2_envelope(const Fixture& fx, int inner_rounds, int iterations, Execution exec);
CheckResult check_newton_limit();
CheckResult check_penalty_gap_trend();
CheckResult check_determinism(const Fixture& fx, int iterations);

enum class Scale { Tiny, Default, Full };
Scale scale_from_string(const std::string& s);

/// The full suite at the requested scale.  Every result carries a one-line
/// detail; the first failing one holds the counterexample.
std::vector<CheckResult> run_verification(Scale scale, Execution exec = Execution::OpenMP);

}  // namespace doboc::verify
