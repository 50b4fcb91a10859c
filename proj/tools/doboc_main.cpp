// Command-line front end: run experiments, print theoretical bounds, and
// execute the self-check suite.
//
//   doboc run    --config experiment.json --out trace.csv
//   doboc bounds --config experiment.json
//   doboc verify [--scale tiny|default|full]
//
// Exit codes: 0 success, 1 error, 2 iteration budget exhausted,
// 3 verification failure.  DOBOC_THREADS caps the worker count.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "doboc/analysis.hpp"
#include "doboc/config.hpp"
#include "doboc/simulator.hpp"
#include "doboc/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitBudget = 2;
constexpr int kExitVerifyFailed = 3;

int cmd_run(const std::string& config_path, const std::string& out_path) {
  const doboc::ExperimentConfig cfg = doboc::load_experiment(config_path);
  doboc::BuiltExperiment exp = doboc::build_experiment(cfg);

  const doboc::Reference ref = doboc::compute_reference(exp.problem);
  doboc::RunTrace trace;
  try {
    trace = doboc::run(exp.problem, exp.algorithm, exp.algo_config, exp.x0, &ref);
  } catch (const doboc::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }

  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "error: cannot open output file \"" << out_path << "\"\n";
    return kExitError;
  }
  doboc::write_trace_csv(trace, out);

  const doboc::TraceRow& last = trace.rows.empty() ? trace.initial : trace.rows.back();
  std::printf(
      "status=%s algorithm=%s eta=%.17g eta_mode=%s iterations=%lld rounds=%lld messages=%lld "
      "f_gap=%.17g grad_norm=%.17g\n",
      trace.converged() ? "converged" : "budget-exhausted", doboc::to_string(exp.algorithm).c_str(),
      exp.algo_config.eta, exp.eta_mode.c_str(), last.iter, last.rounds, last.messages, last.f_gap,
      last.grad_norm);
  return trace.converged() ? kExitOk : kExitBudget;
}

int cmd_bounds(const std::string& config_path) {
  const doboc::ExperimentConfig cfg = doboc::load_experiment(config_path);
  const doboc::BuiltExperiment exp = doboc::build_experiment(cfg);
  const doboc::Reference ref = doboc::compute_reference(exp.problem);
  const doboc::BoundReport r = doboc::compute_bounds(
      exp.problem, exp.algo_config.eta, exp.algo_config.inner_rounds, exp.x0, &ref);

  std::printf("constants:\n");
  std::printf("  m        = %.12g\n", r.m);
  std::printf("  M        = %.12g\n", r.big_m);
  std::printf("  L        = %.12g\n", r.lips);
  std::printf("  lambda   = %.12g\n", r.lambda);
  std::printf("  w_min    = %.12g\n", r.w_min);
  std::printf("  a        = %.12g   (M + 2(1-w_min)/lambda)\n", r.a);
  std::printf("step sizes (eta=%.12g, K=%d):\n", r.eta, r.inner_rounds);
  std::printf("  eta_thm1_max = %.12g   superlinear window (0, 2/a): %s\n", r.eta_thm1_max,
              r.thm1_ok ? "satisfied" : "violated");
  std::printf("  c            = %.12g   ||I - eta hessF(x*)||\n", r.contraction_c);
  std::printf("  eta_f_max    = %.12g   linear-regime window: %s\n", r.eta_f_max,
              r.f_ok ? "satisfied" : "violated");
  std::printf("  eta_lin_max  = %.12g   additional linear-rate bound: %s\n", r.eta_lin_max,
              r.lin_ok ? "satisfied" : "violated");
  std::printf("  epsilon      = %.12g   per-step gap contraction: %s\n", r.epsilon,
              r.epsilon_valid ? "valid" : "invalid");
  std::printf("  f_gap0       = %.12g\n", r.f_gap0);
  if (r.dgd_equivalent)
    std::printf("note: K=1 with eta=lambda makes doboc-k identical to dgd\n");

  nlohmann::json j{{"m", r.m},
                   {"M", r.big_m},
                   {"L", r.lips},
                   {"lambda", r.lambda},
                   {"w_min", r.w_min},
                   {"a", r.a},
                   {"eta", r.eta},
                   {"K", r.inner_rounds},
                   {"eta_thm1_max", r.eta_thm1_max},
                   {"c", r.contraction_c},
                   {"eta_f_max", r.eta_f_max},
                   {"eta_thm2_max", r.eta_lin_max},
                   {"epsilon", r.epsilon},
                   {"f_gap0", r.f_gap0},
                   {"preconditions",
                    {{"thm1", r.thm1_ok},
                     {"eq_f", r.f_ok},
                     {"thm2", r.lin_ok},
                     {"epsilon_valid", r.epsilon_valid},
                     {"dgd_equivalent", r.dgd_equivalent}}}};
  std::printf("%s\n", j.dump().c_str());
  return kExitOk;
}

int cmd_verify(const std::string& scale_name) {
  const doboc::verify::Scale scale = doboc::verify::scale_from_string(scale_name);
  const auto results = doboc::verify::run_verification(scale);

  int failed = 0;
  for (const auto& r : results) {
    std::printf("[%s] %-42s %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    if (!r.pass) ++failed;
  }
  std::printf("%zu checks, %d failed (scale %s)\n", results.size(), failed, scale_name.c_str());
  if (failed > 0) {
    for (const auto& r : results) {
      if (!r.pass) {
        std::printf("first counterexample: %s: %s\n", r.name.c_str(), r.detail.c_str());
        break;
      }
    }
    return kExitVerifyFailed;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed consensus optimization testbed (DGD / DOBOC / DOBOC-K)"};
  app.require_subcommand(1);

  std::string config_path, out_path, scale = "default";

  CLI::App* run_cmd = app.add_subcommand("run", "run an experiment and write its trace CSV");
  run_cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
  run_cmd->add_option("--out", out_path, "output CSV path")->required();

  CLI::App* bounds_cmd = app.add_subcommand("bounds", "print the theoretical constants and bounds");
  bounds_cmd->add_option("--config", config_path, "experiment config (JSON)")->required();

  CLI::App* verify_cmd = app.add_subcommand("verify", "run the self-check suite");
  verify_cmd->add_option("--scale", scale, "tiny | default | full")
      ->check(CLI::IsMember({"tiny", "default", "full"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(config_path, out_path);
    if (bounds_cmd->parsed()) return cmd_bounds(config_path);
    return cmd_verify(scale);
  } catch (const doboc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
