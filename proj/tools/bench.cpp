// Serial vs OpenMP benchmark for the round engine.  The per-agent work is
// made heavy enough to measure (many-sample logistic objectives) while the
// flat dimension stays inside the dense reference solver's limit.  The two
// execution modes must agree bitwise; the benchmark verifies that too.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "doboc/analysis.hpp"
#include "doboc/objectives.hpp"
#include "doboc/simulator.hpp"

namespace {

double now_seconds() {
#ifdef _OPENMP
  return omp_get_wtime();
#else
  return static_cast<double>(clock()) / CLOCKS_PER_SEC;
#endif
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"doboc round-engine benchmark: serial loop vs OpenMP"};
  int agents = 64;
  int dim = 12;
  int samples = 400;
  int inner_rounds = 4;
  int iterations = 30;
  int repetitions = 3;
  app.add_option("--agents", agents, "ring size")->check(CLI::PositiveNumber);
  app.add_option("--dim", dim, "decision dimension per agent")->check(CLI::PositiveNumber);
  app.add_option("--samples", samples, "logistic samples per agent")->check(CLI::PositiveNumber);
  app.add_option("--k", inner_rounds, "inner communication rounds per iteration")
      ->check(CLI::PositiveNumber);
  app.add_option("--iters", iterations, "outer iterations")->check(CLI::PositiveNumber);
  app.add_option("--reps", repetitions, "timed repetitions (best is reported)")
      ->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < agents; ++i) edges.emplace_back(i, (i + 1) % agents);
  doboc::CommGraph graph = doboc::CommGraph::metropolis(agents, edges);

  const auto data = doboc::make_synthetic_logistic_data(agents, dim, samples, 5);
  doboc::PenaltyProblem problem(std::move(graph), doboc::make_logistic_family(dim, data, 0.5), 1.0);

  std::printf("ring n=%d, p=%d, %d samples/agent, doboc-k K=%d, %d iterations\n", agents, dim,
              samples, inner_rounds, iterations);

  const doboc::Reference ref = doboc::compute_reference(problem);
  doboc::AlgoConfig cfg;
  cfg.lambda = problem.lambda();
  cfg.inner_rounds = inner_rounds;
  cfg.eta = doboc::auto_eta_linear(problem, inner_rounds, doboc::StackedVector(agents, dim), &ref);
  cfg.max_iter = iterations;
  cfg.tol = 0.0;
  const doboc::StackedVector x0(agents, dim);

  auto timed = [&](doboc::Execution exec) {
    double best = 1e300;
    doboc::RunTrace trace;
    for (int r = 0; r < repetitions; ++r) {
      const double t0 = now_seconds();
      trace = doboc::run(problem, doboc::Algo::DobocK, cfg, x0, &ref, exec);
      best = std::min(best, now_seconds() - t0);
    }
    return std::make_pair(best, std::move(trace));
  };

  auto [serial_time, serial_trace] = timed(doboc::Execution::Serial);
  auto [parallel_time, parallel_trace] = timed(doboc::Execution::OpenMP);

  const bool identical =
      serial_trace.final_x.flat() == parallel_trace.final_x.flat() &&
      serial_trace.rows.back().f_gap == parallel_trace.rows.back().f_gap;

  std::printf("workers available : %d\n", doboc::max_workers());
  std::printf("serial            : %8.3f ms/run\n", 1e3 * serial_time);
  std::printf("openmp            : %8.3f ms/run\n", 1e3 * parallel_time);
  std::printf("speedup           : %8.2fx\n", serial_time / parallel_time);
  std::printf("bitwise identical : %s\n", identical ? "yes" : "NO");
  std::printf("final f_gap       : %.6e\n", serial_trace.rows.back().f_gap);
  return identical ? 0 : 1;
}
