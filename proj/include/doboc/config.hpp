#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "doboc/algorithms.hpp"
#include "doboc/analysis.hpp"
#include "doboc/graph.hpp"
#include "doboc/penalty.hpp"

namespace doboc {

// Experiment configs are strict JSON: unknown keys are rejected at every
// level, and every field the selected algorithm needs must be present.
// Agent indices in configs and CSV files are 1-based.

struct MetropolisGraphSpec {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // 0-based after parsing
};

struct ExplicitGraphSpec {
  Eigen::MatrixXd weights;
};

using GraphSpec = std::variant<MetropolisGraphSpec, ExplicitGraphSpec>;

struct QuadraticExplicitSpec {
  std::vector<QuadraticSpec> agents;
};

struct QuadraticRandomSpec {
  int dim = 0;
  double spectrum_lo = 0.0;
  double spectrum_hi = 0.0;
  std::optional<std::uint64_t> seed;  // falls back to the experiment seed
};

struct LogisticProblemSpec {
  double mu = 0.0;
  std::string data_path;  // CSV: agent_id,label,feature_1..feature_p
};

using ProblemSpec = std::variant<QuadraticExplicitSpec, QuadraticRandomSpec, LogisticProblemSpec>;

enum class EtaMode { Fixed, AutoSuperlinear, AutoLinear };

struct EtaSpec {
  EtaMode mode = EtaMode::Fixed;
  double value = 0.0;  // only for Fixed
};

struct ExperimentConfig {
  GraphSpec graph;
  ProblemSpec problem;
  double lambda = 0.0;
  Algo algorithm = Algo::Doboc;
  std::optional<EtaSpec> eta;  // required unless algorithm == dgd
  std::optional<int> inner_rounds;  // K, required iff doboc-k
  long long max_iter = 1000;
  double tol = 1e-10;
  std::optional<std::vector<Eigen::VectorXd>> x0;  // nullopt = zeros
  std::uint64_t seed = 0;
};

ExperimentConfig parse_experiment(const nlohmann::json& j);
ExperimentConfig load_experiment(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Per-agent sample sets from a CSV with columns
/// agent_id,label,feature_1..feature_p (header optional).
std::vector<std::vector<LogisticSample>> load_logistic_csv(const std::string& path, int agents);

/// A fully constructed experiment: problem, solver config with eta
/// resolved (auto modes included), and the initial point.
struct BuiltExperiment {
  PenaltyProblem problem;
  AlgoConfig algo_config;
  Algo algorithm;
  StackedVector x0;
  std::string eta_mode;  // "fixed" | "auto-thm1" | "auto-thm2"
};

BuiltExperiment build_experiment(const ExperimentConfig& cfg);

}  // namespace doboc
