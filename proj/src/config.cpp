#include "doboc/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace doboc {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& context) {
  for (const auto& item : j.items()) {
    if (!allowed.contains(item.key()))
      throw ConfigError("unknown key \"" + item.key() + "\" in " + context, item.key());
  }
}

const json& require(const json& j, const std::string& key, const std::string& context) {
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError("missing required field \"" + key + "\" in " + context, key);
  return *it;
}

double require_number(const json& j, const std::string& key, const std::string& context) {
  const json& v = require(j, key, context);
  if (!v.is_number()) throw ConfigError("field \"" + key + "\" in " + context + " must be a number", key);
  return v.get<double>();
}

Eigen::MatrixXd parse_matrix(const json& v, const std::string& context) {
  if (!v.is_array() || v.empty()) throw ConfigError(context + " must be a non-empty array of rows");
  const std::size_t cols = v.front().is_array() ? v.front().size() : 0;
  Eigen::MatrixXd m(v.size(), cols);
  for (std::size_t r = 0; r < v.size(); ++r) {
    const json& row = v[r];
    if (!row.is_array() || row.size() != cols)
      throw ConfigError("ragged or non-array row " + std::to_string(r) + " in " + context);
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number()) throw ConfigError("non-numeric entry in " + context);
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

Eigen::VectorXd parse_vector(const json& v, const std::string& context) {
  if (!v.is_array()) throw ConfigError(context + " must be an array of numbers");
  Eigen::VectorXd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError("non-numeric entry in " + context);
    out[i] = v[i].get<double>();
  }
  return out;
}

GraphSpec parse_graph(const json& j) {
  if (!j.is_object()) throw ConfigError("\"graph\" must be an object", "graph");
  const std::string type = require(j, "type", "graph").get<std::string>();
  if (type == "metropolis") {
    check_keys(j, {"type", "n", "edges"}, "graph");
    MetropolisGraphSpec spec;
    spec.n = require(j, "n", "graph").get<int>();
    const json& edges = require(j, "edges", "graph");
    if (!edges.is_array()) throw ConfigError("\"edges\" must be an array of [i, j] pairs", "edges");
    for (const json& e : edges) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
        throw ConfigError("each edge must be a pair of 1-based agent indices", "edges");
      spec.edges.emplace_back(e[0].get<int>() - 1, e[1].get<int>() - 1);
    }
    return spec;
  }
  if (type == "explicit") {
    check_keys(j, {"type", "weights"}, "graph");
    return ExplicitGraphSpec{parse_matrix(require(j, "weights", "graph"), "graph.weights")};
  }
  throw ConfigError("graph type must be \"metropolis\" or \"explicit\", got \"" + type + "\"",
                    "graph.type");
}

ProblemSpec parse_problem(const json& j) {
  if (!j.is_object()) throw ConfigError("\"problem\" must be an object", "problem");
  const std::string type = require(j, "type", "problem").get<std::string>();
  if (type == "quadratic") {
    if (j.contains("agents")) {
      check_keys(j, {"type", "agents"}, "problem");
      QuadraticExplicitSpec spec;
      const json& agents = j["agents"];
      if (!agents.is_array() || agents.empty())
        throw ConfigError("\"agents\" must be a non-empty array", "problem.agents");
      for (std::size_t i = 0; i < agents.size(); ++i) {
        const json& a = agents[i];
        const std::string ctx = "problem.agents[" + std::to_string(i) + "]";
        check_keys(a, {"A", "b", "c"}, ctx);
        QuadraticSpec q;
        q.a = parse_matrix(require(a, "A", ctx), ctx + ".A");
        q.b = parse_vector(require(a, "b", ctx), ctx + ".b");
        q.c = a.contains("c") ? a["c"].get<double>() : 0.0;
        spec.agents.push_back(std::move(q));
      }
      return spec;
    }
    check_keys(j, {"type", "p", "spectrum", "seed"}, "problem");
    QuadraticRandomSpec spec;
    spec.dim = static_cast<int>(require_number(j, "p", "problem"));
    const json& spectrum = require(j, "spectrum", "problem");
    if (!spectrum.is_array() || spectrum.size() != 2)
      throw ConfigError("\"spectrum\" must be [lo, hi]", "problem.spectrum");
    spec.spectrum_lo = spectrum[0].get<double>();
    spec.spectrum_hi = spectrum[1].get<double>();
    if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
    return spec;
  }
  if (type == "logistic") {
    check_keys(j, {"type", "mu", "data"}, "problem");
    LogisticProblemSpec spec;
    spec.mu = require_number(j, "mu", "problem");
    spec.data_path = require(j, "data", "problem").get<std::string>();
    return spec;
  }
  throw ConfigError("problem type must be \"quadratic\" or \"logistic\", got \"" + type + "\"",
                    "problem.type");
}

EtaSpec parse_eta(const json& v) {
  EtaSpec spec;
  if (v.is_number()) {
    spec.mode = EtaMode::Fixed;
    spec.value = v.get<double>();
    if (!(spec.value > 0.0)) throw ConfigError("eta must be > 0", "eta");
    return spec;
  }
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "auto-thm1") {
      spec.mode = EtaMode::AutoSuperlinear;
      return spec;
    }
    if (s == "auto-thm2") {
      spec.mode = EtaMode::AutoLinear;
      return spec;
    }
    throw ConfigError("eta string must be \"auto-thm1\" or \"auto-thm2\", got \"" + s + "\"", "eta");
  }
  throw ConfigError("eta must be a positive number or an auto-selection string", "eta");
}

}  // namespace

ExperimentConfig parse_experiment(const json& j) {
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  check_keys(j,
             {"graph", "problem", "lambda", "algorithm", "eta", "K", "max_iter", "tol", "x0", "seed"},
             "experiment config");

  ExperimentConfig cfg;
  cfg.graph = parse_graph(require(j, "graph", "experiment config"));
  cfg.problem = parse_problem(require(j, "problem", "experiment config"));
  cfg.lambda = require_number(j, "lambda", "experiment config");
  if (!(cfg.lambda > 0.0)) throw ConfigError("lambda must be > 0", "lambda");
  cfg.algorithm = algo_from_string(require(j, "algorithm", "experiment config").get<std::string>());

  if (j.contains("eta")) cfg.eta = parse_eta(j["eta"]);
  if (cfg.algorithm != Algo::Dgd && !cfg.eta)
    throw ConfigError("missing required field \"eta\" for algorithm " + to_string(cfg.algorithm),
                      "eta");

  if (j.contains("K")) {
    if (cfg.algorithm != Algo::DobocK)
      throw ConfigError("field \"K\" is only valid for algorithm doboc-k", "K");
    cfg.inner_rounds = j["K"].get<int>();
    if (*cfg.inner_rounds < 1) throw ConfigError("K must be >= 1", "K");
  } else if (cfg.algorithm == Algo::DobocK) {
    throw ConfigError("missing required field \"K\" for algorithm doboc-k", "K");
  }

  if (j.contains("max_iter")) {
    cfg.max_iter = j["max_iter"].get<long long>();
    if (cfg.max_iter < 1) throw ConfigError("max_iter must be >= 1", "max_iter");
  }
  if (j.contains("tol")) {
    cfg.tol = j["tol"].get<double>();
    if (cfg.tol < 0.0) throw ConfigError("tol must be >= 0", "tol");
  }
  if (j.contains("x0")) {
    const json& v = j["x0"];
    if (v.is_string()) {
      if (v.get<std::string>() != "zeros")
        throw ConfigError("x0 must be \"zeros\" or an array of per-agent vectors", "x0");
    } else if (v.is_array()) {
      std::vector<Eigen::VectorXd> blocks;
      for (std::size_t i = 0; i < v.size(); ++i)
        blocks.push_back(parse_vector(v[i], "x0[" + std::to_string(i) + "]"));
      cfg.x0 = std::move(blocks);
    } else {
      throw ConfigError("x0 must be \"zeros\" or an array of per-agent vectors", "x0");
    }
  }
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  return cfg;
}

ExperimentConfig load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file \"" + path + "\"");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_experiment(j);
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  json j;
  if (const auto* m = std::get_if<MetropolisGraphSpec>(&cfg.graph)) {
    json edges = json::array();
    for (auto [i, k] : m->edges) edges.push_back({i + 1, k + 1});
    j["graph"] = {{"type", "metropolis"}, {"n", m->n}, {"edges", edges}};
  } else {
    const auto& e = std::get<ExplicitGraphSpec>(cfg.graph);
    json rows = json::array();
    for (Eigen::Index r = 0; r < e.weights.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < e.weights.cols(); ++c) row.push_back(e.weights(r, c));
      rows.push_back(row);
    }
    j["graph"] = {{"type", "explicit"}, {"weights", rows}};
  }

  if (const auto* q = std::get_if<QuadraticExplicitSpec>(&cfg.problem)) {
    json agents = json::array();
    for (const auto& spec : q->agents) {
      json a = json::array();
      for (Eigen::Index r = 0; r < spec.a.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < spec.a.cols(); ++c) row.push_back(spec.a(r, c));
        a.push_back(row);
      }
      json b = json::array();
      for (Eigen::Index i = 0; i < spec.b.size(); ++i) b.push_back(spec.b[i]);
      agents.push_back({{"A", a}, {"b", b}, {"c", spec.c}});
    }
    j["problem"] = {{"type", "quadratic"}, {"agents", agents}};
  } else if (const auto* qr = std::get_if<QuadraticRandomSpec>(&cfg.problem)) {
    j["problem"] = {{"type", "quadratic"},
                    {"p", qr->dim},
                    {"spectrum", {qr->spectrum_lo, qr->spectrum_hi}}};
    if (qr->seed) j["problem"]["seed"] = *qr->seed;
  } else {
    const auto& l = std::get<LogisticProblemSpec>(cfg.problem);
    j["problem"] = {{"type", "logistic"}, {"mu", l.mu}, {"data", l.data_path}};
  }

  j["lambda"] = cfg.lambda;
  j["algorithm"] = to_string(cfg.algorithm);
  if (cfg.eta) {
    switch (cfg.eta->mode) {
      case EtaMode::Fixed: j["eta"] = cfg.eta->value; break;
      case EtaMode::AutoSuperlinear: j["eta"] = "auto-thm1"; break;
      case EtaMode::AutoLinear: j["eta"] = "auto-thm2"; break;
    }
  }
  if (cfg.inner_rounds) j["K"] = *cfg.inner_rounds;
  j["max_iter"] = cfg.max_iter;
  j["tol"] = cfg.tol;
  if (cfg.x0) {
    json blocks = json::array();
    for (const auto& b : *cfg.x0) {
      json v = json::array();
      for (Eigen::Index i = 0; i < b.size(); ++i) v.push_back(b[i]);
      blocks.push_back(v);
    }
    j["x0"] = blocks;
  } else {
    j["x0"] = "zeros";
  }
  j["seed"] = cfg.seed;
  return j;
}

std::vector<std::vector<LogisticSample>> load_logistic_csv(const std::string& path, int agents) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file \"" + path + "\"", "data");

  std::vector<std::vector<LogisticSample>> data(agents);
  std::string line;
  int feature_count = -1;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("agent_id", 0) == 0) continue;  // header

    std::vector<double> fields;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        fields.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line_no) + " of \"" + path +
                          "\": non-numeric field \"" + cell + "\"");
      }
    }
    if (fields.size() < 3)
      throw ConfigError("line " + std::to_string(line_no) + " of \"" + path +
                        "\": expected agent_id,label,feature_1..feature_p");
    if (feature_count < 0) feature_count = static_cast<int>(fields.size()) - 2;
    if (static_cast<int>(fields.size()) - 2 != feature_count)
      throw ConfigError("line " + std::to_string(line_no) + " of \"" + path +
                        "\": inconsistent feature count");

    const int agent = static_cast<int>(fields[0]) - 1;
    if (agent < 0 || agent >= agents)
      throw ConfigError("line " + std::to_string(line_no) + " of \"" + path + "\": agent_id " +
                        std::to_string(agent + 1) + " outside 1.." + std::to_string(agents));
    LogisticSample s;
    s.label = fields[1];
    s.features = Eigen::Map<const Eigen::VectorXd>(fields.data() + 2, feature_count);
    data[agent].push_back(std::move(s));
  }
  if (feature_count < 1) throw ConfigError("data file \"" + path + "\" holds no samples", "data");
  return data;
}

BuiltExperiment build_experiment(const ExperimentConfig& cfg) {
  CommGraph graph = std::visit(
      [](const auto& spec) -> CommGraph {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, MetropolisGraphSpec>) {
          return CommGraph::metropolis(spec.n, spec.edges);
        } else {
          CommGraph g = CommGraph::from_weights(spec.weights);
          const ValidationReport report = validate_weights(g);
          if (!report.all_pass())
            throw ConfigError("explicit weight matrix failed validation:\n" + report.summary(),
                              "graph.weights");
          return g;
        }
      },
      cfg.graph);

  const int n = graph.size();
  std::vector<LocalObjectivePtr> locals;
  if (const auto* q = std::get_if<QuadraticExplicitSpec>(&cfg.problem)) {
    if (static_cast<int>(q->agents.size()) != n)
      throw ConfigError("problem lists " + std::to_string(q->agents.size()) +
                            " agents but the graph has " + std::to_string(n),
                        "problem.agents");
    locals = make_quadratic_family(q->agents);
  } else if (const auto* qr = std::get_if<QuadraticRandomSpec>(&cfg.problem)) {
    locals = make_quadratic_family(n, qr->dim, qr->seed.value_or(cfg.seed), qr->spectrum_lo,
                                   qr->spectrum_hi);
  } else {
    const auto& l = std::get<LogisticProblemSpec>(cfg.problem);
    auto data = load_logistic_csv(l.data_path, n);
    int p = -1;
    for (const auto& agent_samples : data)
      if (!agent_samples.empty()) p = static_cast<int>(agent_samples.front().features.size());
    if (p < 1) throw ConfigError("logistic data holds no samples", "data");
    locals = make_logistic_family(p, data, l.mu);
  }

  PenaltyProblem problem(std::move(graph), std::move(locals), cfg.lambda);

  StackedVector x0(problem.agents(), problem.dim());
  if (cfg.x0) {
    if (static_cast<int>(cfg.x0->size()) != problem.agents())
      throw ConfigError("x0 lists " + std::to_string(cfg.x0->size()) + " blocks for " +
                            std::to_string(problem.agents()) + " agents",
                        "x0");
    for (int i = 0; i < problem.agents(); ++i) {
      if ((*cfg.x0)[i].size() != problem.dim())
        throw ConfigError("x0 block " + std::to_string(i + 1) + " has dimension " +
                              std::to_string((*cfg.x0)[i].size()) + ", expected " +
                              std::to_string(problem.dim()),
                          "x0");
      x0.block(i) = (*cfg.x0)[i];
    }
  }

  BuiltExperiment built{std::move(problem), AlgoConfig{}, cfg.algorithm, std::move(x0), "fixed"};
  built.algo_config.lambda = cfg.lambda;
  built.algo_config.max_iter = cfg.max_iter;
  built.algo_config.tol = cfg.tol;
  built.algo_config.inner_rounds = cfg.inner_rounds.value_or(1);

  if (cfg.algorithm == Algo::Dgd) {
    built.algo_config.eta = cfg.lambda;  // DGD steps with lambda; recorded for reports
  } else {
    switch (cfg.eta->mode) {
      case EtaMode::Fixed:
        built.algo_config.eta = cfg.eta->value;
        break;
      case EtaMode::AutoSuperlinear:
        built.algo_config.eta = auto_eta_superlinear(built.problem);
        built.eta_mode = "auto-thm1";
        break;
      case EtaMode::AutoLinear:
        built.algo_config.eta =
            auto_eta_linear(built.problem, built.algo_config.inner_rounds, built.x0);
        built.eta_mode = "auto-thm2";
        break;
    }
  }
  built.algo_config.validate(cfg.algorithm);
  return built;
}

}  // namespace doboc
