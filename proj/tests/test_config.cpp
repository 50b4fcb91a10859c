#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "doboc/config.hpp"

using namespace doboc;
using nlohmann::json;

namespace {

json two_agent_config() {
  return json::parse(R"({
    "graph": {"type": "metropolis", "n": 2, "edges": [[1, 2]]},
    "problem": {"type": "quadratic", "agents": [
      {"A": [[1.0]], "b": [-1.0], "c": 0.5},
      {"A": [[1.0]], "b": [1.0], "c": 0.5}]},
    "lambda": 1.0,
    "algorithm": "doboc",
    "eta": 0.5,
    "max_iter": 50,
    "tol": 1e-10,
    "x0": "zeros",
    "seed": 0
  })");
}

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = std::string("/tmp/doboc_test_") + name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("a complete config parses and builds") {
    const ExperimentConfig cfg = parse_experiment(two_agent_config());
    CHECK(cfg.lambda == 1.0);
    CHECK(cfg.algorithm == Algo::Doboc);
    CHECK(cfg.eta->value == 0.5);
    const BuiltExperiment built = build_experiment(cfg);
    CHECK(built.problem.agents() == 2);
    CHECK(built.problem.dim() == 1);
    CHECK(built.algo_config.eta == 0.5);
  }

  TEST_CASE("serialization round-trips semantically") {
    const json original = two_agent_config();
    const ExperimentConfig cfg = parse_experiment(original);
    const json serialized = to_json(cfg);
    const ExperimentConfig cfg2 = parse_experiment(serialized);
    CHECK(to_json(cfg2) == serialized);
  }

  TEST_CASE("unknown keys are rejected at every level") {
    json j = two_agent_config();
    j["surprise"] = 1;
    CHECK_THROWS_AS((void)parse_experiment(j), ConfigError);

    j = two_agent_config();
    j["graph"]["extra"] = true;
    CHECK_THROWS_AS((void)parse_experiment(j), ConfigError);

    j = two_agent_config();
    j["problem"]["alpha"] = 2.0;
    CHECK_THROWS_AS((void)parse_experiment(j), ConfigError);
  }

  TEST_CASE("doboc-k without K is rejected naming the field") {
    json j = two_agent_config();
    j["algorithm"] = "doboc-k";
    try {
      (void)parse_experiment(j);
      FAIL("expected rejection");
    } catch (const ConfigError& e) {
      CHECK(e.field == "K");
      CHECK(std::string(e.what()).find("K") != std::string::npos);
    }
  }

  TEST_CASE("K outside doboc-k is rejected") {
    json j = two_agent_config();
    j["K"] = 3;
    CHECK_THROWS_AS((void)parse_experiment(j), ConfigError);
  }

  TEST_CASE("non-positive lambda and eta are rejected") {
    json j = two_agent_config();
    j["lambda"] = 0.0;
    CHECK_THROWS_AS((void)parse_experiment(j), ConfigError);
    j = two_agent_config();
    j["eta"] = -0.5;
    CHECK_THROWS_AS((void)parse_experiment(j), ConfigError);
  }

  TEST_CASE("eta is required unless the algorithm is dgd") {
    json j = two_agent_config();
    j.erase("eta");
    CHECK_THROWS_AS((void)parse_experiment(j), ConfigError);
    j["algorithm"] = "dgd";
    CHECK_NOTHROW((void)parse_experiment(j));
  }

  TEST_CASE("auto-thm1 resolves to 1/a on the two-agent fixture") {
    json j = two_agent_config();
    j["eta"] = "auto-thm1";
    const BuiltExperiment built = build_experiment(parse_experiment(j));
    CHECK(built.algo_config.eta == 0.5);
    CHECK(built.eta_mode == "auto-thm1");
  }

  TEST_CASE("auto-thm2 applies the 0.99 safety factor") {
    json j = two_agent_config();
    j["eta"] = "auto-thm2";
    j["algorithm"] = "doboc-k";
    j["K"] = 1;
    const BuiltExperiment built = build_experiment(parse_experiment(j));
    CHECK(built.algo_config.eta == doctest::Approx(0.2475).epsilon(1e-15));
  }

  TEST_CASE("explicit x0 must conform") {
    json j = two_agent_config();
    j["x0"] = {{0.1}, {0.2}};
    const BuiltExperiment built = build_experiment(parse_experiment(j));
    CHECK(built.x0.block(0)[0] == 0.1);
    CHECK(built.x0.block(1)[0] == 0.2);

    j["x0"] = {{0.1}};
    CHECK_THROWS_AS((void)build_experiment(parse_experiment(j)), ConfigError);
  }

  TEST_CASE("explicit weight matrices are validated on build") {
    json j = two_agent_config();
    j["graph"] = {{"type", "explicit"}, {"weights", {{0.6, 0.4}, {0.5, 0.5}}}};
    CHECK_THROWS_AS((void)build_experiment(parse_experiment(j)), ConfigError);

    j["graph"] = {{"type", "explicit"}, {"weights", {{0.5, 0.5}, {0.5, 0.5}}}};
    const BuiltExperiment built = build_experiment(parse_experiment(j));
    CHECK(built.problem.graph().weight(0, 1) == 0.5);
  }

  TEST_CASE("seeded quadratic problems come from the experiment seed") {
    json j = two_agent_config();
    j["problem"] = {{"type", "quadratic"}, {"p", 2}, {"spectrum", {1.0, 5.0}}};
    j["seed"] = 42;
    const BuiltExperiment a = build_experiment(parse_experiment(j));
    const BuiltExperiment b = build_experiment(parse_experiment(j));
    CHECK(a.problem.strong_convexity() == b.problem.strong_convexity());
    CHECK(a.problem.dim() == 2);
    CHECK(a.problem.strong_convexity() >= 1.0 - 1e-9);
    CHECK(a.problem.smoothness() <= 5.0 + 1e-9);
  }

  TEST_CASE("logistic CSV loading maps rows to agents") {
    const std::string path = write_temp("logistic.csv",
                                        "agent_id,label,feature_1,feature_2\n"
                                        "1,1,0.5,-0.25\n"
                                        "1,-1,-0.75,0.5\n"
                                        "2,1,0.25,1.0\n");
    const auto data = load_logistic_csv(path, 2);
    REQUIRE(data.size() == 2);
    CHECK(data[0].size() == 2);
    CHECK(data[1].size() == 1);
    CHECK(data[0][0].features[1] == -0.25);
    CHECK(data[1][0].label == 1.0);
    std::remove(path.c_str());
  }

  TEST_CASE("logistic CSV rejects bad agent ids and builds reject bad labels") {
    const std::string bad_agent = write_temp("bad_agent.csv", "5,1,0.5\n");
    CHECK_THROWS_AS((void)load_logistic_csv(bad_agent, 2), ConfigError);
    std::remove(bad_agent.c_str());

    const std::string bad_label = write_temp("bad_label.csv", "1,2,0.5\n1,1,0.25\n");
    const auto data = load_logistic_csv(bad_label, 1);
    CHECK_THROWS_AS((void)make_logistic_family(1, data, 1.0), ObjectiveError);
    std::remove(bad_label.c_str());
  }

  TEST_CASE("malformed JSON carries a parse diagnostic") {
    const std::string path = write_temp("broken.json", "{\"graph\": ");
    try {
      (void)load_experiment(path);
      FAIL("expected rejection");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("JSON") != std::string::npos);
    }
    std::remove(path.c_str());
  }
}
