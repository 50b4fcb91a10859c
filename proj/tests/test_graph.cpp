#include <doctest.h>

#include <Eigen/Dense>

#include "doboc/dense.hpp"
#include "doboc/graph.hpp"
#include "doboc/rng.hpp"

using doboc::CommGraph;
using doboc::StackedVector;

TEST_SUITE("graph") {
  TEST_CASE("single agent has weight 1 and no neighbors") {
    const CommGraph g = CommGraph::metropolis(1, {});
    CHECK(g.size() == 1);
    CHECK(g.degree(0) == 0);
    CHECK(g.self_weight(0) == 1.0);
    CHECK(validate_weights(g).all_pass());
  }

  TEST_CASE("two agents split the weight evenly") {
    const CommGraph g = CommGraph::metropolis(2, {{0, 1}});
    CHECK(g.weight(0, 1) == 0.5);
    CHECK(g.weight(1, 0) == 0.5);
    CHECK(g.self_weight(0) == 0.5);
    CHECK(g.self_weight(1) == 0.5);
    CHECK(validate_weights(g).all_pass());
  }

  TEST_CASE("path of three agents gets degree-aware weights") {
    const CommGraph g = CommGraph::metropolis(3, {{0, 1}, {1, 2}});
    CHECK(g.weight(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(g.weight(1, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(g.weight(0, 2) == 0.0);
    CHECK(g.self_weight(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(g.self_weight(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(g.self_weight(2) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    const auto report = validate_weights(g);
    CHECK(report.all_pass());
    CHECK(report.w_min == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }

  TEST_CASE("empty and malformed topologies are rejected") {
    CHECK_THROWS_AS(CommGraph::metropolis(0, {}), doboc::GraphError);
    CHECK_THROWS_AS(CommGraph::metropolis(3, {{0, 0}}), doboc::GraphError);
    CHECK_THROWS_AS(CommGraph::metropolis(3, {{0, 5}}), doboc::GraphError);
    CHECK_THROWS_AS(CommGraph::metropolis(3, {{0, 1}, {1, 0}}), doboc::GraphError);
  }

  TEST_CASE("disconnected graphs are rejected with the component") {
    try {
      CommGraph::metropolis(4, {{0, 1}, {2, 3}});
      FAIL("expected rejection");
    } catch (const doboc::GraphError& e) {
      CHECK(std::string(e.what()).find("{1, 2}") != std::string::npos);
    }
  }

  TEST_CASE("asymmetric explicit weights are reported, not silently accepted") {
    Eigen::MatrixXd w(2, 2);
    w << 0.6, 0.4, 0.5, 0.5;
    const auto report = validate_weights(CommGraph::from_weights(w));
    CHECK_FALSE(report.symmetry.pass);
    CHECK(report.symmetry.max_violation == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(report.row_sums.pass);
    CHECK_FALSE(report.all_pass());
  }

  TEST_CASE("zero self weight is flagged") {
    Eigen::MatrixXd w(2, 2);
    w << 0.0, 1.0, 1.0, 0.0;
    const auto report = validate_weights(CommGraph::from_weights(w));
    CHECK_FALSE(report.self_positive.pass);
    CHECK(report.symmetry.pass);
    CHECK_FALSE(report.all_pass());
  }

  TEST_CASE("mix keeps consensus points fixed") {
    const CommGraph g = CommGraph::metropolis(3, {{0, 1}, {1, 2}});
    StackedVector x(3, 1);
    for (int i = 0; i < 3; ++i) x.block(i)[0] = 3.0;
    const StackedVector out = g.mix(x);
    for (int i = 0; i < 3; ++i) CHECK(out.block(i)[0] == doctest::Approx(3.0).epsilon(1e-15));
  }

  TEST_CASE("mix on the two-agent graph averages") {
    const CommGraph g = CommGraph::metropolis(2, {{0, 1}});
    StackedVector x(2, 1);
    x.block(0)[0] = 1.0;
    const StackedVector out = g.mix(x);
    CHECK(out.block(0)[0] == 0.5);
    CHECK(out.block(1)[0] == 0.5);
  }

  TEST_CASE("mix on a single agent is the identity") {
    const CommGraph g = CommGraph::metropolis(1, {});
    StackedVector x(1, 1);
    x.block(0)[0] = 7.5;
    CHECK(g.mix(x).block(0)[0] == 7.5);
  }

  TEST_CASE("mix rejects block-count mismatches") {
    const CommGraph g = CommGraph::metropolis(2, {{0, 1}});
    CHECK_THROWS_AS((void)g.mix(StackedVector(3, 1)), doboc::DimensionError);
  }

  TEST_CASE("mix is linear and agrees with the dense Kronecker product") {
    doboc::Rng rng(99);
    for (int trial = 0; trial < 8; ++trial) {
      const int n = 2 + trial % 5;
      const int p = 1 + trial % 3;
      std::vector<std::pair<int, int>> edges;
      for (int v = 1; v < n; ++v) edges.emplace_back(v - 1, v);
      if (n > 2 && trial % 2 == 0) edges.emplace_back(0, n - 1);
      const CommGraph g = CommGraph::metropolis(n, edges);

      StackedVector x(n, p), y(n, p);
      x.flat() = rng.normal_vector(n * p);
      y.flat() = rng.normal_vector(n * p);

      const Eigen::MatrixXd z = doboc::dense_mixing_matrix(g, p);
      CHECK((g.mix(x).flat() - z * x.flat()).cwiseAbs().maxCoeff() <= 1e-12);

      StackedVector combo(n, p);
      const double alpha = rng.uniform(-2.0, 2.0), beta = rng.uniform(-2.0, 2.0);
      combo.flat() = alpha * x.flat() + beta * y.flat();
      CHECK((g.mix(combo).flat() - alpha * g.mix(x).flat() - beta * g.mix(y).flat())
                .cwiseAbs()
                .maxCoeff() <= 1e-12);
    }
  }

  TEST_CASE("laplacian is I minus mix and vanishes at consensus") {
    const CommGraph g = CommGraph::metropolis(3, {{0, 1}, {1, 2}});
    doboc::Rng rng(7);
    StackedVector x(3, 2);
    x.flat() = rng.normal_vector(6);
    const StackedVector lap = g.laplacian(x);
    const StackedVector mixed = g.mix(x);
    CHECK((lap.flat() - (x.flat() - mixed.flat())).cwiseAbs().maxCoeff() <= 1e-12);

    StackedVector consensus(3, 2);
    for (int i = 0; i < 3; ++i) consensus.block(i) = x.block(0);
    CHECK(g.laplacian(consensus).flat().cwiseAbs().maxCoeff() == 0.0);
    CHECK(g.disagreement(consensus) == 0.0);
  }

  TEST_CASE("metropolis weights survive a dense round trip") {
    const CommGraph g = CommGraph::metropolis(4, {{0, 1}, {1, 2}, {2, 3}, {0, 2}});
    const CommGraph back = CommGraph::from_weights(doboc::dense_weight_matrix(g));
    CHECK(validate_weights(back).all_pass());
    for (int i = 0; i < 4; ++i) {
      CHECK(back.self_weight(i) == g.self_weight(i));
      for (int j : g.neighbors(i)) CHECK(back.weight(i, j) == g.weight(i, j));
    }
  }

  TEST_CASE("disagreement matches the dense quadratic form") {
    const CommGraph g = CommGraph::metropolis(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
    doboc::Rng rng(13);
    StackedVector x(4, 2);
    x.flat() = rng.normal_vector(8);
    const Eigen::MatrixXd z = doboc::dense_mixing_matrix(g, 2);
    const double dense = x.flat().dot(x.flat() - z * x.flat());
    CHECK(g.disagreement(x) == doctest::Approx(dense).epsilon(1e-12));
    CHECK(g.disagreement(x) >= 0.0);
  }
}
