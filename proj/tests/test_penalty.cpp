#include <doctest.h>

#include "doboc/dense.hpp"
#include "doboc/penalty.hpp"
#include "doboc/rng.hpp"
#include "doboc/verify.hpp"
#include "oracles.hpp"

using namespace doboc;

namespace {

StackedVector pair_point(double x1, double x2) {
  StackedVector x(2, 1);
  x.block(0)[0] = x1;
  x.block(1)[0] = x2;
  return x;
}

}  // namespace

TEST_SUITE("penalty") {
  TEST_CASE("value on the two-agent fixture") {
    const auto fx = verify::two_agent_quadratic();
    const PenaltyProblem& prob = fx.problem();
    // h = 0 + 1/2, penalty = 1/2 * x^T (I-Z) x = 1/4
    CHECK(prob.value(pair_point(1.0, 0.0)) == 0.75);
    CHECK(prob.value(pair_point(0.0, 0.0)) == 1.0);
  }

  TEST_CASE("the penalty term vanishes exactly at consensus") {
    for (const auto& fx : verify::standard_fixtures()) {
      const auto result = verify::check_consensus_annihilation(fx, 5, 77);
      INFO(result.detail);
      CHECK(result.pass);
    }
  }

  TEST_CASE("gradient on the two-agent fixture") {
    const auto fx = verify::two_agent_quadratic();
    const PenaltyProblem& prob = fx.problem();
    const StackedVector g0 = prob.gradient(pair_point(0.0, 0.0));
    CHECK(g0.block(0)[0] == -1.0);
    CHECK(g0.block(1)[0] == 1.0);
    const StackedVector g1 = prob.gradient(pair_point(1.0, 0.0));
    CHECK(g1.block(0)[0] == 0.5);
    CHECK(g1.block(1)[0] == 0.5);
    const StackedVector gstar = prob.gradient(pair_point(0.5, -0.5));
    CHECK(gstar.flat().norm() == 0.0);
  }

  TEST_CASE("hessian_vec on the two-agent fixture") {
    const auto fx = verify::two_agent_quadratic();
    const PenaltyProblem& prob = fx.problem();
    const StackedVector x = pair_point(0.3, -0.9);  // any point: the Hessian is constant

    StackedVector ones = pair_point(1.0, 1.0);
    const StackedVector h_ones = prob.hessian_vec(x, ones);
    CHECK(h_ones.block(0)[0] == 1.0);
    CHECK(h_ones.block(1)[0] == 1.0);

    StackedVector alt = pair_point(1.0, -1.0);
    const StackedVector h_alt = prob.hessian_vec(x, alt);
    CHECK(h_alt.block(0)[0] == 2.0);
    CHECK(h_alt.block(1)[0] == -2.0);

    CHECK(prob.hessian_vec(x, pair_point(0.0, 0.0)).flat().norm() == 0.0);
  }

  TEST_CASE("dimension mismatches are rejected") {
    const auto fx = verify::two_agent_quadratic();
    const PenaltyProblem& prob = fx.problem();
    CHECK_THROWS_AS((void)prob.value(StackedVector(3, 1)), DimensionError);
    CHECK_THROWS_AS((void)prob.gradient(StackedVector(2, 2)), DimensionError);
    CHECK_THROWS_AS((void)prob.hessian_vec(pair_point(0, 0), StackedVector(3, 1)), DimensionError);
  }

  TEST_CASE("lambda and shape guards at construction") {
    CommGraph g = CommGraph::metropolis(2, {{0, 1}});
    std::vector<QuadraticSpec> specs(2);
    for (auto& s : specs) {
      s.a = Eigen::MatrixXd::Identity(1, 1);
      s.b = Eigen::VectorXd::Zero(1);
    }
    auto locals = make_quadratic_family(specs);
    CHECK_THROWS_AS(PenaltyProblem(g, locals, 0.0), ObjectiveError);
    auto one = locals;
    one.pop_back();
    CHECK_THROWS_AS(PenaltyProblem(g, one, 1.0), DimensionError);
  }

  TEST_CASE("gradient and hessian_vec match finite differences on every fixture") {
    Rng rng(61);
    for (const auto& fx : verify::standard_fixtures()) {
      const PenaltyProblem& prob = fx.problem();
      for (int t = 0; t < 10; ++t) {
        StackedVector x(prob.agents(), prob.dim());
        x.flat() = rng.normal_vector(static_cast<int>(x.size()));
        const Eigen::VectorXd g = prob.gradient(x).flat();
        CHECK((g - testing::fd_gradient(prob, x)).norm() / std::max(1.0, g.norm()) <= 1e-6);

        StackedVector v(prob.agents(), prob.dim());
        v.flat() = rng.normal_vector(static_cast<int>(v.size()));
        const Eigen::VectorXd hv = prob.hessian_vec(x, v).flat();
        CHECK((hv - testing::fd_hessian_vec(prob, x, v)).norm() / std::max(1.0, hv.norm()) <= 1e-5);
      }
    }
  }

  TEST_CASE("hessian_vec is a symmetric operator") {
    Rng rng(67);
    for (const auto& fx : verify::standard_fixtures()) {
      const PenaltyProblem& prob = fx.problem();
      for (int t = 0; t < 5; ++t) {
        StackedVector x(prob.agents(), prob.dim()), v(prob.agents(), prob.dim()),
            w(prob.agents(), prob.dim());
        x.flat() = rng.normal_vector(static_cast<int>(x.size()));
        v.flat() = rng.normal_vector(static_cast<int>(v.size()));
        w.flat() = rng.normal_vector(static_cast<int>(w.size()));
        const double vhw = v.flat().dot(prob.hessian_vec(x, w).flat());
        const double whv = w.flat().dot(prob.hessian_vec(x, v).flat());
        CHECK(vhw == doctest::Approx(whv).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("penalty Hessian eigenvalues stay inside [m, a]") {
    for (const auto& fx : verify::standard_fixtures()) {
      const auto result = verify::check_spectral_sandwich(fx, 10, 71);
      INFO(result.detail);
      CHECK(result.pass);
    }
  }

  TEST_CASE("strong convexity and smoothness envelopes hold on random pairs") {
    for (const auto& fx : verify::standard_fixtures()) {
      const auto result = verify::check_convexity_envelopes(fx, 20, 73);
      INFO(result.detail);
      CHECK(result.pass);
    }
  }

  TEST_CASE("hessian_vec agrees with the dense materialization") {
    Rng rng(79);
    const auto fx = verify::ring5_quadratic();
    const PenaltyProblem& prob = fx.problem();
    StackedVector x(prob.agents(), prob.dim()), v(prob.agents(), prob.dim());
    x.flat() = rng.normal_vector(static_cast<int>(x.size()));
    v.flat() = rng.normal_vector(static_cast<int>(v.size()));
    const Eigen::MatrixXd h = dense_penalty_hessian(prob, x);
    CHECK((prob.hessian_vec(x, v).flat() - h * v.flat()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}
