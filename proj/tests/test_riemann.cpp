#include "doctest.h"
#include "support.hpp"

#include "hyperctl/errors.hpp"
#include "hyperctl/riemann.hpp"

using namespace hyperctl;
using testing::st;

TEST_CASE("equal states give the trivial solution") {
  const FluxModel m = testing::gas();
  const RiemannSolution sol = solve_riemann(m, st(1.1, 0.05), st(1.1, 0.05));
  CHECK(sol.strengths.norm() == 0.0);
  for (const RiemannWave& w : sol.waves) CHECK(w.kind == WaveKind::null);
}

TEST_CASE("forward composition is recovered") {
  const FluxModel m = testing::gas();
  const State ul = st(1, 0);
  const Vector sigma = (Vector(2) << -0.2, 0.1).finished();
  const State ur = compose_waves(m, ul, sigma, 0, 1);
  const RiemannSolution sol = solve_riemann(m, ul, ur);
  CHECK(sol.strengths[0] == doctest::Approx(-0.2).epsilon(1e-8));
  CHECK(sol.strengths[1] == doctest::Approx(0.1).epsilon(1e-8));
  CHECK(sol.residual < 1e-10);
  REQUIRE(sol.waves.size() == 2);
  CHECK(sol.waves[0].kind == WaveKind::shock);
  CHECK(sol.waves[1].kind == WaveKind::rarefaction);
  CHECK(sol.waves[0].speed_left == sol.waves[0].speed_right);
  CHECK(sol.waves[0].speed_right <= sol.waves[1].speed_left);
}

TEST_CASE("random round trips and per-step consistency") {
  const FluxModel m = testing::gas(1.4);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> s(-0.15, 0.15);
  for (int k = 0; k < 100; ++k) {
    const State ul = st(1.0 + 0.1 * s(rng), s(rng));
    const Vector sigma = (Vector(2) << s(rng), s(rng)).finished();
    const RiemannSolution sol = solve_riemann(m, ul, compose_waves(m, ul, sigma, 0, 1));
    CHECK((sol.strengths - sigma).cwiseAbs().maxCoeff() < 1e-8);
    for (int i = 0; i < 2; ++i) {
      const State step = lax_curve(m, sol.states[i], i, sol.strengths[i]).state;
      CHECK((step - sol.states[i + 1]).norm() < 1e-10);
    }
  }
}

TEST_CASE("linear model strengths are the left-eigenvector projection") {
  Matrix a(2, 2);
  a << 0.0, 1.0, 2.0, 1.0;
  const FluxModel m = FluxModel::linear(a, st(0, 0));
  const State ul = st(0.3, -0.7);
  const State ur = st(-1.1, 0.4);
  const RiemannSolution sol = solve_riemann(m, ul, ur, {.radius = 10.0});
  const Vector expected = m.eigen(ul).left * (ur - ul);
  CHECK((sol.strengths - expected).norm() < 1e-14);
  CHECK(sol.waves[0].kind == WaveKind::contact);
}

TEST_CASE("jumps beyond the solvable radius are refused") {
  const FluxModel m = testing::gas();
  CHECK_THROWS_AS(solve_riemann(m, st(1, 0), st(1.8, 0.4)), DivergenceError);
}

TEST_CASE("split of a pair with itself is trivial") {
  const FluxModel m = testing::gas();
  const SplitResult r = split_boundary_pair(m, st(1.05, 0.02), st(1.05, 0.02));
  CHECK((r.state - st(1.05, 0.02)).norm() < 1e-14);
  CHECK(r.strengths.norm() < 1e-14);
}

TEST_CASE("forward split recomposes from both sides") {
  const FluxModel m = testing::gas();
  const State v = st(1, 0);
  const State vp = st(1.02, 0.01);
  const SplitResult r = split_boundary_pair(m, v, vp);
  CHECK(r.residual < 1e-10);
  // v side: only family 1 (p = 1); v' side: only family 2.
  const State from_v = lax_curve(m, v, 0, r.strengths[0]).state;
  const State from_vp = lax_curve(m, vp, 1, r.strengths[1]).state;
  CHECK((from_v - r.state).norm() < 1e-10);
  CHECK((from_vp - r.state).norm() < 1e-10);
}

TEST_CASE("reverse split recomposes both equations") {
  const FluxModel m = testing::gas();
  const State w = st(1.01, -0.02);
  const State u_star = st(1, 0);
  const SplitResult r = split_boundary_pair_reverse(m, w, u_star);
  CHECK(r.residual < 1e-10);
  Vector s2 = Vector::Zero(2);
  s2[1] = r.strengths[1];
  Vector s1 = Vector::Zero(2);
  s1[0] = r.strengths[0];
  CHECK((compose_waves(m, r.state, s2, 1, 1) - w).norm() < 1e-10);
  CHECK((compose_waves(m, r.state, s1, 0, 0) - u_star).norm() < 1e-10);
}

TEST_CASE("reverse split at the fixed point") {
  const FluxModel m = testing::gas();
  const SplitResult r = split_boundary_pair_reverse(m, st(1, 0), st(1, 0));
  CHECK((r.state - st(1, 0)).norm() < 1e-14);
}

TEST_CASE("splits beyond the radius diverge") {
  const FluxModel m = testing::gas();
  CHECK_THROWS_AS(split_boundary_pair(m, st(1, 0), st(2.0, 0.5)), DivergenceError);
  CHECK_THROWS_AS(split_boundary_pair_reverse(m, st(2.0, 0.5), st(1, 0)), DivergenceError);
}
