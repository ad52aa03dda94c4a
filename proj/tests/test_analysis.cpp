#include "doctest.h"
#include "support.hpp"

#include "hyperctl/analysis.hpp"
#include "hyperctl/errors.hpp"
#include "hyperctl/wave_curves.hpp"

using namespace hyperctl;
using testing::st;

TEST_CASE("density bins carry the rarefaction mass") {
  const FluxModel m = testing::gas();
  const Profile p = rarefaction_initial_data(m, {0, 1}, 6, 0.06, {0.2, 0.8}, st(1, 0), 0);
  Simulation sim(m, {0, 1}, p, {.epsilon = 0.004});
  const DensityReport r = positive_wave_density(m, sim.snapshot(), 0, 16, {0, 1});
  double mass = 0.0;
  for (double d : r.density) mass += d / 16.0;
  CHECK(mass == doctest::Approx(0.06).epsilon(1e-9));
  CHECK(r.kappa_hat == 0.0);  // t = 0
  const DensityReport none = positive_wave_density(m, sim.snapshot(), 1, 16, {0, 1});
  CHECK(none.max_density == 0.0);
}

TEST_CASE("shocks-only data carries no positive waves") {
  const FluxModel m = testing::gas();
  const Profile p = dense_shock_initial_data(m, {0, 3}, 31, 0.05, {2.5, 2.53}, st(1, 0), 0);
  Simulation sim(m, {0, 3}, p);
  sim.advance_to(1.0);
  const DensityReport r = positive_wave_density(m, sim.snapshot(), 0, 64, {0.1, 2.9});
  CHECK(r.kappa_hat <= 1e-6);
}

TEST_CASE("census counts the initial shocks") {
  const FluxModel m = testing::gas();
  const Profile p = dense_shock_initial_data(m, {0, 1}, 7, 0.02, {0.2, 0.8}, st(1, 0), 0);
  Simulation sim(m, {0, 1}, p);
  const auto c = shock_census(sim, {0.0}, {0, 1}, 1e-6);
  REQUIRE(c.size() == 1);
  CHECK(c[0].shocks[0].size() == 7);
  CHECK(c[0].shocks[1].empty());
  CHECK(c[0].creations.empty());
  CHECK(c[0].largest_gap[0] > 0.0);
}

TEST_CASE("dyadic shock strengths halve with the level") {
  const FluxModel m = testing::gas();
  const Profile p = dense_shock_initial_data(m, {0, 1}, 7, 0.07, {0.0, 1.0}, st(1, 0), 0);
  // Level 0 has one jump of weight 1, level 1 two of weight 1/2, level 2 four of 1/4.
  std::vector<double> sizes;
  for (std::size_t k = 1; k < p.values.size(); ++k) {
    sizes.push_back(std::abs(m.to_riemann(p.values[k])[0] - m.to_riemann(p.values[k - 1])[0]));
  }
  std::sort(sizes.begin(), sizes.end());
  CHECK(sizes.back() == doctest::Approx(0.07 / 3.0).epsilon(1e-9));
  CHECK(sizes.front() == doctest::Approx(0.07 / 12.0).epsilon(1e-9));
}

TEST_CASE("backward characteristics of the linear model are straight") {
  Matrix a(2, 2);
  a << -1.0, 0.0, 0.0, 0.5;
  const FluxModel m = FluxModel::linear(a, st(0, 0));
  Profile p{{0, 1}, {0.5}, {st(0, 0), st(1, 1)}};
  TrackingOptions opts;
  opts.riemann.radius = 10.0;
  Simulation sim(m, {0, 1}, p, opts);
  sim.advance_to(0.5);
  const CharacteristicPath c = backward_characteristic(sim, 1, 0.5, 0.6);
  CHECK_FALSE(c.exited);
  CHECK(c.position_at(0.0) == doctest::Approx(0.35).epsilon(1e-12));
  const CharacteristicPath e = backward_characteristic(sim, 1, 0.5, 0.1);
  CHECK(e.exited);
  CHECK(e.exit_point.position == doctest::Approx(0.0));
  CHECK(e.exit_point.time == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("same-family backward characteristics do not cross") {
  const FluxModel m = testing::gas();
  Profile p{{0, 1}, {0.3, 0.5, 0.7}, {st(1.0, 0.0), st(1.04, 0.03), st(0.98, -0.02), st(1.02, 0.01)}};
  Simulation sim(m, {0, 1}, p, {.epsilon = 0.005});
  sim.advance_to(0.3);
  for (int family = 0; family < 2; ++family) {
    const SpreadReport s = characteristic_spread(sim, family, 0.3, 0.4, 0.6, 16);
    for (double r : s.ratios) CHECK(r > 0.0);
    CHECK(std::isfinite(s.max_ratio));
  }
}

TEST_CASE("strongest lineage and persistence of a lone shock") {
  const FluxModel m = testing::gas();
  const State u0 = st(1, 0);
  Profile p{{0, 1}, {0.8}, {u0, shock_curve(m, u0, 0, -0.03).state}};
  Simulation sim(m, {0, 1}, p);
  sim.advance_to(0.5);
  const auto id = strongest_lineage(sim, 0, 0.0);
  REQUIRE(id.has_value());
  const ShockTrack t = track_shock_strength(sim, *id, 0.0, 0.5);
  CHECK(t.min_ratio == doctest::Approx(1.0));
  CHECK(t.end == LineageEnd::alive);
}

TEST_CASE("Glimm constant calibration is reproducible and positive") {
  const FluxModel m = testing::gas();
  const double a = calibrate_glimm_constant(m, st(1, 0), 0.1, 50, 9);
  const double b = calibrate_glimm_constant(m, st(1, 0), 0.1, 50, 9);
  CHECK(a == b);
  CHECK(a > 0.0);
}

TEST_CASE("rarefaction-only data has no compressive pairs at t = 0") {
  const FluxModel m = testing::gas();
  const Profile p = rarefaction_initial_data(m, {0, 1}, 5, 0.05, {0.2, 0.8}, st(1, 0), 0);
  Simulation sim(m, {0, 1}, p);
  CHECK(count_compressive_pairs(sim.snapshot()) == 0);
}
