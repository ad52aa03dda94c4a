#include "doctest.h"
#include "support.hpp"

#include "hyperctl/errors.hpp"
#include "hyperctl/wave_curves.hpp"

#include <cmath>

using namespace hyperctl;
using testing::st;

namespace {

// Slope of log y against log x by least squares.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double a = std::log(x[k]);
    const double b = std::log(y[k]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// c_i(0) from a cubic fit of the other Riemann coordinate along the shock
// curve: w_j(S_i(sigma)) - w_j(u0) = c g^3 sigma^3 / 6 (grad w_j . r_j) + ...
// with g = d lambda_i / d sigma along the rarefaction curve.
double cubic_fit_coefficient(const FluxModel& m, const State& u0, int i) {
  const int j = 1 - i;
  const double h = 1e-4;
  const double g = (m.eigenvalues(rarefaction_curve(m, u0, i, h).state)[i] -
                    m.eigenvalues(rarefaction_curve(m, u0, i, -h).state)[i]) /
                   (2 * h);
  const Vector rj = m.eigen(u0).r(j);
  const double dw = (m.to_riemann(u0 + h * rj)[j] - m.to_riemann(u0 - h * rj)[j]) / (2 * h);
  Matrix a(16, 3);
  Vector y(16);
  for (int k = 0; k < 16; ++k) {
    const double s = (k < 8 ? -1.0 : 1.0) * (0.01 + 0.01 * (k % 8));
    y[k] = m.to_riemann(shock_curve(m, u0, i, s).state)[j] - m.to_riemann(u0)[j];
    a(k, 0) = s * s * s;
    a(k, 1) = s * s * s * s;
    a(k, 2) = std::pow(s, 5);
  }
  const Vector c = a.colPivHouseholderQr().solve(y);
  return 6.0 * c[0] / (g * g * g * dw);
}

}  // namespace

TEST_CASE("zero strength returns the base state") {
  const FluxModel m = testing::gas();
  const State u0 = st(1.0, 0.0);
  for (int i = 0; i < 2; ++i) {
    CHECK((rarefaction_curve(m, u0, i, 0.0).state - u0).norm() == 0.0);
    CHECK((shock_curve(m, u0, i, 0.0).state - u0).norm() < 1e-15);
  }
}

TEST_CASE("rarefaction curve moves w_i by sigma and keeps w_j") {
  const FluxModel m = testing::gas();
  const State u0 = st(1.02, -0.03);
  for (int i = 0; i < 2; ++i) {
    const CurvePoint p = rarefaction_curve(m, u0, i, 0.07);
    const Vector dw = m.to_riemann(p.state) - m.to_riemann(u0);
    CHECK(dw[i] == doctest::Approx(0.07).epsilon(1e-12));
    CHECK(std::abs(dw[1 - i]) < 1e-14);
    CHECK(p.speed == doctest::Approx(m.eigenvalues(p.state)[i]));
  }
}

TEST_CASE("ODE integration converges to the chart under tolerance refinement") {
  const FluxModel m = testing::gas(1.4);
  const State u0 = st(0.95, 0.05);
  for (int i = 0; i < 2; ++i) {
    const State exact = rarefaction_curve(m, u0, i, 0.15).state;
    const double coarse = (integrate_rarefaction(m, u0, i, 0.15, 1e-6) - exact).norm();
    const double fine = (integrate_rarefaction(m, u0, i, 0.15, 1e-10) - exact).norm();
    CHECK(fine < 1e-9);
    CHECK(fine <= coarse);
  }
}

TEST_CASE("shock curve satisfies Rankine-Hugoniot and Lax") {
  const FluxModel m = testing::gas();
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> rho(0.85, 1.15);
  std::uniform_real_distribution<double> vel(-0.1, 0.1);
  std::uniform_real_distribution<double> sig(-0.2, -0.001);
  for (int k = 0; k < 50; ++k) {
    const State u0 = st(rho(rng), vel(rng));
    for (int i = 0; i < 2; ++i) {
      const double s = sig(rng);
      const CurvePoint p = shock_curve(m, u0, i, s);
      CHECK(rankine_hugoniot_residual(m, u0, p.state, p.speed) < 1e-10);
      const double margin = 1e-3 * std::abs(s);
      CHECK(m.eigenvalues(u0)[i] > p.speed + margin);
      CHECK(p.speed > m.eigenvalues(p.state)[i] + margin);
    }
  }
}

TEST_CASE("lax curve picks the branch by sign") {
  const FluxModel m = testing::gas();
  const State u0 = st(1, 0);
  CHECK((lax_curve(m, u0, 0, 0.1).state - rarefaction_curve(m, u0, 0, 0.1).state).norm() == 0.0);
  CHECK((lax_curve(m, u0, 0, -0.1).state - shock_curve(m, u0, 0, -0.1).state).norm() == 0.0);
}

TEST_CASE("shock and rarefaction curves have second-order contact") {
  const FluxModel m = testing::gas();
  const State u0 = st(1.0, 0.0);
  for (int i = 0; i < 2; ++i) {
    std::vector<double> sigmas;
    std::vector<double> gaps;
    for (double s = 0.16; s > 0.009; s /= 2) {
      sigmas.push_back(s);
      gaps.push_back((shock_curve(m, u0, i, -s).state - rarefaction_curve(m, u0, i, -s).state).norm());
    }
    CHECK(loglog_slope(sigmas, gaps) >= 2.7);
  }
}

TEST_CASE("shock curve beyond the curve radius diverges") {
  const FluxModel m = testing::gas().with_curve_radius(0.1);
  CHECK_THROWS_AS(shock_curve(m, st(1, 0), 0, -0.5), DivergenceError);
}

TEST_CASE("linear model curves are straight lines along r_i") {
  Matrix a(2, 2);
  a << -1.0, 0.0, 0.0, 2.0;
  const FluxModel m = FluxModel::linear(a, st(0, 0));
  const State u0 = st(0.2, 0.1);
  const CurvePoint s = shock_curve(m, u0, 1, -0.3);
  CHECK(s.speed == doctest::Approx(2.0));
  CHECK(std::abs((s.state - u0)[0]) < 1e-14);
}

TEST_CASE("deviation coefficient at the reference state is -1/18 for gamma = 2") {
  const FluxModel m = testing::gas();
  CHECK(shock_deviation_coefficient(m, st(1, 0), 0) == doctest::Approx(-1.0 / 18.0).epsilon(1e-6));
  CHECK(shock_deviation_coefficient(m, st(1, 0), 1) == doctest::Approx(-1.0 / 18.0).epsilon(1e-6));
}

TEST_CASE("deviation coefficient matches the cubic-fit oracle and is negative") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> rho(0.85, 1.15);
  std::uniform_real_distribution<double> vel(-0.1, 0.1);
  for (double gamma : {1.4, 2.0}) {
    const FluxModel m = testing::gas(gamma);
    for (int k = 0; k < 5; ++k) {
      const State u = st(rho(rng), vel(rng));
      for (int i = 0; i < 2; ++i) {
        const double c = shock_deviation_coefficient(m, u, i);
        const double oracle = cubic_fit_coefficient(m, u, i);
        CHECK(c < 0.0);
        CHECK(std::abs(c - oracle) <= 0.05 * std::abs(oracle));
      }
    }
  }
}
