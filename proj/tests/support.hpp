#pragma once

#include "hyperctl/flux_models.hpp"
#include "hyperctl/profile.hpp"

#include <random>

namespace testing {

using hyperctl::State;

inline State st(double a, double b) { return (State(2) << a, b).finished(); }

inline hyperctl::FluxModel gas(double gamma = 2.0, State u_star = st(1.0, 0.0)) {
  return hyperctl::FluxModel::gas(1.0, gamma, u_star);
}

inline hyperctl::Box gas_box(const State& u_star = st(1.0, 0.0)) {
  return {st(0.8 * u_star[0], u_star[1] - 0.15), st(1.2 * u_star[0], u_star[1] + 0.15)};
}

// Sound speed of the gas model with K = 1: c^2 = K^2 rho^(gamma-1).
inline double sound_speed(double rho, double gamma) { return std::pow(rho, 0.5 * (gamma - 1.0)); }

// Central-difference Jacobian, independent of the model's own Jacobian.
inline hyperctl::Matrix fd_jacobian(const hyperctl::FluxModel& m, const State& u, double h = 1e-6) {
  hyperctl::Matrix j(u.size(), u.size());
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    State p = u;
    State q = u;
    p[k] += h;
    q[k] -= h;
    j.col(k) = (m.flux(p) - m.flux(q)) / (2.0 * h);
  }
  return j;
}

}  // namespace testing
