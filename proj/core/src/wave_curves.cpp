#include "hyperctl/wave_curves.hpp"

#include "hyperctl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hyperctl {

namespace {

void check_family(const FluxModel& model, int i) {
  if (i < 0 || i >= model.size()) throw ContractViolation("family index " + std::to_string(i) + " out of range");
}

void check_radius(const FluxModel& model, double sigma) {
  if (!std::isfinite(sigma) || std::abs(sigma) > model.curve_radius()) {
    throw DivergenceError("wave strength " + fmt_num(sigma) + " beyond the curve radius " +
                          fmt_num(model.curve_radius()));
  }
}

}  // namespace

State integrate_rarefaction(const FluxModel& model, const State& u0, int i, double sigma, double tolerance) {
  check_family(model, i);
  model.require_admissible(u0);
  if (sigma == 0.0) return u0;

  // Dormand-Prince 5(4) coefficients.
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  (void)c2;
  (void)c3;
  (void)c4;
  (void)c5;

  auto rhs = [&](const State& u) -> Vector { return model.eigen(u).r(i); };

  const double direction = sigma > 0.0 ? 1.0 : -1.0;
  const double length = std::abs(sigma);
  double s = 0.0;
  double h = std::min(length, 0.05);
  State u = u0;
  Vector k1 = rhs(u);
  for (int steps = 0; s < length; ++steps) {
    if (steps > 200000) throw DivergenceError("rarefaction integration: too many steps");
    h = std::min(h, length - s);
    const double hd = h * direction;
    Vector k2, k3, k4, k5, k6, k7;
    State next;
    bool ok = true;
    try {
      k2 = rhs(u + hd * (a21 * k1));
      k3 = rhs(u + hd * (a31 * k1 + a32 * k2));
      k4 = rhs(u + hd * (a41 * k1 + a42 * k2 + a43 * k3));
      k5 = rhs(u + hd * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      k6 = rhs(u + hd * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      next = u + hd * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      k7 = rhs(next);
    } catch (const DomainError&) {
      ok = false;
    }
    if (!ok) {
      if (h < 1e-12) throw DomainError("rarefaction curve leaves the domain");
      h *= 0.25;
      continue;
    }
    const Vector err = hd * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double ratio = 0.0;
    for (Eigen::Index k = 0; k < u.size(); ++k) {
      const double scale = tolerance * (1.0 + std::max(std::abs(u[k]), std::abs(next[k])));
      ratio = std::max(ratio, std::abs(err[k]) / scale);
    }
    if (ratio <= 1.0) {
      s += h;
      u = next;
      k1 = k7;
    }
    const double factor = ratio == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
    h *= factor;
  }
  model.require_admissible(u);
  return u;
}

CurvePoint rarefaction_curve(const FluxModel& model, const State& u0, int i, double sigma,
                             const CurveOptions& options) {
  check_family(model, i);
  model.require_admissible(u0);
  if (sigma == 0.0) return {u0, model.eigenvalues(u0)[i], 0.0};
  check_radius(model, sigma);
  State u;
  if (model.has_riemann_chart()) {
    Vector w = model.to_riemann(u0);
    w[i] += sigma;
    u = model.from_riemann(w);
    model.require_admissible(u);
  } else {
    u = integrate_rarefaction(model, u0, i, sigma, options.ode_tolerance);
  }
  const double speed = model.eigenvalues(u)[i];
  return {std::move(u), speed, sigma};
}

CurvePoint shock_curve(const FluxModel& model, const State& u0, int i, double sigma, const CurveOptions& options) {
  check_family(model, i);
  model.require_admissible(u0);
  if (sigma == 0.0) return {u0, model.eigenvalues(u0)[i], 0.0};
  check_radius(model, sigma);
  if (model.field_kind(i) == FieldKind::linearly_degenerate) {
    CurvePoint p = rarefaction_curve(model, u0, i, sigma, options);
    p.speed = model.eigenvalues(u0)[i];
    return p;
  }

  const auto n = u0.size();
  const Vector f0 = model.flux(u0);
  const bool chart = model.has_riemann_chart();
  const double w0 = chart ? model.to_riemann(u0)[i] : 0.0;
  const Vector l0 = chart ? Vector() : model.eigen(u0).l(i);

  // Unknowns: direction d with S = u0 + sigma d, and the speed s.
  Vector z(n + 1);
  try {
    const CurvePoint guess = rarefaction_curve(model, u0, i, sigma, options);
    z.head(n) = (guess.state - u0) / sigma;
    z[n] = 0.5 * (model.eigenvalues(u0)[i] + guess.speed);
  } catch (const DomainError&) {
    z.head(n) = model.eigen(u0).r(i);
    z[n] = model.eigenvalues(u0)[i];
  }

  auto residual = [&](const Vector& x, Vector& out) -> bool {
    const State s = u0 + sigma * x.head(n);
    if (!model.admissible(s)) return false;
    out.resize(n + 1);
    out.head(n) = (model.flux(s) - f0) / sigma - x[n] * x.head(n);
    out[n] = chart ? (model.to_riemann(s)[i] - w0) / sigma - 1.0 : l0.dot(x.head(n)) - 1.0;
    return out.allFinite();
  };

  // The divided difference loses digits for tiny sigma; the RH residual
  // sigma * F stays at roundoff level either way.
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + f0.norm() + u0.norm()) / std::abs(sigma);
  const double tolerance = std::max(options.newton_tolerance, noise);

  Vector fz;
  if (!residual(z, fz)) throw DivergenceError("shock curve: initial guess outside the domain");
  for (int iter = 0;; ++iter) {
    if (fz.norm() < tolerance) break;
    if (iter >= options.newton_max_iterations) {
      throw DivergenceError("shock curve: Newton did not converge (sigma = " + fmt_num(sigma) + ")");
    }
    const State s = u0 + sigma * z.head(n);
    Matrix jac = Matrix::Zero(n + 1, n + 1);
    jac.topLeftCorner(n, n) = model.jacobian(s) - z[n] * Matrix::Identity(n, n);
    jac.topRightCorner(n, 1) = -z.head(n);
    jac.bottomLeftCorner(1, n) = (chart ? model.eigen(s).l(i) : l0).transpose();
    const Vector step = jac.partialPivLu().solve(-fz);
    if (!step.allFinite()) throw DivergenceError("shock curve: singular Jacobian");
    double lambda = 1.0;
    Vector trial;
    Vector ft;
    bool accepted = false;
    for (int k = 0; k < 40; ++k) {
      trial = z + lambda * step;
      if (residual(trial, ft) && ft.norm() < fz.norm()) {
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      if (fz.norm() < 50.0 * tolerance) break;
      throw DivergenceError("shock curve: line search failed (sigma = " + fmt_num(sigma) + ")");
    }
    z = trial;
    fz = ft;
  }
  State s = u0 + sigma * z.head(n);
  model.require_admissible(s);
  return {std::move(s), z[n], sigma};
}

CurvePoint lax_curve(const FluxModel& model, const State& u0, int i, double sigma, const CurveOptions& options) {
  if (sigma >= 0.0 || model.field_kind(i) == FieldKind::linearly_degenerate) {
    CurvePoint p = rarefaction_curve(model, u0, i, sigma, options);
    if (model.field_kind(i) == FieldKind::linearly_degenerate) p.speed = model.eigenvalues(u0)[i];
    return p;
  }
  return shock_curve(model, u0, i, sigma, options);
}

double rankine_hugoniot_residual(const FluxModel& model, const State& ul, const State& ur, double speed) {
  return (model.flux(ur) - model.flux(ul) - speed * (ur - ul)).norm();
}

double shock_deviation_coefficient(const FluxModel& model, const State& u0, int i, double fd_step) {
  if (model.size() != 2) throw ContractViolation("shock deviation coefficient is defined for 2x2 models");
  check_family(model, i);
  const int j = 1 - i;
  // r_i rescaled so that lambda_i grows at unit rate along it.
  auto scaled = [&](const State& u) -> Vector {
    return model.eigen(u).r(i) / gnl_coefficient(model, u, i, 0.1 * fd_step);
  };
  const EigenStructure e = model.eigen(u0);
  const Vector r = scaled(u0);
  const Vector dr = (scaled(u0 + fd_step * r) - scaled(u0 - fd_step * r)) / (2.0 * fd_step);
  const double denominator = 2.0 * (e.values[j] - e.values[i]) * wedge(r, e.r(j));
  if (std::abs(denominator) < 1e-12) {
    throw PreconditionError("shock deviation coefficient: eigenvectors nearly parallel");
  }
  return wedge(dr, r) / denominator;
}

}  // namespace hyperctl
