#include "hyperctl/riemann.hpp"

#include "hyperctl/errors.hpp"

#include <cmath>
#include <string>

namespace hyperctl {

const char* to_string(WaveKind kind) {
  switch (kind) {
    case WaveKind::shock: return "shock";
    case WaveKind::rarefaction: return "rarefaction";
    case WaveKind::contact: return "contact";
    case WaveKind::null: return "null";
  }
  return "null";
}

State compose_waves(const FluxModel& model, const State& u0, const Vector& sigma, int first, int last,
                    const CurveOptions& options) {
  State u = u0;
  for (int i = first; i <= last; ++i) {
    if (sigma[i] != 0.0) u = lax_curve(model, u, i, sigma[i], options).state;
  }
  return u;
}

std::vector<State> compose_states(const FluxModel& model, const State& u0, const Vector& sigma,
                                  const CurveOptions& options) {
  std::vector<State> states{u0};
  for (int i = 0; i < model.size(); ++i) {
    states.push_back(sigma[i] == 0.0 ? states.back() : lax_curve(model, states.back(), i, sigma[i], options).state);
  }
  return states;
}

double jump_size(const FluxModel& model, const State& ul, const State& ur) {
  if (model.has_riemann_chart()) return (model.to_riemann(ur) - model.to_riemann(ul)).cwiseAbs().maxCoeff();
  return (ur - ul).cwiseAbs().maxCoeff();
}

namespace {

// First-order wave decomposition of ur - ul.
Vector linear_guess(const FluxModel& model, const State& ul, const State& ur) {
  if (model.has_riemann_chart()) return model.to_riemann(ur) - model.to_riemann(ul);
  return model.eigen(ul).left * (ur - ul);
}

void check_radius(const FluxModel& model, const State& x, const State& y, double radius, const char* what) {
  const double size = jump_size(model, x, y);
  if (!(size <= radius)) {
    throw DivergenceError(std::string(what) + ": jump " + fmt_num(size) + " exceeds the solvable radius " +
                          fmt_num(radius));
  }
}

}  // namespace

RiemannSolution solve_riemann(const FluxModel& model, const State& ul, const State& ur,
                              const RiemannOptions& options) {
  model.require_admissible(ul);
  model.require_admissible(ur);
  check_radius(model, ul, ur, options.radius, "riemann");
  const int n = model.size();

  RiemannSolution sol;
  if (ul == ur) {
    sol.strengths = Vector::Zero(n);
  } else if (model.kind() == ModelKind::linear) {
    sol.strengths = model.eigen(ul).left * (ur - ul);
  } else {
    auto residual = [&](const Vector& sigma) -> Vector {
      return compose_waves(model, ul, sigma, 0, n - 1, options.curves) - ur;
    };
    sol.strengths = newton_solve(residual, linear_guess(model, ul, ur), options.newton).x;
  }

  for (int i = 0; i < n; ++i) {
    if (std::abs(sol.strengths[i]) < options.null_threshold) sol.strengths[i] = 0.0;
  }
  sol.states = compose_states(model, ul, sol.strengths, options.curves);
  sol.residual = (sol.states.back() - ur).norm();
  sol.states.back() = ur;

  for (int i = 0; i < n; ++i) {
    RiemannWave wave;
    wave.family = i;
    wave.sigma = sol.strengths[i];
    const State& left = sol.states[static_cast<std::size_t>(i)];
    const State& right = sol.states[static_cast<std::size_t>(i) + 1];
    const double lambda_left = model.eigenvalues(left)[i];
    if (wave.sigma == 0.0) {
      wave.kind = WaveKind::null;
      wave.speed_left = wave.speed_right = lambda_left;
    } else if (model.field_kind(i) == FieldKind::linearly_degenerate) {
      wave.kind = WaveKind::contact;
      wave.speed_left = wave.speed_right = lambda_left;
    } else if (wave.sigma < 0.0) {
      wave.kind = WaveKind::shock;
      wave.speed_left = wave.speed_right = shock_curve(model, left, i, wave.sigma, options.curves).speed;
    } else {
      wave.kind = WaveKind::rarefaction;
      wave.speed_left = lambda_left;
      wave.speed_right = model.eigenvalues(right)[i];
    }
    sol.waves.push_back(wave);
  }
  return sol;
}

SplitResult split_boundary_pair(const FluxModel& model, const State& v, const State& v_prime,
                                const RiemannOptions& options) {
  model.require_admissible(v);
  model.require_admissible(v_prime);
  check_radius(model, v, v_prime, options.radius, "split");
  const int n = model.size();
  const int p = model.negative_families();

  SplitResult out;
  Vector d = linear_guess(model, v, v_prime);
  Vector sigma(n);
  for (int i = 0; i < n; ++i) sigma[i] = i < p ? d[i] : -d[i];
  if (v != v_prime) {
    auto residual = [&](const Vector& s) -> Vector {
      return compose_waves(model, v_prime, s, p, n - 1, options.curves) -
             compose_waves(model, v, s, 0, p - 1, options.curves);
    };
    sigma = newton_solve(residual, sigma, options.newton).x;
  } else {
    sigma.setZero();
  }
  for (int i = 0; i < n; ++i) {
    if (std::abs(sigma[i]) < options.null_threshold) sigma[i] = 0.0;
  }
  out.strengths = sigma;
  out.state = compose_waves(model, v, sigma, 0, p - 1, options.curves);
  out.residual = (compose_waves(model, v_prime, sigma, p, n - 1, options.curves) - out.state).norm();
  return out;
}

SplitResult split_boundary_pair_reverse(const FluxModel& model, const State& w, const State& u_star,
                                        const RiemannOptions& options) {
  model.require_admissible(w);
  model.require_admissible(u_star);
  check_radius(model, w, u_star, options.radius, "reverse split");
  const int n = model.size();
  const int p = model.negative_families();

  SplitResult out;
  if (w == u_star) {
    out.state = u_star;
    out.strengths = Vector::Zero(n);
    return out;
  }
  const Vector d = linear_guess(model, u_star, w);
  const Matrix r = model.eigen(u_star).right;
  Vector x(2 * n);
  x.head(n) = u_star;
  for (int i = 0; i < n; ++i) {
    if (i < p) {
      x[n + i] = -d[i];
      x.head(n) += r.col(i) * d[i];
    } else {
      x[n + i] = d[i];
    }
  }
  auto residual = [&](const Vector& z) -> Vector {
    const State base = z.head(n);
    const Vector s = z.tail(n);
    Vector f(2 * n);
    f.head(n) = compose_waves(model, base, s, p, n - 1, options.curves) - w;
    f.tail(n) = compose_waves(model, base, s, 0, p - 1, options.curves) - u_star;
    return f;
  };
  const NewtonResult solved = newton_solve(residual, x, options.newton);
  out.state = solved.x.head(n);
  out.strengths = solved.x.tail(n);
  for (int i = 0; i < n; ++i) {
    if (std::abs(out.strengths[i]) < options.null_threshold) out.strengths[i] = 0.0;
  }
  out.residual = residual((Vector(2 * n) << out.state, out.strengths).finished()).norm();
  return out;
}

}  // namespace hyperctl
