#include "hyperctl/control.hpp"

#include "hyperctl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hyperctl {

double crossing_time(const FluxModel& model, Interval domain, const Box& box, int grid_per_axis,
                     double speed_floor) {
  const double length = domain.length();
  if (!(length > 0.0)) throw PreconditionError("crossing_time: empty interval");
  const int n = model.size();
  std::vector<int> sign(static_cast<std::size_t>(n), 0);
  double tau = 0.0;
  for (const State& u : box.grid(grid_per_axis)) {
    const Vector lambda = model.eigenvalues(u);
    for (int i = 0; i < n; ++i) {
      const double l = lambda[i];
      if (!(std::abs(l) >= speed_floor)) {
        throw PreconditionError("crossing_time: characteristic speed " + fmt_num(l) + " of family " +
                                std::to_string(i + 1) + " below the floor");
      }
      const int s = l > 0.0 ? 1 : -1;
      auto& ref = sign[static_cast<std::size_t>(i)];
      if (ref == 0) ref = s;
      if (ref != s) {
        throw PreconditionError("crossing_time: family " + std::to_string(i + 1) + " changes direction on the box");
      }
      tau = std::max(tau, length / std::abs(l));
    }
  }
  return tau;
}

LinearControlSolution::LinearControlSolution(Matrix a, Interval domain, double horizon, EigenStructure eigen,
                                             std::vector<ScalarProfile> components)
    : a_(std::move(a)),
      domain_(domain),
      horizon_(horizon),
      eigen_(std::move(eigen)),
      components_(std::move(components)) {}

namespace {

void merge_sorted(std::vector<double>& xs, double tolerance) {
  std::sort(xs.begin(), xs.end());
  std::vector<double> out;
  for (double x : xs) {
    if (out.empty() || x - out.back() > tolerance) out.push_back(x);
  }
  xs = std::move(out);
}

// Scalar profile sampled at cell midpoints between the given cut points.
ScalarProfile sample_scalar(double lo, double hi, std::vector<double> cuts, const std::function<double(double)>& g) {
  std::vector<double> inner;
  for (double c : cuts) {
    if (c > lo && c < hi) inner.push_back(c);
  }
  merge_sorted(inner, 1e-12);
  ScalarProfile s;
  s.left = lo;
  s.right = hi;
  double prev = lo;
  for (std::size_t k = 0; k <= inner.size(); ++k) {
    const double next = k < inner.size() ? inner[k] : hi;
    const double value = g(0.5 * (prev + next));
    if (k > 0 && value == s.values.back()) {
      prev = next;
      continue;
    }
    if (k > 0) s.breakpoints.push_back(prev);
    s.values.push_back(value);
    prev = next;
  }
  return s;
}

}  // namespace

Profile LinearControlSolution::at(double t) const {
  const auto n = static_cast<int>(components_.size());
  std::vector<double> cuts;
  for (int i = 0; i < n; ++i) {
    const auto& c = components_[static_cast<std::size_t>(i)];
    const double shift = eigen_.values[i] * t;
    for (double x : c.breakpoints) {
      const double y = x + shift;
      if (y > domain_.a && y < domain_.b) cuts.push_back(y);
    }
  }
  merge_sorted(cuts, 1e-12);
  Profile p;
  p.domain = domain_;
  double prev = domain_.a;
  for (std::size_t k = 0; k <= cuts.size(); ++k) {
    const double next = k < cuts.size() ? cuts[k] : domain_.b;
    const double mid = 0.5 * (prev + next);
    State u = State::Zero(a_.rows());
    for (int i = 0; i < n; ++i) {
      u += components_[static_cast<std::size_t>(i)].at(mid - eigen_.values[i] * t) * eigen_.r(i);
    }
    if (k > 0 && u == p.values.back()) {
      prev = next;
      continue;
    }
    if (k > 0) p.breakpoints.push_back(prev);
    p.values.push_back(std::move(u));
    prev = next;
  }
  return p;
}

std::vector<BoundarySignal> LinearControlSolution::boundary_data() const {
  std::vector<BoundarySignal> out;
  const auto n = static_cast<int>(components_.size());
  for (int i = 0; i < n; ++i) {
    const double lambda = eigen_.values[i];
    const Side side = lambda < 0.0 ? Side::right : Side::left;
    const double x = side == Side::right ? domain_.b : domain_.a;
    const auto& c = components_[static_cast<std::size_t>(i)];
    std::vector<double> cuts;
    for (double xi : c.breakpoints) cuts.push_back((x - xi) / lambda);
    out.push_back({i, side, sample_scalar(0.0, horizon_, cuts, [&](double t) { return c.at(x - lambda * t); })});
  }
  return out;
}

LinearControlSolution linear_exact_control(const Matrix& a, Interval domain, const Profile& phi, const Profile& psi,
                                           double horizon) {
  const FluxModel model = FluxModel::linear(a, State::Zero(a.rows()));
  const EigenStructure e = model.eigen(State::Zero(a.rows()));
  double tau = 0.0;
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    if (e.values[i] == 0.0) throw PreconditionError("linear control: zero characteristic speed");
    tau = std::max(tau, domain.length() / std::abs(e.values[i]));
  }
  if (horizon < tau * (1.0 - 1e-12)) {
    throw PreconditionError("linear control: horizon " + fmt_num(horizon) + " below the crossing time " +
                            fmt_num(tau));
  }
  phi.validate();
  psi.validate();

  std::vector<ScalarProfile> components;
  for (int i = 0; i < static_cast<int>(e.values.size()); ++i) {
    const double lambda = e.values[i];
    const double shift = lambda * horizon;
    // Initial datum of the i-th scalar transport problem on the whole line.
    auto g = [&, i, shift](double xi) -> double {
      if (xi >= domain.a && xi <= domain.b) return e.l(i).dot(phi.at(xi));
      const double y = xi + shift;
      if (y >= domain.a && y <= domain.b) return e.l(i).dot(psi.at(y));
      return 0.0;
    };
    const double lo = std::min(domain.a, domain.a - shift);
    const double hi = std::max(domain.b, domain.b - shift);
    std::vector<double> cuts{domain.a, domain.b, domain.a - shift, domain.b - shift};
    for (double x : phi.breakpoints) cuts.push_back(x);
    for (double x : psi.breakpoints) cuts.push_back(x - shift);
    components.push_back(sample_scalar(lo, hi, cuts, g));
  }
  return LinearControlSolution(a, domain, horizon, e, std::move(components));
}

std::vector<State> constant_state_chain(const FluxModel& model, const State& from, const State& to, double step) {
  if (!(step > 0.0)) throw ContractViolation("chain step must be positive");
  const bool chart = model.has_riemann_chart();
  const Vector x0 = chart ? model.to_riemann(from) : Vector(from);
  const Vector x1 = chart ? model.to_riemann(to) : Vector(to);
  const double distance = (x1 - x0).norm();
  const int hops = static_cast<int>(std::ceil(distance / step - 1e-12));
  std::vector<State> chain{from};
  for (int k = 1; k < hops; ++k) {
    const Vector x = x0 + (x1 - x0) * (static_cast<double>(k) / hops);
    chain.push_back(chart ? model.from_riemann(x) : State(x));
  }
  if (hops > 0) chain.push_back(to);
  return chain;
}

SteeringResult steer_constant_states(const FluxModel& model, Interval domain, double tau, const State& from,
                                     const State& to, const SteeringOptions& options) {
  if (!(tau > 0.0)) throw ContractViolation("steering needs a positive crossing time");
  const std::vector<State> chain = constant_state_chain(model, from, to, options.chain_step);
  Simulation sim(model, domain, Profile::constant(domain, from), options.tracking);
  ControlPlan plan;
  plan.tau = tau;
  plan.chain = chain;
  std::vector<double> errors;
  for (std::size_t k = 1; k < chain.size(); ++k) {
    const double t = sim.time();
    const State v = sim.trace(Side::right);
    const SplitResult split = split_boundary_pair(model, v, chain[k], options.tracking.riemann);
    sim.inject(Side::right, split.state);
    plan.actions.push_back({t, Side::right, split.state});
    sim.advance_to(t + tau);
    sim.inject(Side::left, chain[k]);
    plan.actions.push_back({t + tau, Side::left, chain[k]});
    const Snapshot s = sim.advance_to(t + 2.0 * tau);
    const double err = s.profile().sup_distance(chain[k]);
    errors.push_back(err);
    for (const Front& f : s.fronts) {
      if (std::abs(f.strength) > options.residual_front_tolerance) {
        throw InvariantViolation("steering hop " + std::to_string(k) + ": a front of strength " +
                                 fmt_num(f.strength) + " survives");
      }
    }
    if (err > options.tolerance) {
      throw InvariantViolation("steering hop " + std::to_string(k) + ": terminal distance " + fmt_num(err));
    }
  }
  plan.horizon = 2.0 * tau * static_cast<double>(chain.size() - 1);
  return {std::move(plan), std::move(sim), std::move(errors)};
}

namespace {

// Fronts of an injection still more than `tolerance` (in time) away from leaving.
int remaining_with_origin(const Simulation& sim, int origin, double tolerance) {
  int count = 0;
  const Interval d = sim.domain();
  for (const Front& f : sim.fronts()) {
    if (f.origin != origin) continue;
    const double x = f.position(sim.time());
    const double left = f.speed < 0.0 ? (x - d.a) / -f.speed : std::numeric_limits<double>::infinity();
    const double right = f.speed > 0.0 ? (d.b - x) / f.speed : std::numeric_limits<double>::infinity();
    if (std::min(left, right) > tolerance) ++count;
  }
  return count;
}

}  // namespace

StepMetrics stabilization_step(Simulation& sim, double tau, const State& u_star, const StabilizationOptions& options) {
  const FluxModel& model = sim.model();
  const int p = model.negative_families();
  StepMetrics m;
  m.start_time = sim.time();
  {
    const Profile start = sim.snapshot().profile();
    const double rho = start.sup_distance(u_star);
    const double tv = start.total_variation();
    if (rho > options.delta0 || tv > options.delta0) {
      throw PreconditionError("stabilization step: distance " + fmt_num(rho) + " / variation " +
                              fmt_num(tv) + " exceed delta0 = " + fmt_num(options.delta0));
    }
  }
  const double t0 = m.start_time;

  m.tv_after_free_phase = sim.advance_to(t0 + tau).profile().total_variation();

  const SplitResult forward = split_boundary_pair(model, sim.trace(Side::right), u_star, sim.options().riemann);
  m.joint_state = forward.state;
  for (const FrontSummary& f : sim.inject(Side::right, forward.state)) {
    if (f.family >= p) ++m.wrong_side_fronts;
  }
  const int right_origin = sim.injection_count();
  m.tv_after_right_injection = sim.snapshot().profile().total_variation();
  sim.advance_to(t0 + 2.0 * tau);
  m.late_exits += remaining_with_origin(sim, right_origin, options.exit_tolerance);

  const SplitResult reverse = split_boundary_pair_reverse(model, sim.trace(Side::left), u_star, sim.options().riemann);
  m.reverse_state = reverse.state;
  for (const FrontSummary& f : sim.inject(Side::left, reverse.state)) {
    if (f.family < p) ++m.wrong_side_fronts;
  }
  const int left_origin = sim.injection_count();
  const Snapshot end = sim.advance_to(t0 + 3.0 * tau);
  m.late_exits += remaining_with_origin(sim, left_origin, options.exit_tolerance);

  const Profile profile = end.profile();
  m.end_time = sim.time();
  m.sup_distance = profile.sup_distance(u_star);
  m.total_variation = profile.total_variation();
  return m;
}

double ContractionRecord::measured_constant() const {
  double c = 0.0;
  for (const ContractionRow& r : rows) {
    if (r.k > 0 && std::isfinite(r.ratio)) c = std::max(c, r.ratio);
  }
  return c;
}

StabilizeResult stabilize(const FluxModel& model, Interval domain, double tau, const Profile& phi, const State& u_star,
                          const StabilizeOptions& options) {
  TrackingOptions tracking = options.tracking;
  tracking.epsilon = options.epsilon0;
  Simulation sim(model, domain, phi, tracking);
  ContractionRecord record;

  if (phi.sup_distance(u_star) > options.step.delta0) {
    // Pre-phase: steer from the mean state toward u_star, one hop per chain step.
    const State mean = phi.integral() / domain.length();
    const std::vector<State> chain = constant_state_chain(model, mean, u_star, options.chain_step);
    for (std::size_t k = 1; k < chain.size(); ++k) {
      const double t = sim.time();
      const SplitResult split = split_boundary_pair(model, sim.trace(Side::right), chain[k], tracking.riemann);
      sim.inject(Side::right, split.state);
      sim.advance_to(t + tau);
      const SplitResult back = split_boundary_pair_reverse(model, sim.trace(Side::left), chain[k], tracking.riemann);
      sim.inject(Side::left, back.state);
      sim.advance_to(t + 2.0 * tau);
      ++record.pre_phase_hops;
    }
    record.pre_phase_end = sim.time();
  }

  auto row = [&](int k, double ratio) {
    const Profile p = sim.snapshot().profile();
    ContractionRow r;
    r.k = k;
    r.time = sim.time();
    r.sup_distance = p.sup_distance(u_star);
    r.total_variation = p.total_variation();
    r.delta = std::max(r.sup_distance, r.total_variation);
    r.ratio = ratio;
    r.epsilon = sim.options().epsilon;
    return r;
  };
  record.rows.push_back(row(0, std::numeric_limits<double>::quiet_NaN()));

  for (int k = 1; k <= options.k_max; ++k) {
    const double previous = record.rows.back().delta;
    if (previous < options.halt_floor) break;
    sim.set_epsilon(options.epsilon0 * std::pow(options.epsilon_factor, k));
    record.steps.push_back(stabilization_step(sim, tau, u_star, options.step));
    ContractionRow r = row(k, 0.0);
    r.ratio = r.delta / (previous * previous);
    record.rows.push_back(r);
    if (!(r.delta < previous)) {
      record.contraction_failed = true;
      record.diagnostics = "step " + std::to_string(k) + ": delta " + fmt_num(r.delta) +
                           " did not decrease from " + fmt_num(previous);
      break;
    }
  }
  return {std::move(record), std::move(sim)};
}

DoublyExponentialFit fit_doubly_exponential(const ContractionRecord& record) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const ContractionRow& r : record.rows) {
    if (r.delta > 0.0 && r.delta < 1.0) {
      xs.push_back(r.k);
      ys.push_back(std::log(std::log(1.0 / r.delta)));
    }
  }
  DoublyExponentialFit fit;
  fit.points = xs.size();
  if (xs.size() < 2) return fit;
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sx += xs[k];
    sy += ys[k];
    sxx += xs[k] * xs[k];
    sxy += xs[k] * ys[k];
  }
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    fit.max_residual = std::max(fit.max_residual, std::abs(ys[k] - fit.intercept - fit.slope * xs[k]));
  }
  return fit;
}

}  // namespace hyperctl
