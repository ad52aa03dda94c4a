#include "hyperctl/fronttrack.hpp"

#include "hyperctl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hyperctl {

FrontSummary summarize(const Front& front) {
  return {front.id, front.family, front.strength, front.kind, front.generation, front.lineage};
}

const char* to_string(LineageEnd end) {
  switch (end) {
    case LineageEnd::alive: return "alive";
    case LineageEnd::exited: return "exited";
    case LineageEnd::merged: return "merged";
    case LineageEnd::cancelled: return "cancelled";
  }
  return "alive";
}

std::vector<double> Snapshot::positions() const {
  std::vector<double> xs;
  xs.reserve(fronts.size());
  for (const Front& f : fronts) xs.push_back(f.position(time));
  return xs;
}

Profile Snapshot::profile() const {
  Profile p;
  p.domain = domain;
  p.values.push_back(leftmost);
  for (const Front& f : fronts) {
    const double x = f.position(time);
    if (x <= domain.a) {
      p.values.back() = f.right;
    } else if (x >= domain.b) {
      continue;
    } else if (!p.breakpoints.empty() && x <= p.breakpoints.back()) {
      p.values.back() = f.right;
    } else {
      p.breakpoints.push_back(x);
      p.values.push_back(f.right);
    }
  }
  return p;
}

State Snapshot::trace(Side side) const {
  if (side == Side::left) {
    State u = leftmost;
    for (const Front& f : fronts) {
      if (f.position(time) > domain.a) break;
      u = f.right;
    }
    return u;
  }
  for (auto it = fronts.rbegin(); it != fronts.rend(); ++it) {
    if (it->position(time) < domain.b) return it->right;
  }
  return leftmost;
}

bool approaching(const FluxModel& model, const Front& left, const Front& right) {
  if (left.family > right.family) return true;
  if (left.family < right.family) return false;
  if (model.field_kind(left.family) == FieldKind::linearly_degenerate) return false;
  return left.kind == WaveKind::shock || right.kind == WaveKind::shock;
}

namespace {

// V and Q in one sweep using per-family running sums.
std::pair<double, double> strength_and_potential(const FluxModel& model, const std::vector<Front>& fronts) {
  const int n = model.size();
  std::vector<double> all(static_cast<std::size_t>(n), 0.0);
  std::vector<double> shocks(static_cast<std::size_t>(n), 0.0);
  double v = 0.0;
  double q = 0.0;
  for (const Front& f : fronts) {
    const double s = std::abs(f.strength);
    const auto i = static_cast<std::size_t>(f.family);
    v += s;
    double faster = 0.0;
    for (std::size_t j = i + 1; j < all.size(); ++j) faster += all[j];
    q += s * faster;
    if (model.field_kind(f.family) == FieldKind::genuinely_nonlinear) {
      q += s * (f.kind == WaveKind::shock ? all[i] : shocks[i]);
    }
    all[i] += s;
    if (f.kind == WaveKind::shock) shocks[i] += s;
  }
  return {v, q};
}

}  // namespace

Functionals glimm_functionals(const FluxModel& model, const Snapshot& snapshot) {
  Functionals out;
  std::tie(out.v, out.q) = strength_and_potential(model, snapshot.fronts);
  out.tv = snapshot.profile().total_variation();
  return out;
}

double WaveMeasure::positive_mass(int family) const {
  double m = 0.0;
  for (const WaveAtom& a : atoms[static_cast<std::size_t>(family)]) m += std::max(a.size, 0.0);
  return m;
}

double WaveMeasure::negative_mass(int family) const {
  double m = 0.0;
  for (const WaveAtom& a : atoms[static_cast<std::size_t>(family)]) m += std::max(-a.size, 0.0);
  return m;
}

WaveMeasure wave_measures(const FluxModel& model, const Snapshot& snapshot, const RiemannOptions& options) {
  WaveMeasure m;
  m.atoms.resize(static_cast<std::size_t>(model.size()));
  const Profile p = snapshot.profile();
  for (std::size_t k = 0; k < p.breakpoints.size(); ++k) {
    const RiemannSolution sol = solve_riemann(model, p.values[k], p.values[k + 1], options);
    for (int i = 0; i < model.size(); ++i) {
      if (sol.strengths[i] != 0.0) m.atoms[static_cast<std::size_t>(i)].push_back({p.breakpoints[k], sol.strengths[i]});
    }
  }
  return m;
}

Simulation::Simulation(FluxModel model, Interval domain, const Profile& initial, TrackingOptions options)
    : model_(std::move(model)), domain_(domain), options_(options) {
  if (!(domain_.b > domain_.a)) throw ContractViolation("empty domain");
  if (!(options_.epsilon > 0.0)) throw ContractViolation("front-tracking accuracy must be positive");
  initial.validate();
  if (initial.domain.a != domain_.a || initial.domain.b != domain_.b) {
    throw ContractViolation("initial profile is defined on a different interval");
  }
  for (const State& u : initial.values) model_.require_admissible(u);
  leftmost_ = initial.values.front();
  leftmost_history_.emplace_back(0.0, leftmost_);
  boundary_flux_ = Vector::Zero(model_.size());

  for (std::size_t k = 0; k < initial.breakpoints.size(); ++k) {
    const RiemannSolution sol = solve_riemann(model_, initial.values[k], initial.values[k + 1], options_.riemann);
    Emitted e = emit(sol, initial.breakpoints[k], 0, model_.size() - 1);
    dropped_mass_ += e.dropped;
    for (Front& f : e.fronts) {
      f.generation = 1;
      f.origin = 0;
      add_front(f);
      fronts_.push_back(f);
    }
  }
  record_functionals();
}

void Simulation::set_epsilon(double epsilon) {
  if (!(epsilon > 0.0)) throw ContractViolation("front-tracking accuracy must be positive");
  options_.epsilon = epsilon;
}

Simulation::Emitted Simulation::emit(const RiemannSolution& sol, double x, int first, int last) {
  Emitted out;
  for (int i = first; i <= last; ++i) {
    const RiemannWave& w = sol.waves[static_cast<std::size_t>(i)];
    if (w.kind == WaveKind::null) continue;
    if (std::abs(w.sigma) < options_.drop_threshold) {
      out.dropped += std::abs(w.sigma);
      continue;
    }
    const State& ul = sol.states[static_cast<std::size_t>(i)];
    const State& ur = sol.states[static_cast<std::size_t>(i) + 1];
    Front base;
    base.family = i;
    base.x0 = x;
    base.t0 = time_;
    base.kind = w.kind;
    if (w.kind != WaveKind::rarefaction) {
      base.id = next_id();
      base.left = ul;
      base.right = ur;
      base.speed = w.speed_left;
      base.strength = w.sigma;
      out.fronts.push_back(std::move(base));
      continue;
    }
    const int pieces = std::max(1, static_cast<int>(std::ceil(w.sigma / options_.epsilon - 1e-9)));
    State left = ul;
    for (int j = 1; j <= pieces; ++j) {
      Front f = base;
      f.id = next_id();
      f.left = left;
      f.right = j == pieces ? ur
                            : rarefaction_curve(model_, ul, i, w.sigma * j / pieces, options_.riemann.curves).state;
      f.speed = model_.eigenvalues(f.left)[i];
      f.strength = w.sigma / pieces;
      left = f.right;
      out.fronts.push_back(std::move(f));
    }
  }
  return out;
}

std::size_t Simulation::index_of(FrontId id) const {
  for (std::size_t k = 0; k < fronts_.size(); ++k) {
    if (fronts_[k].id == id) return k;
  }
  throw ContractViolation("unknown front id " + std::to_string(id));
}

void Simulation::move_clock(double t) {
  if (t < time_) throw ContractViolation("cannot move the clock backwards");
  const double dt = t - time_;
  if (dt > 0.0) boundary_flux_ += dt * (model_.flux(trace(Side::left)) - model_.flux(trace(Side::right)));
  time_ = t;
}

void Simulation::record_functionals() { history_.push_back({time_, functionals()}); }

void Simulation::archive_end(const Front& front, double t) {
  archive_[static_cast<std::size_t>(front.id)].t_end = t;
}

LineageId Simulation::open_lineage(const Front& front) {
  Lineage l;
  l.id = static_cast<LineageId>(lineages_.size());
  l.family = front.family;
  lineages_.push_back(std::move(l));
  return lineages_.back().id;
}

void Simulation::sample_lineage(const Front& front) {
  lineages_[static_cast<std::size_t>(front.lineage)].samples.push_back(
      {time_, front.position(time_), std::abs(front.strength), front.id});
}

void Simulation::add_front(Front& front) {
  if (front.kind == WaveKind::shock && front.lineage == no_lineage) front.lineage = open_lineage(front);
  if (front.lineage != no_lineage) sample_lineage(front);
  if (static_cast<std::size_t>(front.id) != archive_.size()) throw InvariantViolation("front archive out of sync");
  archive_.push_back({front, std::numeric_limits<double>::infinity()});
}

State Simulation::trace(Side side) const {
  if (side == Side::left) return leftmost_;
  return fronts_.empty() ? leftmost_ : fronts_.back().right;
}

Snapshot Simulation::snapshot() const { return {time_, domain_, leftmost_, fronts_}; }

Functionals Simulation::functionals() const { return glimm_functionals(model_, snapshot()); }

Snapshot Simulation::snapshot_at(double t) const {
  if (t > time_) throw ContractViolation("snapshot_at: time is in the future");
  Snapshot s;
  s.time = t;
  s.domain = domain_;
  s.leftmost = leftmost_history_.front().second;
  for (const auto& [when, state] : leftmost_history_) {
    if (when <= t) s.leftmost = state;
  }
  for (const ArchivedFront& a : archive_) {
    if (a.front.t0 <= t && t < a.t_end) s.fronts.push_back(a.front);
  }
  std::stable_sort(s.fronts.begin(), s.fronts.end(), [t](const Front& x, const Front& y) {
    const double px = x.position(t);
    const double py = y.position(t);
    return px != py ? px < py : x.id < y.id;
  });
  return s;
}

std::optional<Event> Simulation::next_event() const {
  if (fronts_.empty()) return std::nullopt;
  struct Candidate {
    double time;
    double position;
    EventKind kind;
    std::size_t index;
    Side side;
  };
  std::vector<Candidate> cands;
  const auto count = fronts_.size();
  for (std::size_t k = 0; k + 1 < count; ++k) {
    const Front& l = fronts_[k];
    const Front& r = fronts_[k + 1];
    if (!(l.speed > r.speed)) continue;
    const double gap = r.position(time_) - l.position(time_);
    const double t = time_ + std::max(gap, 0.0) / (l.speed - r.speed);
    cands.push_back({t, l.position(t), EventKind::collision, k, Side::left});
  }
  const Front& first = fronts_.front();
  if (first.speed < 0.0) {
    const double t = time_ + std::max(first.position(time_) - domain_.a, 0.0) / -first.speed;
    cands.push_back({t, domain_.a, EventKind::boundary_exit, 0, Side::left});
  }
  const Front& last = fronts_.back();
  if (last.speed > 0.0) {
    const double t = time_ + std::max(domain_.b - last.position(time_), 0.0) / last.speed;
    cands.push_back({t, domain_.b, EventKind::boundary_exit, count - 1, Side::right});
  }
  if (cands.empty()) return std::nullopt;

  double earliest = cands.front().time;
  for (const Candidate& c : cands) earliest = std::min(earliest, c.time);
  const Candidate* best = nullptr;
  for (const Candidate& c : cands) {
    if (c.time > earliest + options_.time_window) continue;
    if (!best || c.position < best->position ||
        (c.position == best->position && c.kind == EventKind::collision && best->kind != EventKind::collision)) {
      best = &c;
    }
  }

  Event ev;
  ev.kind = best->kind;
  ev.time = best->time;
  ev.position = best->position;
  ev.side = best->side;
  if (ev.kind == EventKind::boundary_exit) {
    ev.participants.push_back(fronts_[best->index].id);
    return ev;
  }
  const double tol = options_.merge_distance;
  std::size_t lo = best->index;
  std::size_t hi = best->index + 1;
  while (lo > 0 && std::abs(fronts_[lo - 1].position(ev.time) - ev.position) <= tol) --lo;
  while (hi + 1 < count && std::abs(fronts_[hi + 1].position(ev.time) - ev.position) <= tol) ++hi;
  for (std::size_t k = lo; k <= hi; ++k) ev.participants.push_back(fronts_[k].id);
  return ev;
}

void Simulation::resolve(const Event& event) {
  if (++events_ > options_.max_events) throw DivergenceError("event budget exhausted");
  move_clock(std::max(event.time, time_));

  if (event.kind == EventKind::boundary_exit) {
    const std::size_t k = index_of(event.participants.front());
    const Front f = fronts_[k];
    if (event.side == Side::left) {
      if (k != 0) throw InvariantViolation("exit at a by a front that is not the leftmost");
      leftmost_ = f.right;
      leftmost_history_.emplace_back(time_, leftmost_);
    } else if (k + 1 != fronts_.size()) {
      throw InvariantViolation("exit at b by a front that is not the rightmost");
    }
    fronts_.erase(fronts_.begin() + static_cast<std::ptrdiff_t>(k));
    archive_end(f, time_);
    if (f.lineage != no_lineage) {
      sample_lineage(f);
      Lineage& l = lineages_[static_cast<std::size_t>(f.lineage)];
      l.end = LineageEnd::exited;
      l.end_time = time_;
    }
    BoundaryRecord rec;
    rec.time = time_;
    rec.side = event.side;
    rec.fronts.push_back(summarize(f));
    rec.outer = event.side == Side::left ? f.left : f.right;
    boundary_log_.push_back(std::move(rec));
    record_functionals();
    return;
  }

  const std::size_t lo = index_of(event.participants.front());
  const std::size_t hi = lo + event.participants.size() - 1;
  if (hi >= fronts_.size() || fronts_[hi].id != event.participants.back()) {
    throw InvariantViolation("collision participants are not contiguous");
  }
  const Functionals before = history_.empty() ? functionals() : history_.back().values;
  const std::vector<Front> incoming(fronts_.begin() + static_cast<std::ptrdiff_t>(lo),
                                    fronts_.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
  const State ul = incoming.front().left;
  const State ur = incoming.back().right;
  const RiemannSolution sol = solve_riemann(model_, ul, ur, options_.riemann);
  Emitted e = emit(sol, event.position, 0, model_.size() - 1);
  dropped_mass_ += e.dropped;

  int min_generation = incoming.front().generation;
  for (const Front& f : incoming) min_generation = std::min(min_generation, f.generation);

  for (Front& out : e.fronts) {
    const Front* strongest = nullptr;
    const Front* strongest_shock = nullptr;
    int generation = 0;
    for (const Front& f : incoming) {
      if (f.family != out.family) continue;
      generation = generation == 0 ? f.generation : std::min(generation, f.generation);
      if (!strongest || std::abs(f.strength) > std::abs(strongest->strength)) strongest = &f;
      if (f.kind == WaveKind::shock &&
          (!strongest_shock || std::abs(f.strength) > std::abs(strongest_shock->strength))) {
        strongest_shock = &f;
      }
    }
    if (strongest) {
      out.generation = generation;
      out.origin = strongest->origin;
      if (out.kind == WaveKind::shock && strongest_shock) out.lineage = strongest_shock->lineage;
    } else {
      out.generation = 1 + min_generation;
      out.origin = interaction_origin;
    }
  }

  // Lineages of incoming shocks that do not continue end here.
  for (const Front& f : incoming) {
    if (f.lineage == no_lineage) continue;
    const auto cont = std::find_if(e.fronts.begin(), e.fronts.end(),
                                   [&](const Front& o) { return o.lineage == f.lineage; });
    if (cont != e.fronts.end()) continue;
    sample_lineage(f);
    Lineage& l = lineages_[static_cast<std::size_t>(f.lineage)];
    l.end_time = time_;
    const auto heir = std::find_if(e.fronts.begin(), e.fronts.end(), [&](const Front& o) {
      return o.family == f.family && o.kind == WaveKind::shock && o.lineage != no_lineage;
    });
    if (heir != e.fronts.end()) {
      l.end = LineageEnd::merged;
      l.merged_into = heir->lineage;
    } else {
      l.end = LineageEnd::cancelled;
    }
  }

  for (const Front& f : incoming) archive_end(f, time_);
  for (Front& f : e.fronts) add_front(f);
  fronts_.erase(fronts_.begin() + static_cast<std::ptrdiff_t>(lo), fronts_.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
  fronts_.insert(fronts_.begin() + static_cast<std::ptrdiff_t>(lo), e.fronts.begin(), e.fronts.end());

  record_functionals();
  const Functionals& after = history_.back().values;
  InteractionRecord rec;
  rec.time = time_;
  rec.position = event.position;
  for (const Front& f : incoming) rec.incoming.push_back(summarize(f));
  for (const Front& f : e.fronts) rec.outgoing.push_back(summarize(f));
  rec.dv = after.v - before.v;
  rec.dq = after.q - before.q;
  rec.v_after = after.v;
  rec.q_after = after.q;
  interactions_.push_back(std::move(rec));
}

Snapshot Simulation::advance_to(double t) {
  if (t < time_) throw ContractViolation("advance_to: time is in the past");
  while (true) {
    const std::optional<Event> ev = next_event();
    if (!ev || ev->time > t) break;
    resolve(*ev);
  }
  move_clock(t);
  return snapshot();
}

std::vector<FrontSummary> Simulation::inject(Side side, const State& outer) {
  model_.require_admissible(outer);
  const int n = model_.size();
  const int p = model_.negative_families();
  const State inner = trace(side);
  const RiemannSolution sol = side == Side::right ? solve_riemann(model_, inner, outer, options_.riemann)
                                                  : solve_riemann(model_, outer, inner, options_.riemann);
  const int first = side == Side::right ? 0 : p;
  const int last = side == Side::right ? p - 1 : n - 1;
  double discarded = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i >= first && i <= last) continue;
    const double s = std::abs(sol.strengths[i]);
    if (s > options_.contract_tolerance) {
      throw ContractViolation("injection at " + std::string(to_string(side)) + " emits family " +
                              std::to_string(i + 1) + " (strength " + fmt_num(sol.strengths[i]) +
                              ") which would leave the domain");
    }
    discarded += s;
  }
  dropped_mass_ += discarded;
  ++injections_;

  const double x = side == Side::right ? domain_.b : domain_.a;
  Emitted e = emit(sol, x, first, last);
  dropped_mass_ += e.dropped;
  for (Front& f : e.fronts) {
    f.generation = 1;
    f.origin = injections_;
    add_front(f);
  }
  if (side == Side::right) {
    fronts_.insert(fronts_.end(), e.fronts.begin(), e.fronts.end());
  } else {
    if (!e.fronts.empty()) {
      leftmost_ = e.fronts.front().left;
      leftmost_history_.emplace_back(time_, leftmost_);
    }
    fronts_.insert(fronts_.begin(), e.fronts.begin(), e.fronts.end());
  }

  BoundaryRecord rec;
  rec.time = time_;
  rec.side = side;
  rec.injection = true;
  rec.origin = injections_;
  rec.outer = outer;
  std::vector<FrontSummary> summaries;
  for (const Front& f : e.fronts) summaries.push_back(summarize(f));
  rec.fronts = summaries;
  boundary_log_.push_back(std::move(rec));
  record_functionals();
  return summaries;
}

}  // namespace hyperctl
