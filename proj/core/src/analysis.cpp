#include "hyperctl/analysis.hpp"

#include "hyperctl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

namespace hyperctl {

DensityReport positive_wave_density(const FluxModel& model, const Snapshot& snapshot, int family, int cells,
                                    Interval probe) {
  if (cells < 1) throw ContractViolation("density grid needs at least one cell");
  if (family < 0 || family >= model.size()) throw ContractViolation("family out of range");
  if (!(probe.b > probe.a)) throw ContractViolation("empty probe interval");
  DensityReport r;
  r.time = snapshot.time;
  r.family = family;
  r.probe = probe;
  r.density.assign(static_cast<std::size_t>(cells), 0.0);
  const double width = probe.length() / cells;
  for (const Front& f : snapshot.fronts) {
    if (f.family != family || f.strength <= 0.0 || f.kind == WaveKind::shock) continue;
    const double x = f.position(snapshot.time);
    if (x < probe.a || x > probe.b) continue;
    const auto k = std::min(static_cast<std::size_t>((x - probe.a) / width), r.density.size() - 1);
    r.density[k] += f.strength;
  }
  for (double& d : r.density) {
    d /= width;
    r.max_density = std::max(r.max_density, d);
  }
  r.kappa_hat = snapshot.time * r.max_density;
  return r;
}

ShockTrack track_shock_strength(const Simulation& sim, LineageId lineage, double s, double t) {
  const auto& all = sim.lineages();
  if (lineage < 0 || static_cast<std::size_t>(lineage) >= all.size()) {
    throw ContractViolation("unknown lineage " + std::to_string(lineage));
  }
  const Lineage& l = all[static_cast<std::size_t>(lineage)];
  ShockTrack track;
  track.lineage = lineage;
  track.family = l.family;
  track.end = l.end_time <= t ? l.end : LineageEnd::alive;
  // The strength in force at time s is the last sample at or before s.
  const LineageSample* start = nullptr;
  for (const LineageSample& x : l.samples) {
    if (x.time <= s) start = &x;
  }
  if (start) track.samples.push_back(*start);
  for (const LineageSample& x : l.samples) {
    if (x.time > s && x.time <= t) track.samples.push_back(x);
  }
  double strongest = 0.0;
  for (const LineageSample& x : track.samples) {
    if (strongest > 0.0) track.min_ratio = std::min(track.min_ratio, x.strength / strongest);
    strongest = std::max(strongest, x.strength);
  }
  return track;
}

std::optional<LineageId> strongest_lineage(const Simulation& sim, int family, double t) {
  const Snapshot s = sim.snapshot_at(t);
  std::optional<LineageId> best;
  double strength = 0.0;
  for (const Front& f : s.fronts) {
    if (f.family == family && f.kind == WaveKind::shock && f.lineage != no_lineage &&
        std::abs(f.strength) > strength) {
      strength = std::abs(f.strength);
      best = f.lineage;
    }
  }
  return best;
}

double CharacteristicPath::position_at(double s) const {
  if (points.empty()) throw ContractViolation("empty characteristic path");
  if (s >= points.front().time) return points.front().position;
  for (std::size_t k = 1; k < points.size(); ++k) {
    const PathPoint& hi = points[k - 1];
    const PathPoint& lo = points[k];
    if (s >= lo.time) {
      if (hi.time == lo.time) return lo.position;
      return lo.position + (hi.position - lo.position) * (s - lo.time) / (hi.time - lo.time);
    }
  }
  return points.back().position;
}

CharacteristicPath backward_characteristic(const Simulation& sim, int family, double t, double x) {
  const FluxModel& model = sim.model();
  const Interval d = sim.domain();
  if (t > sim.time()) throw ContractViolation("backward characteristic from a future time");
  if (!d.contains(x)) throw ContractViolation("backward characteristic from outside the domain");

  // Times at which the set of fronts changes.
  std::set<double> changes;
  for (const ArchivedFront& a : sim.archive()) {
    changes.insert(a.front.t0);
    if (std::isfinite(a.t_end)) changes.insert(a.t_end);
  }
  for (const auto& [when, state] : sim.leftmost_history()) changes.insert(when);

  CharacteristicPath path;
  path.family = family;
  path.points.push_back({t, x});
  double s = t;
  double y = x;
  constexpr double touch = 1e-12;
  for (int guard = 0; s > 0.0; ++guard) {
    if (guard > 1000000) throw DivergenceError("backward characteristic: too many steps");
    // Fronts alive just before s, sorted by position at s.
    std::vector<const Front*> alive;
    for (const ArchivedFront& a : sim.archive()) {
      if (a.front.t0 < s && a.t_end >= s) alive.push_back(&a.front);
    }
    std::sort(alive.begin(), alive.end(), [s](const Front* p, const Front* q) {
      const double ps = p->position(s);
      const double qs = q->position(s);
      return ps != qs ? ps < qs : p->id < q->id;
    });
    State leftmost = sim.leftmost_history().front().second;
    for (const auto& [when, state] : sim.leftmost_history()) {
      if (when < s) leftmost = state;
    }

    // Locate the cell; fronts through (s, y) are resolved by the tie rule.
    std::size_t k = 0;
    while (k < alive.size() && alive[k]->position(s) < y - touch) ++k;
    std::size_t on_end = k;
    while (on_end < alive.size() && std::abs(alive[on_end]->position(s) - y) <= touch) ++on_end;
    std::size_t cell = k;  // number of fronts to the left of the cell
    double speed = 0.0;
    const Front* riding = nullptr;
    if (on_end == k) {
      const State u = k == 0 ? leftmost : alive[k - 1]->right;
      speed = model.eigenvalues(u)[family];
    } else {
      const State ul = k == 0 ? leftmost : alive[k - 1]->right;
      const double lambda_l = model.eigenvalues(ul)[family];
      const double lambda_r = model.eigenvalues(alive[on_end - 1]->right)[family];
      if (lambda_l >= alive[k]->speed) {
        cell = k;
        speed = lambda_l;
      } else if (lambda_r <= alive[on_end - 1]->speed) {
        cell = on_end;
        speed = lambda_r;
      } else {
        riding = alive[k];
        speed = riding->speed;
      }
    }

    double h = s;
    auto consider = [&](double candidate) {
      if (candidate >= 0.0 && candidate < h) h = candidate;
    };
    auto prev_change = changes.lower_bound(s);
    if (prev_change != changes.begin()) consider(s - *std::prev(prev_change));
    if (!riding) {
      if (cell > 0) {
        const Front* f = alive[cell - 1];
        if (speed > f->speed) consider((y - f->position(s)) / (speed - f->speed));
      }
      if (cell < alive.size()) {
        const Front* f = alive[cell];
        if (f->speed > speed) consider((f->position(s) - y) / (f->speed - speed));
      }
    }
    bool exits = false;
    if (speed > 0.0 && (y - d.a) / speed <= h) {
      h = (y - d.a) / speed;
      exits = true;
    } else if (speed < 0.0 && (y - d.b) / speed <= h) {
      h = (y - d.b) / speed;
      exits = true;
    }
    s -= h;
    y -= speed * h;
    if (exits) {
      y = speed > 0.0 ? d.a : d.b;
      path.points.push_back({s, y});
      path.exited = true;
      path.exit_point = {s, y};
      break;
    }
    if (h > 0.0) path.points.push_back({s, y});
  }
  return path;
}

SpreadReport characteristic_spread(const Simulation& sim, int family, double t, double x, double y, int samples) {
  if (!(x < y)) throw ContractViolation("characteristic spread needs x < y");
  const CharacteristicPath px = backward_characteristic(sim, family, t, x);
  const CharacteristicPath py = backward_characteristic(sim, family, t, y);
  SpreadReport r;
  const double start = std::max(px.exited ? px.exit_point.time : 0.0, py.exited ? py.exit_point.time : 0.0);
  for (int j = 0; j < samples; ++j) {
    const double s = start + (t - start) * j / samples;
    const double gap = py.position_at(s) - px.position_at(s);
    if (!(gap > 0.0)) continue;
    const double ratio = (y - x) / gap;
    r.times.push_back(s);
    r.ratios.push_back(ratio);
    r.max_ratio = std::max(r.max_ratio, ratio);
  }
  return r;
}

namespace {

bool same_family_incoming(const InteractionRecord& rec, int& family) {
  if (rec.incoming.size() < 2) return false;
  family = rec.incoming.front().family;
  for (const FrontSummary& f : rec.incoming) {
    if (f.family != family) return false;
  }
  return true;
}

}  // namespace

std::vector<CensusReport> shock_census(const Simulation& sim, const std::vector<double>& times, Interval probe,
                                       double floor) {
  const int n = sim.model().size();
  std::vector<CensusReport> out;
  for (double t : times) {
    const Snapshot snap = sim.snapshot_at(t);
    CensusReport r;
    r.time = t;
    r.shocks.resize(static_cast<std::size_t>(n));
    r.largest_gap.assign(static_cast<std::size_t>(n), probe.length());
    for (const Front& f : snap.fronts) {
      const double x = f.position(t);
      if (f.kind != WaveKind::shock || std::abs(f.strength) < floor || !probe.contains(x)) continue;
      r.shocks[static_cast<std::size_t>(f.family)].push_back({x, f.strength});
    }
    for (int i = 0; i < n; ++i) {
      const auto& list = r.shocks[static_cast<std::size_t>(i)];
      double prev = probe.a;
      double gap = 0.0;
      for (const ShockRecord& s : list) {
        gap = std::max(gap, s.position - prev);
        prev = s.position;
      }
      r.largest_gap[static_cast<std::size_t>(i)] = std::max(gap, probe.b - prev);
    }
    for (const InteractionRecord& rec : sim.interactions()) {
      if (rec.time > t) break;
      int family = 0;
      if (!same_family_incoming(rec, family)) continue;
      for (const FrontSummary& o : rec.outgoing) {
        if (o.family != family && o.kind == WaveKind::shock && o.strength < -floor) {
          r.creations.push_back({rec.time, rec.position, o.strength});
        }
      }
    }
    r.total_variation = snap.profile().total_variation();
    out.push_back(std::move(r));
  }
  return out;
}

ShockCollisionStats same_family_shock_collisions(const Simulation& sim) {
  ShockCollisionStats stats;
  bool first = true;
  for (const InteractionRecord& rec : sim.interactions()) {
    int family = 0;
    if (!same_family_incoming(rec, family)) continue;
    const bool all_shocks = std::all_of(rec.incoming.begin(), rec.incoming.end(),
                                        [](const FrontSummary& f) { return f.kind == WaveKind::shock; });
    if (!all_shocks) continue;
    ++stats.collisions;
    double emitted = 0.0;
    bool found = false;
    for (const FrontSummary& o : rec.outgoing) {
      if (o.family == family) continue;
      found = true;
      emitted = o.strength;
    }
    if (found && emitted < 0.0) ++stats.compliant;
    stats.weakest_emitted = first ? emitted : std::max(stats.weakest_emitted, emitted);
    first = false;
  }
  return stats;
}

Profile dense_shock_initial_data(const FluxModel& model, Interval domain, int count, double budget,
                                 Interval interval, const State& left, int family) {
  if (count < 1) throw ContractViolation("dense shock data needs at least one shock");
  if (!(budget > 0.0)) throw ContractViolation("dense shock budget must be positive");
  if (!(interval.a >= domain.a && interval.b <= domain.b && interval.b > interval.a)) {
    throw ContractViolation("dense shock interval must lie inside the domain");
  }
  if (budget > model.curve_radius()) {
    throw PreconditionError("dense shock budget " + fmt_num(budget) + " exceeds the curve radius");
  }
  struct Atom {
    double x;
    double weight;
  };
  std::vector<Atom> atoms;
  for (int level = 0; static_cast<int>(atoms.size()) < count; ++level) {
    const int per_level = 1 << level;
    const double cell = interval.length() / (2.0 * per_level);
    for (int j = 0; j < per_level && static_cast<int>(atoms.size()) < count; ++j) {
      atoms.push_back({interval.a + (2 * j + 1) * cell, std::ldexp(1.0, -level)});
    }
  }
  double total = 0.0;
  for (const Atom& a : atoms) total += a.weight;
  std::sort(atoms.begin(), atoms.end(), [](const Atom& p, const Atom& q) { return p.x < q.x; });

  Profile p;
  p.domain = domain;
  p.values.push_back(left);
  for (const Atom& a : atoms) {
    const double sigma = -budget * a.weight / total;
    p.breakpoints.push_back(a.x);
    p.values.push_back(shock_curve(model, p.values.back(), family, sigma).state);
  }
  p.validate();
  return p;
}

Profile rarefaction_initial_data(const FluxModel& model, Interval domain, int count, double budget,
                                 Interval interval, const State& left, int family) {
  if (count < 1) throw ContractViolation("rarefaction data needs at least one jump");
  if (!(budget > 0.0)) throw ContractViolation("rarefaction budget must be positive");
  Profile p;
  p.domain = domain;
  p.values.push_back(left);
  for (int j = 0; j < count; ++j) {
    p.breakpoints.push_back(interval.a + interval.length() * (j + 1) / (count + 1));
    p.values.push_back(rarefaction_curve(model, p.values.back(), family, budget / count).state);
  }
  p.validate();
  return p;
}

int count_compressive_pairs(const Snapshot& snapshot) {
  int count = 0;
  for (std::size_t k = 1; k < snapshot.fronts.size(); ++k) {
    const Front& l = snapshot.fronts[k - 1];
    const Front& r = snapshot.fronts[k];
    if (l.family == r.family && l.kind == WaveKind::rarefaction && r.kind == WaveKind::rarefaction &&
        l.speed > r.speed) {
      ++count;
    }
  }
  return count;
}

double calibrate_glimm_constant(const FluxModel& model, const State& center, double strength, int samples,
                                unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> fam(0, model.size() - 1);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    int i = fam(rng);
    int j = fam(rng);
    if (i < j) std::swap(i, j);
    double a = strength * unit(rng);
    double b = strength * unit(rng);
    if (i == j) {
      if (model.field_kind(i) == FieldKind::linearly_degenerate) continue;
      if (a > 0.0 && b > 0.0) b = -b;
    }
    if (a == 0.0 || b == 0.0) continue;
    try {
      const State mid = lax_curve(model, center, i, a).state;
      const State right = lax_curve(model, mid, j, b).state;
      const RiemannSolution sol = solve_riemann(model, center, right);
      const double dv = sol.strengths.cwiseAbs().sum() - std::abs(a) - std::abs(b);
      worst = std::max(worst, dv / std::abs(a * b));
    } catch (const Error&) {
      continue;
    }
  }
  return std::max(2.0 * worst, 1e-3);
}

}  // namespace hyperctl
