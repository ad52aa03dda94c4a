#pragma once

#include "hyperctl/fronttrack.hpp"

#include <optional>
#include <vector>

namespace hyperctl {

struct DensityReport {
  double time = 0.0;
  int family = 0;
  Interval probe;
  std::vector<double> density;  ///< positive-wave mass per unit length, per cell
  double max_density = 0.0;
  double kappa_hat = 0.0;       ///< time * max_density
};

/// Bins the positive i-wave atoms (rarefaction pieces) of a snapshot on a
/// uniform grid of the probe interval.
DensityReport positive_wave_density(const FluxModel& model, const Snapshot& snapshot, int family,
                                    int cells, Interval probe);

struct ShockTrack {
  LineageId lineage = no_lineage;
  int family = 0;
  std::vector<LineageSample> samples;
  /// min over sampled s < t of |sigma(t)| / |sigma(s)|.
  double min_ratio = 1.0;
  LineageEnd end = LineageEnd::alive;
};

/// Strength history of a shock lineage restricted to [s, t].
ShockTrack track_shock_strength(const Simulation& simulation, LineageId lineage, double s, double t);

/// Lineage of the strongest shock of a family alive at time t.
std::optional<LineageId> strongest_lineage(const Simulation& simulation, int family, double t);

struct PathPoint {
  double time = 0.0;
  double position = 0.0;
};

struct CharacteristicPath {
  int family = 0;
  /// From (t, x) back towards time 0, decreasing in time.
  std::vector<PathPoint> points;
  bool exited = false;
  PathPoint exit_point;

  /// Position at time s by linear interpolation.
  double position_at(double s) const;
};

/// Backward i-characteristic through (t, x), refracting through fronts.
CharacteristicPath backward_characteristic(const Simulation& simulation, int family, double t, double x);

struct SpreadReport {
  std::vector<double> times;
  std::vector<double> ratios;  ///< (y(t) - x(t)) / (y(s) - x(s))
  double max_ratio = 0.0;
};

/// Spread of two backward characteristics of the same family through
/// x < y at time t, sampled at `samples` equispaced times in [0, t).
SpreadReport characteristic_spread(const Simulation& simulation, int family, double t, double x, double y,
                                   int samples = 32);

struct ShockRecord {
  double position = 0.0;
  double strength = 0.0;
};

struct CreationEvent {
  double time = 0.0;
  double position = 0.0;
  double strength = 0.0;
};

struct CensusReport {
  double time = 0.0;
  std::vector<std::vector<ShockRecord>> shocks;  ///< per family, inside the probe
  std::vector<double> largest_gap;               ///< per family, probe ends included
  std::vector<CreationEvent> creations;          ///< cumulative up to `time`
  double total_variation = 0.0;
};

/// Shock census at the requested times (each <= the simulation clock).
/// A creation event is an interaction of two incoming fronts of one family
/// emitting a shock of the other family stronger than the floor.
std::vector<CensusReport> shock_census(const Simulation& simulation, const std::vector<double>& times,
                                       Interval probe, double strength_floor = 1e-6);

/// Counts same-family shock collisions and how many of them emitted a shock
/// (sigma < 0) in the other family.
struct ShockCollisionStats {
  int collisions = 0;
  int compliant = 0;
  double weakest_emitted = 0.0;  ///< max emitted sigma (closest to zero)
};

ShockCollisionStats same_family_shock_collisions(const Simulation& simulation);

/// N pure shocks of family `family` at dyadic positions of `interval`,
/// strengths halving with the dyadic level and summing to `budget`
/// (wave-strength units), starting from the state `left`.
Profile dense_shock_initial_data(const FluxModel& model, Interval domain, int count, double budget,
                                 Interval interval, const State& left, int family = 0);

/// `count` rarefaction jumps of one family with equal strengths summing to
/// `budget`, equally spaced on `interval`.
Profile rarefaction_initial_data(const FluxModel& model, Interval domain, int count, double budget,
                                 Interval interval, const State& left, int family);

/// Adjacent rarefaction pieces of one family whose speeds would make them
/// focus (discrete analogue of a compression wave).
int count_compressive_pairs(const Snapshot& snapshot);

/// Calibrates the Glimm constant C0 from sampled approaching-pair interactions:
/// twice the largest dV / |sigma sigma'| observed.
double calibrate_glimm_constant(const FluxModel& model, const State& center, double strength,
                                int samples = 200, unsigned seed = 7);

}  // namespace hyperctl
