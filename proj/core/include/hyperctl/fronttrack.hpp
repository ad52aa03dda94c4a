#pragma once

#include "hyperctl/flux_models.hpp"
#include "hyperctl/profile.hpp"
#include "hyperctl/riemann.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace hyperctl {

using FrontId = std::int64_t;
using LineageId = std::int64_t;

inline constexpr LineageId no_lineage = -1;
/// Origin tag of fronts created as a new family at an interaction.
inline constexpr int interaction_origin = -1;

/// One straight discontinuity of a front-tracking profile.
struct Front {
  FrontId id = 0;
  int family = 0;
  State left;
  State right;
  double speed = 0.0;
  double strength = 0.0;
  WaveKind kind = WaveKind::shock;
  int generation = 1;
  /// Position and time of creation; fronts never change speed afterwards.
  double x0 = 0.0;
  double t0 = 0.0;
  LineageId lineage = no_lineage;
  /// 0 for initial data, k >= 1 for the k-th boundary injection,
  /// interaction_origin for waves of a family absent among the incoming fronts.
  int origin = 0;

  double position(double t) const { return x0 + speed * (t - t0); }
};

struct FrontSummary {
  FrontId id = 0;
  int family = 0;
  double strength = 0.0;
  WaveKind kind = WaveKind::shock;
  int generation = 1;
  LineageId lineage = no_lineage;
};

FrontSummary summarize(const Front& front);

/// Piecewise-constant profile at a fixed time.
struct Snapshot {
  double time = 0.0;
  Interval domain;
  State leftmost;
  /// Sorted by position at `time`.
  std::vector<Front> fronts;

  std::vector<double> positions() const;
  Profile profile() const;
  State trace(Side side) const;
};

struct Functionals {
  double v = 0.0;   ///< total strength
  double q = 0.0;   ///< interaction potential over approaching pairs
  double tv = 0.0;  ///< total variation of the profile (Euclidean jumps)
};

/// True when the front on the left will eventually interact with the one on
/// its right: a faster family on the left, or the same genuinely nonlinear
/// family with at least one shock.
bool approaching(const FluxModel& model, const Front& left, const Front& right);

Functionals glimm_functionals(const FluxModel& model, const Snapshot& snapshot);

enum class EventKind { collision, boundary_exit };

struct Event {
  EventKind kind = EventKind::collision;
  double time = 0.0;
  double position = 0.0;
  /// Contiguous run of colliding fronts, or the exiting front.
  std::vector<FrontId> participants;
  Side side = Side::left;
};

struct InteractionRecord {
  double time = 0.0;
  double position = 0.0;
  std::vector<FrontSummary> incoming;
  std::vector<FrontSummary> outgoing;
  double dv = 0.0;
  double dq = 0.0;
  double v_after = 0.0;
  double q_after = 0.0;
};

struct BoundaryRecord {
  double time = 0.0;
  Side side = Side::left;
  bool injection = false;
  int origin = 0;
  std::vector<FrontSummary> fronts;
  State outer;
};

struct FunctionalSample {
  double time = 0.0;
  Functionals values;
};

enum class LineageEnd { alive, exited, merged, cancelled };

const char* to_string(LineageEnd end);

struct LineageSample {
  double time = 0.0;
  double position = 0.0;
  double strength = 0.0;
  FrontId front = 0;
};

/// A shock followed through interactions.
struct Lineage {
  LineageId id = 0;
  int family = 0;
  std::vector<LineageSample> samples;
  LineageEnd end = LineageEnd::alive;
  double end_time = std::numeric_limits<double>::infinity();
  LineageId merged_into = no_lineage;
};

struct ArchivedFront {
  Front front;
  double t_end = std::numeric_limits<double>::infinity();
};

struct TrackingOptions {
  /// Maximal strength of a rarefaction piece.
  double epsilon = 0.01;
  /// Outgoing waves with |sigma| below this are dropped.
  double drop_threshold = 1e-12;
  /// Events closer than this in time at the same point are merged.
  double time_window = 1e-12;
  /// Fronts closer than this to a collision point join the interaction.
  double merge_distance = 1e-10;
  /// Off-side strengths tolerated (and discarded) at a boundary injection.
  double contract_tolerance = 1e-9;
  std::size_t max_events = 2'000'000;
  RiemannOptions riemann{};
};

/// Event-driven front-tracking evolution on a bounded interval with
/// absorbing boundaries. Single-threaded and mutable.
class Simulation {
 public:
  /// Resolves every jump of `initial` into fronts; rarefactions are split
  /// into ceil(sigma / epsilon) equal pieces.
  Simulation(FluxModel model, Interval domain, const Profile& initial, TrackingOptions options = {});

  const FluxModel& model() const { return model_; }
  Interval domain() const { return domain_; }
  double time() const { return time_; }
  const TrackingOptions& options() const { return options_; }
  void set_epsilon(double epsilon);

  /// Earliest pending event, or nothing when no front remains.
  std::optional<Event> next_event() const;
  /// Applies an event returned by next_event().
  void resolve(const Event& event);
  /// Resolves all events up to time t and moves the clock to t.
  Snapshot advance_to(double t);

  /// Injects the Riemann problem between the boundary trace and `outer`
  /// (outer lies outside the domain). Only families entering the domain may
  /// appear: families < p at b, families >= p at a.
  std::vector<FrontSummary> inject(Side side, const State& outer);

  Snapshot snapshot() const;
  /// Reconstructs the profile at an earlier time from the front archive.
  Snapshot snapshot_at(double t) const;
  const std::vector<Front>& fronts() const { return fronts_; }
  State trace(Side side) const;
  Functionals functionals() const;

  const std::vector<InteractionRecord>& interactions() const { return interactions_; }
  const std::vector<BoundaryRecord>& boundary_log() const { return boundary_log_; }
  const std::vector<FunctionalSample>& history() const { return history_; }
  const std::vector<Lineage>& lineages() const { return lineages_; }
  const std::vector<ArchivedFront>& archive() const { return archive_; }
  /// (time, leftmost state) after every change of the state at x = a.
  const std::vector<std::pair<double, State>>& leftmost_history() const { return leftmost_history_; }

  double dropped_mass() const { return dropped_mass_; }
  /// Integral over elapsed time of f(u(t, a)) - f(u(t, b)).
  const Vector& boundary_flux_integral() const { return boundary_flux_; }
  std::size_t event_count() const { return events_; }
  int injection_count() const { return injections_; }

 private:
  struct Emitted {
    std::vector<Front> fronts;
    double dropped = 0.0;
  };

  Emitted emit(const RiemannSolution& solution, double x, int first_family, int last_family);
  FrontId next_id() { return next_id_++; }
  std::size_t index_of(FrontId id) const;
  void move_clock(double t);
  void record_functionals();
  void archive_end(const Front& front, double t);
  void add_front(Front& front);
  LineageId open_lineage(const Front& front);
  void sample_lineage(const Front& front);

  FluxModel model_;
  Interval domain_;
  TrackingOptions options_;
  double time_ = 0.0;
  State leftmost_;
  std::vector<Front> fronts_;
  std::vector<InteractionRecord> interactions_;
  std::vector<BoundaryRecord> boundary_log_;
  std::vector<FunctionalSample> history_;
  std::vector<Lineage> lineages_;
  std::vector<ArchivedFront> archive_;
  std::vector<std::pair<double, State>> leftmost_history_;
  double dropped_mass_ = 0.0;
  Vector boundary_flux_;
  std::size_t events_ = 0;
  int injections_ = 0;
  FrontId next_id_ = 0;
};

struct WaveAtom {
  double position = 0.0;
  double size = 0.0;
};

/// Atomic measures of i-waves of a piecewise-constant profile.
struct WaveMeasure {
  std::vector<std::vector<WaveAtom>> atoms;  ///< per family

  double positive_mass(int family) const;
  double negative_mass(int family) const;
  double total_mass(int family) const { return positive_mass(family) + negative_mass(family); }
};

WaveMeasure wave_measures(const FluxModel& model, const Snapshot& snapshot,
                          const RiemannOptions& options = {});

}  // namespace hyperctl
