#pragma once

#include "hyperctl/fronttrack.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hyperctl {

/// Maximal time for a wave to cross [a, b] over the sampled box:
/// max_i sup_u (b - a) / |lambda_i(u)|. Throws PreconditionError when a
/// speed changes sign or falls below `speed_floor` on the grid.
double crossing_time(const FluxModel& model, Interval domain, const Box& box, int grid_per_axis = 32,
                     double speed_floor = 1e-6);

/// Piecewise-constant boundary values l_i . u(t, side) as a function of time.
struct BoundarySignal {
  int family = 0;
  Side side = Side::left;
  ScalarProfile values;  ///< over [0, T]
};

/// Exact solution of u_t + A u_x = 0 on [0, T] x [a, b] joining two
/// piecewise-constant profiles by decoupled transport of characteristic
/// components.
class LinearControlSolution {
 public:
  LinearControlSolution(Matrix a, Interval domain, double horizon, EigenStructure eigen,
                        std::vector<ScalarProfile> components);

  const EigenStructure& eigen() const { return eigen_; }
  double horizon() const { return horizon_; }
  Interval domain() const { return domain_; }

  /// u(t, .) on [a, b]; breakpoints closer than 1e-12 are merged.
  Profile at(double t) const;
  /// Controls: families with negative speed at b, the others at a.
  std::vector<BoundarySignal> boundary_data() const;

 private:
  Matrix a_;
  Interval domain_;
  double horizon_;
  EigenStructure eigen_;
  /// u_i(t, x) = components_[i].at(x - lambda_i t).
  std::vector<ScalarProfile> components_;
};

/// Throws PreconditionError when T is below the crossing time or A has a
/// zero or repeated eigenvalue.
LinearControlSolution linear_exact_control(const Matrix& a, Interval domain, const Profile& phi,
                                           const Profile& psi, double horizon);

struct ControlAction {
  double time = 0.0;
  Side side = Side::right;
  State outer;
};

struct ControlPlan {
  std::vector<ControlAction> actions;
  double horizon = 0.0;
  double tau = 0.0;
  /// Chain omega_0 .. omega_N.
  std::vector<State> chain;
};

struct SteeringOptions {
  double chain_step = 0.05;
  double tolerance = 1e-8;
  /// Fronts weaker than this may survive a hop.
  double residual_front_tolerance = 1e-10;
  TrackingOptions tracking{};
};

struct SteeringResult {
  ControlPlan plan;
  Simulation simulation;
  /// Sup-distance to the chain point at the end of every hop.
  std::vector<double> hop_errors;
};

/// Straight chain in Riemann coordinates (state space for models without
/// a chart) with N = ceil(|w(omega') - w(omega)| / step) equal hops.
std::vector<State> constant_state_chain(const FluxModel& model, const State& from, const State& to,
                                        double step);

/// Drives the constant state `from` to the constant state `to` with the
/// two-Riemann-problem construction per hop; horizon 2 N tau.
SteeringResult steer_constant_states(const FluxModel& model, Interval domain, double tau,
                                     const State& from, const State& to,
                                     const SteeringOptions& options = {});

struct StabilizationOptions {
  /// Largest admissible sup-distance / total variation at the start of a step.
  double delta0 = 0.2;
  /// Fronts exiting later than injection + tau + this count as late exits.
  double exit_tolerance = 1e-9;
};

struct StepMetrics {
  double start_time = 0.0;
  double end_time = 0.0;
  double sup_distance = 0.0;
  double total_variation = 0.0;
  double tv_after_free_phase = 0.0;
  double tv_after_right_injection = 0.0;
  State joint_state;     ///< v''
  State reverse_state;   ///< v'''
  /// Injected fronts (or their same-family successors) still inside the
  /// domain tau after their injection.
  int late_exits = 0;
  /// Families entering from the wrong side (must stay 0).
  int wrong_side_fronts = 0;
};

/// One 3 tau cycle: free evolution, injection at b toward u_star, injection
/// at a. Operates on a running simulation.
StepMetrics stabilization_step(Simulation& simulation, double tau, const State& u_star,
                               const StabilizationOptions& options = {});

struct ContractionRow {
  int k = 0;
  double time = 0.0;
  double sup_distance = 0.0;
  double total_variation = 0.0;
  /// max(sup_distance, total_variation)
  double delta = 0.0;
  /// delta_k / delta_{k-1}^2; NaN for k = 0.
  double ratio = 0.0;
  double epsilon = 0.0;
};

struct ContractionRecord {
  std::vector<ContractionRow> rows;  ///< k = 0 .. performed steps
  double pre_phase_end = 0.0;
  int pre_phase_hops = 0;
  bool contraction_failed = false;
  std::string diagnostics;
  std::vector<StepMetrics> steps;
  /// max over steps of ratio, the measured quadratic constant.
  double measured_constant() const;
};

struct StabilizeOptions {
  int k_max = 4;
  /// epsilon_k = epsilon0 * 4^-k.
  double epsilon0 = 0.01;
  double epsilon_factor = 0.25;
  double halt_floor = 1e-9;
  double chain_step = 0.05;
  StabilizationOptions step{};
  TrackingOptions tracking{};
};

struct StabilizeResult {
  ContractionRecord record;
  Simulation simulation;
};

/// Pre-phase steering (only when sup|phi - u_star| > delta0) followed by
/// repeated stabilization steps.
StabilizeResult stabilize(const FluxModel& model, Interval domain, double tau, const Profile& phi,
                          const State& u_star, const StabilizeOptions& options = {});

/// Least-squares slope and intercept of log(log(1/delta_k)) against k over
/// rows with 0 < delta < 1.
struct DoublyExponentialFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
  std::size_t points = 0;
};

DoublyExponentialFit fit_doubly_exponential(const ContractionRecord& record);

}  // namespace hyperctl
