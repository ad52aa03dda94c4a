#pragma once

#include "hyperctl/flux_models.hpp"
#include "hyperctl/newton.hpp"
#include "hyperctl/wave_curves.hpp"

#include <vector>

namespace hyperctl {

enum class WaveKind { shock, rarefaction, contact, null };

const char* to_string(WaveKind kind);

struct RiemannWave {
  int family = 0;
  double sigma = 0.0;
  WaveKind kind = WaveKind::null;
  /// Speed range; degenerate for shocks and contacts.
  double speed_left = 0.0;
  double speed_right = 0.0;
};

/// Solution of a Riemann problem as a chain of elementary waves:
/// states[k+1] = Psi_k(sigma_k)(states[k]).
struct RiemannSolution {
  Vector strengths;
  std::vector<State> states;
  std::vector<RiemannWave> waves;
  double residual = 0.0;
};

struct RiemannOptions {
  /// Largest jump (max-norm, Riemann-coordinate units when available) accepted.
  double radius = 0.3;
  /// Waves with |sigma| below this are reported as null.
  double null_threshold = 1e-12;
  NewtonOptions newton{};
  CurveOptions curves{};
};

/// Psi_{last}(sigma_last) o ... o Psi_first(sigma_first)(u0), families
/// first..last inclusive, taking sigma entries by family index.
State compose_waves(const FluxModel& model, const State& u0, const Vector& sigma, int first,
                    int last, const CurveOptions& options = {});

/// All intermediate states of the full composition, size n + 1.
std::vector<State> compose_states(const FluxModel& model, const State& u0, const Vector& sigma,
                                  const CurveOptions& options = {});

RiemannSolution solve_riemann(const FluxModel& model, const State& ul, const State& ur,
                              const RiemannOptions& options = {});

/// Result of a boundary splitting problem.
struct SplitResult {
  /// The joint state: v'' for the forward split, v''' for the reverse one.
  State state;
  Vector strengths;
  double residual = 0.0;
};

/// Finds v'' = Psi_n..Psi_{p+1}(v') = Psi_p..Psi_1(v).
SplitResult split_boundary_pair(const FluxModel& model, const State& v, const State& v_prime,
                                const RiemannOptions& options = {});

/// Finds v''' with w = Psi_n..Psi_{p+1}(v''') and u_star = Psi_p..Psi_1(v''').
SplitResult split_boundary_pair_reverse(const FluxModel& model, const State& w,
                                        const State& u_star, const RiemannOptions& options = {});

/// Max-norm distance used for the solvable-radius checks.
double jump_size(const FluxModel& model, const State& ul, const State& ur);

}  // namespace hyperctl
