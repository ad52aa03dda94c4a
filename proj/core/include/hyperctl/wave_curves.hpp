#pragma once

#include "hyperctl/flux_models.hpp"

namespace hyperctl {

/// A point on a wave curve through some base state.
struct CurvePoint {
  State state;
  /// Shock speed on the shock branch; characteristic speed lambda_i(state)
  /// on the rarefaction branch.
  double speed = 0.0;
  double sigma = 0.0;
};

/// Strength parameter convention: for models with Riemann coordinates sigma
/// is the jump of w_i across the wave; otherwise it is arclength along the
/// unit eigenvector on the rarefaction branch and the projection
/// l_i(u0).(S - u0) on the shock branch.
struct CurveOptions {
  double ode_tolerance = 1e-10;
  double newton_tolerance = 1e-12;
  int newton_max_iterations = 50;
};

/// R_i(sigma)(u0). Uses the Riemann chart when the model has one and the
/// adaptive ODE integration of r_i otherwise.
CurvePoint rarefaction_curve(const FluxModel& model, const State& u0, int i, double sigma,
                             const CurveOptions& options = {});

/// Integral curve of r_i by an embedded Runge-Kutta 5(4) pair with step
/// control. Always integrates, even when the model has a closed-form chart.
State integrate_rarefaction(const FluxModel& model, const State& u0, int i, double sigma,
                            double tolerance = 1e-10);

/// S_i(sigma)(u0) by Newton iteration on the Rankine-Hugoniot system plus
/// the strength normalisation. Throws DivergenceError beyond the curve
/// radius or when Newton fails.
CurvePoint shock_curve(const FluxModel& model, const State& u0, int i, double sigma,
                       const CurveOptions& options = {});

/// Composite curve: rarefaction branch for sigma >= 0, shock branch otherwise.
/// Linearly degenerate families use the integral curve on both sides.
CurvePoint lax_curve(const FluxModel& model, const State& u0, int i, double sigma,
                     const CurveOptions& options = {});

/// |f(ur) - f(ul) - s (ur - ul)|.
double rankine_hugoniot_residual(const FluxModel& model, const State& ul, const State& ur,
                                 double speed);

/// Third-order coefficient c_i(0) describing how the i-shock curve leaves the
/// rarefaction curve through u0 in the direction of the other eigenvector:
/// S_i(s) = R_i(s) + c_i(s) s^3/6 r_j(u0), with R_i parametrised so that
/// lambda_i grows at unit rate. 2x2 models only.
double shock_deviation_coefficient(const FluxModel& model, const State& u0, int i,
                                   double fd_step = 1e-5);

}  // namespace hyperctl
