#pragma once

#include "hyperctl/state.hpp"

#include <functional>

namespace hyperctl {

struct NewtonOptions {
  double residual_tolerance = 1e-12;
  double step_tolerance = 1e-14;
  double fd_step = 1e-7;
  int max_iterations = 50;
  int max_backtracks = 30;
};

struct NewtonResult {
  Vector x;
  double residual = 0.0;
  int iterations = 0;
};

/// Damped Newton iteration on F(x) = 0 with a forward-difference Jacobian.
///
/// The residual callback may throw DomainError for trial points outside the
/// admissible set; such points are treated as a failed line-search step.
/// Throws DivergenceError when neither tolerance is met.
NewtonResult newton_solve(const std::function<Vector(const Vector&)>& residual, Vector x0,
                          const NewtonOptions& options = {});

}  // namespace hyperctl
