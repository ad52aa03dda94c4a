#pragma once

#include "hyperctl/state.hpp"

#include <vector>

namespace hyperctl {

/// Right-continuous piecewise-constant function on [a, b].
///
/// `breakpoints` are the interior jump locations, strictly increasing and
/// inside (a, b); `values[k]` is the state on the k-th cell, so there is
/// always one more value than breakpoints.
struct Profile {
  Interval domain;
  std::vector<double> breakpoints;
  std::vector<State> values;

  static Profile constant(Interval domain, const State& value);

  State at(double x) const;
  std::size_t cells() const { return values.size(); }
  double cell_left(std::size_t k) const { return k == 0 ? domain.a : breakpoints[k - 1]; }
  double cell_right(std::size_t k) const {
    return k + 1 == values.size() ? domain.b : breakpoints[k];
  }

  double total_variation() const;
  double sup_distance(const State& target) const;
  Vector integral() const;

  /// Throws ContractViolation when the layout invariants do not hold.
  void validate() const;
};

/// Scalar counterpart of Profile on an arbitrary line segment.
struct ScalarProfile {
  double left = 0.0;
  double right = 0.0;
  std::vector<double> breakpoints;
  std::vector<double> values;

  double at(double x) const;
};

}  // namespace hyperctl
