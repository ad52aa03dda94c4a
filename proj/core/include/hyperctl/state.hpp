#pragma once

#include <Eigen/Dense>

#include <vector>

namespace hyperctl {

/// A point of the state space. For the gas model component 0 is the
/// density and component 1 the velocity.
using State = Eigen::VectorXd;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Closed interval [a, b] of the physical line.
struct Interval {
  double a = 0.0;
  double b = 1.0;

  double length() const { return b - a; }
  bool contains(double x) const { return x >= a && x <= b; }
};

enum class Side { left, right };

inline const char* to_string(Side side) { return side == Side::left ? "a" : "b"; }

/// Axis-aligned box of states, used both for the physical domain and for
/// the compact sets on which hypotheses and crossing times are sampled.
struct Box {
  State lower;
  State upper;

  bool contains(const State& u) const {
    for (Eigen::Index k = 0; k < u.size(); ++k) {
      if (!(u[k] >= lower[k] && u[k] <= upper[k])) return false;
    }
    return true;
  }

  /// Uniform tensor grid with `per_axis` points per component (endpoints included).
  std::vector<State> grid(int per_axis) const;
};

}  // namespace hyperctl
