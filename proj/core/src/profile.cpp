#include "hyperctl/profile.hpp"

#include "hyperctl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hyperctl {

std::vector<State> Box::grid(int per_axis) const {
  const auto n = lower.size();
  const int m = std::max(per_axis, 1);
  std::vector<State> points;
  std::vector<int> index(static_cast<std::size_t>(n), 0);
  while (true) {
    State u(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double s = m == 1 ? 0.5 : static_cast<double>(index[static_cast<std::size_t>(k)]) / (m - 1);
      u[k] = lower[k] + s * (upper[k] - lower[k]);
    }
    points.push_back(std::move(u));
    Eigen::Index k = 0;
    while (k < n && ++index[static_cast<std::size_t>(k)] == m) {
      index[static_cast<std::size_t>(k)] = 0;
      ++k;
    }
    if (k == n) break;
  }
  return points;
}

Profile Profile::constant(Interval domain, const State& value) {
  return Profile{domain, {}, {value}};
}

State Profile::at(double x) const {
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
  return values[static_cast<std::size_t>(it - breakpoints.begin())];
}

double Profile::total_variation() const {
  double tv = 0.0;
  for (std::size_t k = 1; k < values.size(); ++k) tv += (values[k] - values[k - 1]).norm();
  return tv;
}

double Profile::sup_distance(const State& target) const {
  double d = 0.0;
  for (const auto& v : values) d = std::max(d, (v - target).norm());
  return d;
}

Vector Profile::integral() const {
  Vector total = Vector::Zero(values.front().size());
  for (std::size_t k = 0; k < values.size(); ++k) total += (cell_right(k) - cell_left(k)) * values[k];
  return total;
}

void Profile::validate() const {
  if (!(domain.b > domain.a)) throw ContractViolation("profile domain must satisfy a < b");
  if (values.size() != breakpoints.size() + 1) {
    throw ContractViolation("profile needs exactly one more value than breakpoints");
  }
  double previous = domain.a;
  for (double x : breakpoints) {
    if (!(x > previous) || !(x < domain.b)) {
      throw ContractViolation("profile breakpoints must be strictly increasing inside (a, b), got " +
                              fmt_num(x));
    }
    previous = x;
  }
  const auto n = values.front().size();
  for (const auto& v : values) {
    if (v.size() != n || !v.allFinite()) throw ContractViolation("profile values must be finite states of one size");
  }
}

double ScalarProfile::at(double x) const {
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
  return values[static_cast<std::size_t>(it - breakpoints.begin())];
}

}  // namespace hyperctl
