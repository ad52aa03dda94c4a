#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace hyperctl::report {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Csv::Csv(std::vector<std::string> header) : width_(header.size()) { row(header); }

Csv& Csv::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw std::logic_error("csv row width mismatch");
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) text_ += ',';
    text_ += cells[k];
  }
  text_ += '\n';
  return *this;
}

std::string join_ids(const std::vector<FrontSummary>& fronts) {
  std::string s;
  for (const FrontSummary& f : fronts) {
    if (!s.empty()) s += ';';
    s += std::to_string(f.id);
  }
  return s;
}

namespace {

std::vector<std::string> state_header(std::size_t n) {
  std::vector<std::string> h;
  for (std::size_t k = 0; k < n; ++k) h.push_back("u" + std::to_string(k));
  return h;
}

void append_state(std::vector<std::string>& cells, const State& u) {
  for (Eigen::Index k = 0; k < u.size(); ++k) cells.push_back(num(u[k]));
}

}  // namespace

std::string profile_csv(const Profile& p) {
  std::vector<std::string> header{"x_left", "x_right"};
  for (const auto& h : state_header(static_cast<std::size_t>(p.values.front().size()))) header.push_back(h);
  Csv csv(header);
  for (std::size_t k = 0; k < p.cells(); ++k) {
    std::vector<std::string> cells{num(p.cell_left(k)), num(p.cell_right(k))};
    append_state(cells, p.values[k]);
    csv.row(cells);
  }
  return csv.str();
}

std::string snapshot_csv(const Snapshot& snapshot) { return profile_csv(snapshot.profile()); }

std::string interactions_csv(const std::vector<InteractionRecord>& records) {
  Csv csv({"t", "x", "in_ids", "out_ids", "dV", "dQ"});
  for (const InteractionRecord& r : records) {
    csv.row({num(r.time), num(r.position), join_ids(r.incoming), join_ids(r.outgoing), num(r.dv), num(r.dq)});
  }
  return csv.str();
}

std::string functionals_csv(const std::vector<FunctionalSample>& history) {
  Csv csv({"t", "V", "Q", "TV"});
  for (const FunctionalSample& s : history) csv.row({num(s.time), num(s.values.v), num(s.values.q), num(s.values.tv)});
  return csv.str();
}

std::string contraction_csv(const ContractionRecord& record) {
  Csv csv({"k", "t", "sup_dist", "tv", "ratio"});
  for (const ContractionRow& r : record.rows) {
    csv.row({std::to_string(r.k), num(r.time), num(r.sup_distance), num(r.total_variation), num(r.ratio)});
  }
  return csv.str();
}

std::string density_csv(const std::vector<DensityReport>& reports) {
  Csv csv({"t", "family", "x_left", "x_right", "density"});
  for (const DensityReport& r : reports) {
    const double width = r.probe.length() / static_cast<double>(r.density.size());
    for (std::size_t k = 0; k < r.density.size(); ++k) {
      const double lo = r.probe.a + width * static_cast<double>(k);
      csv.row({num(r.time), std::to_string(r.family + 1), num(lo), num(lo + width), num(r.density[k])});
    }
  }
  return csv.str();
}

std::string kappa_csv(const std::vector<DensityReport>& reports) {
  Csv csv({"t", "family", "max_density", "kappa_hat"});
  for (const DensityReport& r : reports) {
    csv.row({num(r.time), std::to_string(r.family + 1), num(r.max_density), num(r.kappa_hat)});
  }
  return csv.str();
}

std::string census_csv(const std::vector<CensusReport>& reports) {
  Csv csv({"t", "family", "shocks", "largest_gap", "creations", "tv"});
  for (const CensusReport& r : reports) {
    for (std::size_t i = 0; i < r.shocks.size(); ++i) {
      csv.row({num(r.time), std::to_string(i + 1), std::to_string(r.shocks[i].size()), num(r.largest_gap[i]),
               std::to_string(r.creations.size()), num(r.total_variation)});
    }
  }
  return csv.str();
}

std::string lineage_csv(const ShockTrack& track) {
  Csv csv({"t", "x", "strength", "front"});
  for (const LineageSample& s : track.samples) {
    csv.row({num(s.time), num(s.position), num(s.strength), std::to_string(s.front)});
  }
  return csv.str();
}

std::string riemann_csv(const RiemannSolution& sol) {
  const auto n = static_cast<std::size_t>(sol.strengths.size());
  std::vector<std::string> header{"family", "sigma", "kind", "speed_left", "speed_right"};
  for (const auto& h : state_header(n)) header.push_back("left_" + h);
  for (const auto& h : state_header(n)) header.push_back("right_" + h);
  Csv csv(header);
  for (std::size_t i = 0; i < sol.waves.size(); ++i) {
    const RiemannWave& w = sol.waves[i];
    std::vector<std::string> cells{std::to_string(w.family + 1), num(w.sigma), to_string(w.kind), num(w.speed_left),
                                   num(w.speed_right)};
    append_state(cells, sol.states[i]);
    append_state(cells, sol.states[i + 1]);
    csv.row(cells);
  }
  return csv.str();
}

std::string boundary_csv(const std::vector<BoundarySignal>& signals) {
  Csv csv({"family", "side", "t_left", "t_right", "value"});
  for (const BoundarySignal& s : signals) {
    const ScalarProfile& v = s.values;
    for (std::size_t k = 0; k < v.values.size(); ++k) {
      const double lo = k == 0 ? v.left : v.breakpoints[k - 1];
      const double hi = k + 1 == v.values.size() ? v.right : v.breakpoints[k];
      csv.row({std::to_string(s.family + 1), to_string(s.side), num(lo), num(hi), num(v.values[k])});
    }
  }
  return csv.str();
}

std::string curve_csv(const std::vector<std::pair<std::string, CurvePoint>>& points) {
  const std::size_t n = points.empty() ? 0 : static_cast<std::size_t>(points.front().second.state.size());
  std::vector<std::string> header{"branch", "sigma"};
  for (const auto& h : state_header(n)) header.push_back(h);
  header.push_back("speed");
  Csv csv(header);
  for (const auto& [branch, p] : points) {
    std::vector<std::string> cells{branch, num(p.sigma)};
    append_state(cells, p.state);
    cells.push_back(num(p.speed));
    csv.row(cells);
  }
  return csv.str();
}

}  // namespace hyperctl::report
