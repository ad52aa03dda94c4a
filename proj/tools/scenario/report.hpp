#pragma once

#include "hyperctl/analysis.hpp"
#include "hyperctl/control.hpp"
#include "hyperctl/fronttrack.hpp"
#include "hyperctl/wave_curves.hpp"

#include <string>
#include <utility>
#include <vector>

namespace hyperctl::report {

/// 17 significant digits; "nan" / "inf" spelled out.
std::string num(double x);

/// Small CSV builder; every row must match the header width.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header);
  Csv& row(const std::vector<std::string>& cells);
  const std::string& str() const { return text_; }

 private:
  std::size_t width_;
  std::string text_;
};

std::string join_ids(const std::vector<FrontSummary>& fronts);

std::string snapshot_csv(const Snapshot& snapshot);
std::string interactions_csv(const std::vector<InteractionRecord>& records);
std::string functionals_csv(const std::vector<FunctionalSample>& history);
std::string contraction_csv(const ContractionRecord& record);
std::string density_csv(const std::vector<DensityReport>& reports);
std::string kappa_csv(const std::vector<DensityReport>& reports);
std::string census_csv(const std::vector<CensusReport>& reports);
std::string lineage_csv(const ShockTrack& track);
std::string riemann_csv(const RiemannSolution& solution);
std::string boundary_csv(const std::vector<BoundarySignal>& signals);
std::string profile_csv(const Profile& profile);
/// Columns: branch, sigma, state components, speed.
std::string curve_csv(const std::vector<std::pair<std::string, CurvePoint>>& points);

}  // namespace hyperctl::report
