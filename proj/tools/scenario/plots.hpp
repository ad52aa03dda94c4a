#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace hyperctl::scenario {

/// Turns the CSV files of a finished run into whitespace-separated data
/// files for gnuplot: kappa.dat (t, kappa_hat), loglog.dat (k, log log 1/delta),
/// census_gap.dat (t, family, largest gap). Returns the files written;
/// throws std::runtime_error when the run directory holds none of the inputs.
std::vector<std::string> write_plots(const std::filesystem::path& run_dir, const std::filesystem::path& out_dir);

}  // namespace hyperctl::scenario
