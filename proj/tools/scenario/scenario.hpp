#pragma once

#include "hyperctl/flux_models.hpp"
#include "hyperctl/profile.hpp"

#include "json.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hyperctl::scenario {

using json = nlohmann::ordered_json;

inline constexpr const char* schema_id = "hyperctl.scenario/v1";

enum ExitCode : int { ok = 0, config_error = 2, divergence = 3, invariant_violation = 4 };

struct Diagnostic {
  std::string path;
  std::string message;
};

std::string to_string(const Diagnostic& d);

/// Checks `config` and returns it with every default filled in. Problems are
/// appended to `diagnostics`; the returned document is only meaningful when
/// no diagnostic was produced.
json resolve(const json& config, std::vector<Diagnostic>& diagnostics);

std::vector<Diagnostic> validate(const json& config);

/// Reads a JSON document; throws std::runtime_error with a readable message.
json load(const std::filesystem::path& path);

FluxModel build_model(const json& model_block);
Box build_box(const json& model_block);
Profile build_profile(const FluxModel& model, Interval domain, const json& spec, unsigned seed);

struct RunOptions {
  std::filesystem::path out = "out";
  std::optional<double> epsilon;
  std::optional<unsigned> seed;
  bool quiet = true;
};

struct RunOutcome {
  int exit_code = ExitCode::ok;
  std::string message;
  /// Relative paths of the files written, in write order.
  std::vector<std::string> files;
  json manifest;
};

/// Runs a scenario. Outputs are produced in memory and written only once the
/// experiment has finished; a configuration error writes nothing.
RunOutcome run(json config, const RunOptions& options);
RunOutcome run_file(const std::filesystem::path& config, const RunOptions& options);

}  // namespace hyperctl::scenario
