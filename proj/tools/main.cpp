#include "scenario/plots.hpp"
#include "scenario/report.hpp"
#include "scenario/scenario.hpp"

#include "hyperctl/errors.hpp"
#include "hyperctl/riemann.hpp"
#include "hyperctl/wave_curves.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

using namespace hyperctl;
namespace sc = hyperctl::scenario;

namespace {

State parse_state(const std::vector<double>& xs) {
  State u(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t k = 0; k < xs.size(); ++k) u[static_cast<Eigen::Index>(k)] = xs[k];
  return u;
}

// Loads and resolves a config, printing diagnostics. Returns false on error.
bool load_resolved(const std::string& path, sc::json& resolved) {
  sc::json cfg;
  try {
    cfg = sc::load(path);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return false;
  }
  std::vector<sc::Diagnostic> diags;
  resolved = sc::resolve(cfg, diags);
  for (const auto& d : diags) std::cerr << sc::to_string(d) << "\n";
  return diags.empty();
}

std::string state_text(const State& u) {
  std::string s = "(";
  for (Eigen::Index k = 0; k < u.size(); ++k) s += (k ? ", " : "") + report::num(u[k]);
  return s + ")";
}

int cmd_riemann(const std::string& config, std::vector<double> left, std::vector<double> right, bool as_json) {
  sc::json cfg;
  if (!load_resolved(config, cfg)) return sc::config_error;
  if (left.empty() && cfg.contains("riemann_problem")) left = cfg["riemann_problem"]["left"].get<std::vector<double>>();
  if (right.empty() && cfg.contains("riemann_problem")) right = cfg["riemann_problem"]["right"].get<std::vector<double>>();
  const FluxModel model = sc::build_model(cfg["model"]);
  if (left.size() != static_cast<std::size_t>(model.size()) || right.size() != left.size()) {
    std::cerr << "riemann: --left and --right need " << model.size() << " components\n";
    return sc::config_error;
  }
  RiemannOptions opts;
  opts.radius = cfg["riemann"]["radius"];
  opts.null_threshold = cfg["riemann"]["null_threshold"];
  try {
    const RiemannSolution sol = solve_riemann(model, parse_state(left), parse_state(right), opts);
    if (as_json) {
      sc::json out = sc::json::object();
      out["residual"] = sol.residual;
      sc::json waves = sc::json::array();
      for (std::size_t i = 0; i < sol.waves.size(); ++i) {
        const RiemannWave& w = sol.waves[i];
        std::vector<double> l(sol.states[i].data(), sol.states[i].data() + sol.states[i].size());
        std::vector<double> r(sol.states[i + 1].data(), sol.states[i + 1].data() + sol.states[i + 1].size());
        waves.push_back(sc::json{{"family", w.family + 1}, {"sigma", w.sigma}, {"kind", to_string(w.kind)},
                                 {"speed_left", w.speed_left}, {"speed_right", w.speed_right},
                                 {"left", l}, {"right", r}});
      }
      out["waves"] = waves;
      std::cout << out.dump(2) << "\n";
    } else {
      std::printf("%-6s %-24s %-12s %-24s %-24s %s\n", "family", "sigma", "kind", "speed_left", "speed_right", "right state");
      for (std::size_t i = 0; i < sol.waves.size(); ++i) {
        const RiemannWave& w = sol.waves[i];
        std::printf("%-6d %-24s %-12s %-24s %-24s %s\n", w.family + 1, report::num(w.sigma).c_str(), to_string(w.kind),
                    report::num(w.speed_left).c_str(), report::num(w.speed_right).c_str(),
                    state_text(sol.states[i + 1]).c_str());
      }
      std::printf("residual %s\n", report::num(sol.residual).c_str());
    }
  } catch (const PreconditionError& e) {
    std::cerr << "riemann: " << e.what() << "\n";
    return sc::config_error;
  } catch (const Error& e) {
    std::cerr << "riemann: " << e.what() << "\n";
    return sc::divergence;
  }
  return sc::ok;
}

int cmd_curves(const std::string& config, int family, double radius, int samples, std::vector<double> base,
               const std::string& out) {
  sc::json cfg;
  if (!load_resolved(config, cfg)) return sc::config_error;
  const FluxModel model = sc::build_model(cfg["model"]);
  if (family < 1 || family > model.size()) {
    std::cerr << "curves: --family must be between 1 and " << model.size() << "\n";
    return sc::config_error;
  }
  const State u0 = base.empty() ? model.reference_state() : parse_state(base);
  if (u0.size() != model.size()) {
    std::cerr << "curves: --base needs " << model.size() << " components\n";
    return sc::config_error;
  }
  std::vector<std::pair<std::string, CurvePoint>> points;
  try {
    for (int k = 0; k < samples; ++k) {
      const double s = samples == 1 ? 0.0 : -radius + 2.0 * radius * k / (samples - 1);
      points.emplace_back("rarefaction", rarefaction_curve(model, u0, family - 1, s));
    }
    for (int k = 0; k < samples; ++k) {
      const double s = samples == 1 ? 0.0 : -radius + 2.0 * radius * k / (samples - 1);
      points.emplace_back("shock", shock_curve(model, u0, family - 1, s));
    }
  } catch (const Error& e) {
    std::cerr << "curves: " << e.what() << "\n";
    return sc::divergence;
  }
  const std::string text = report::curve_csv(points);
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    std::ofstream(out, std::ios::binary) << text;
  }
  return sc::ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hyperctl: front tracking and boundary control experiments"};
  app.require_subcommand(1);

  std::string config;
  std::string out = "out";
  std::optional<double> epsilon;
  std::optional<unsigned> seed;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "Run a scenario and write its reports");
  run->add_option("--config", config, "Scenario file (JSON)")->required();
  run->add_option("--out", out, "Output directory");
  run->add_option("--epsilon", epsilon, "Override tracking.epsilon");
  run->add_option("--seed", seed, "Override the seed");
  run->add_flag("--quiet", quiet, "Print nothing on success");

  auto* validate = app.add_subcommand("validate", "Check a scenario without running it");
  validate->add_option("--config", config, "Scenario file (JSON)")->required();
  validate->add_flag("--quiet", quiet, "Print nothing when valid");

  std::vector<double> left;
  std::vector<double> right;
  bool as_json = false;
  auto* riemann = app.add_subcommand("riemann", "Solve one Riemann problem for the model of a scenario");
  riemann->add_option("--config", config, "Scenario file (JSON)")->required();
  riemann->add_option("--left", left, "Left state")->delimiter(',');
  riemann->add_option("--right", right, "Right state")->delimiter(',');
  riemann->add_flag("--json", as_json, "Print JSON instead of a table");

  int family = 1;
  double radius = 0.2;
  int samples = 41;
  std::vector<double> base;
  std::string curve_out;
  auto* curves = app.add_subcommand("curves", "Sample the wave curves of one family to CSV");
  curves->add_option("--config", config, "Scenario file (JSON)")->required();
  curves->add_option("--family", family, "Family (1-based)");
  curves->add_option("--radius", radius, "Sample sigma in [-radius, radius]")->check(CLI::PositiveNumber);
  curves->add_option("--samples", samples, "Points per branch")->check(CLI::Range(1, 100000));
  curves->add_option("--base", base, "Base state (default: u_star)")->delimiter(',');
  curves->add_option("--out", curve_out, "Output CSV (default: stdout)");

  std::string run_dir;
  auto* plots = app.add_subcommand("plots", "Write gnuplot data files from a run directory");
  plots->add_option("--run", run_dir, "Directory written by `run`")->required();
  plots->add_option("--out", out, "Output directory for .dat files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sc::config_error;
  }

  if (*run) {
    sc::RunOptions opts;
    opts.out = out;
    opts.epsilon = epsilon;
    opts.seed = seed;
    opts.quiet = quiet;
    const sc::RunOutcome outcome = sc::run_file(config, opts);
    if (outcome.exit_code != sc::ok) {
      std::cerr << outcome.message;
    } else if (!quiet) {
      std::cout << "wrote " << outcome.files.size() << " files to " << out << "\n";
    }
    return outcome.exit_code;
  }
  if (*validate) {
    sc::json cfg;
    try {
      cfg = sc::load(config);
    } catch (const std::exception& e) {
      std::cerr << e.what() << "\n";
      return sc::config_error;
    }
    const auto diags = sc::validate(cfg);
    for (const auto& d : diags) std::cout << sc::to_string(d) << "\n";
    if (diags.empty() && !quiet) std::cout << "ok\n";
    return diags.empty() ? sc::ok : sc::config_error;
  }
  if (*riemann) return cmd_riemann(config, left, right, as_json);
  if (*curves) return cmd_curves(config, family, radius, samples, base, curve_out);
  if (*plots) {
    try {
      for (const auto& f : sc::write_plots(run_dir, out)) std::cout << f << "\n";
    } catch (const std::exception& e) {
      std::cerr << e.what() << "\n";
      return sc::config_error;
    }
  }
  return sc::ok;
}
