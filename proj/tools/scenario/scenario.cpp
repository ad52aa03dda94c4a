#include "scenario.hpp"

#include "report.hpp"

#include "hyperctl/analysis.hpp"
#include "hyperctl/control.hpp"
#include "hyperctl/errors.hpp"
#include "hyperctl/fronttrack.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hyperctl::scenario {

std::string to_string(const Diagnostic& d) { return (d.path.empty() ? std::string("<root>") : d.path) + ": " + d.message; }

namespace {

const std::vector<std::string> experiments{"evolve", "riemann", "steer", "stabilize", "counterexample",
                                           "linear-control"};

using Check = std::function<bool(double)>;

// Reads one JSON object, materializing defaults and recording problems.
class Reader {
 public:
  Reader(const json* node, std::string path, std::vector<Diagnostic>& diags)
      : node_(node), path_(std::move(path)), diags_(diags) {
    if (node_ && !node_->is_object()) {
      fail("", "must be an object");
      node_ = nullptr;
    }
  }

  bool has(const std::string& key) const { return node_ && node_->contains(key); }

  double number(const std::string& key, std::optional<double> fallback, const Check& check = {},
                const std::string& requirement = "") {
    used_.insert(key);
    double v = std::numeric_limits<double>::quiet_NaN();
    if (!has(key)) {
      if (!fallback) {
        fail(key, "is required");
        return v;
      }
      v = *fallback;
    } else if (!(*node_)[key].is_number()) {
      fail(key, "must be a number");
      return v;
    } else {
      v = (*node_)[key].get<double>();
    }
    if (!std::isfinite(v)) {
      fail(key, "must be finite");
    } else if (check && !check(v)) {
      fail(key, requirement.empty() ? "out of range" : requirement);
    }
    out_[key] = v;
    return v;
  }

  long integer(const std::string& key, std::optional<long> fallback, const std::function<bool(long)>& check = {},
               const std::string& requirement = "") {
    used_.insert(key);
    long v = 0;
    if (!has(key)) {
      if (!fallback) {
        fail(key, "is required");
        return v;
      }
      v = *fallback;
    } else if (!(*node_)[key].is_number_integer()) {
      fail(key, "must be an integer");
      return v;
    } else {
      v = (*node_)[key].get<long>();
    }
    if (check && !check(v)) fail(key, requirement.empty() ? "out of range" : requirement);
    out_[key] = v;
    return v;
  }

  std::string text(const std::string& key, std::optional<std::string> fallback,
                   const std::vector<std::string>& allowed = {}) {
    used_.insert(key);
    std::string v;
    if (!has(key)) {
      if (!fallback) {
        fail(key, "is required");
        return v;
      }
      v = *fallback;
    } else if (!(*node_)[key].is_string()) {
      fail(key, "must be a string");
      return v;
    } else {
      v = (*node_)[key].get<std::string>();
    }
    if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : " | ") + a;
      fail(key, "unknown value '" + v + "' (expected " + list + ")");
    }
    out_[key] = v;
    return v;
  }

  bool boolean(const std::string& key, bool fallback) {
    used_.insert(key);
    bool v = fallback;
    if (has(key)) {
      if (!(*node_)[key].is_boolean()) {
        fail(key, "must be true or false");
      } else {
        v = (*node_)[key].get<bool>();
      }
    }
    out_[key] = v;
    return v;
  }

  std::vector<double> vector(const std::string& key, std::optional<std::vector<double>> fallback,
                             std::size_t size = 0) {
    used_.insert(key);
    std::vector<double> v;
    if (!has(key)) {
      if (!fallback) {
        fail(key, "is required");
        return v;
      }
      v = *fallback;
    } else if (!parse_vector((*node_)[key], v)) {
      fail(key, "must be an array of finite numbers");
      return {};
    }
    if (size && v.size() != size) fail(key, "must have " + std::to_string(size) + " entries");
    out_[key] = v;
    return v;
  }

  std::vector<std::vector<double>> matrix(const std::string& key,
                                          std::optional<std::vector<std::vector<double>>> fallback,
                                          std::size_t rows = 0, std::size_t cols = 0) {
    used_.insert(key);
    std::vector<std::vector<double>> m;
    if (!has(key)) {
      if (!fallback) {
        fail(key, "is required");
        return m;
      }
      m = *fallback;
    } else {
      const json& node = (*node_)[key];
      bool good = node.is_array();
      if (good) {
        for (const json& r : node) {
          std::vector<double> row;
          if (!parse_vector(r, row)) {
            good = false;
            break;
          }
          m.push_back(std::move(row));
        }
      }
      if (!good) {
        fail(key, "must be an array of numeric rows");
        return {};
      }
    }
    if (rows && m.size() != rows) fail(key, "must have " + std::to_string(rows) + " rows");
    for (const auto& r : m) {
      if (cols && r.size() != cols) {
        fail(key, "rows must have " + std::to_string(cols) + " entries");
        break;
      }
    }
    out_[key] = m;
    return m;
  }

  /// n symmetric n x n matrices; zeros when absent.
  void tensor(const std::string& key, std::size_t n) {
    used_.insert(key);
    json value = json::array();
    if (!has(key)) {
      for (std::size_t k = 0; k < n; ++k) value.push_back(std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)));
      out_[key] = value;
      return;
    }
    const json& node = (*node_)[key];
    bool good = node.is_array() && node.size() == n;
    for (std::size_t k = 0; good && k < n; ++k) {
      const json& h = node[k];
      good = h.is_array() && h.size() == n;
      for (std::size_t i = 0; good && i < n; ++i) {
        std::vector<double> row;
        good = parse_vector(h[i], row) && row.size() == n;
      }
      for (std::size_t i = 0; good && i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
          if (std::abs(h[i][j].get<double>() - h[j][i].get<double>()) > 1e-12) good = false;
        }
      }
    }
    if (!good) fail(key, "must be " + std::to_string(n) + " symmetric " + std::to_string(n) + "x" + std::to_string(n) + " matrices");
    out_[key] = node;
  }

  /// A nested object; missing objects read as empty so defaults apply.
  Reader child(const std::string& key, bool required = false) {
    used_.insert(key);
    if (!has(key) && required) fail(key, "is required");
    return Reader(has(key) ? &(*node_)[key] : nullptr, join(key), diags_);
  }

  void put(const std::string& key, json value) { out_[key] = std::move(value); }

  void fail(const std::string& key, const std::string& message) { diags_.push_back({join(key), message}); }

  /// Unknown keys are errors; returns the resolved object.
  json finish() {
    if (node_) {
      for (auto it = node_->begin(); it != node_->end(); ++it) {
        if (!used_.count(it.key())) fail(it.key(), "unknown key");
      }
    }
    return out_;
  }

  std::string join(const std::string& key) const {
    if (key.empty()) return path_;
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  static bool parse_vector(const json& node, std::vector<double>& out) {
    if (!node.is_array()) return false;
    out.clear();
    for (const json& x : node) {
      if (!x.is_number()) return false;
      const double v = x.get<double>();
      if (!std::isfinite(v)) return false;
      out.push_back(v);
    }
    return true;
  }

  const json* node_;
  std::string path_;
  std::vector<Diagnostic>& diags_;
  std::set<std::string> used_;
  json out_ = json::object();
};

auto positive = [](double x) { return x > 0.0; };
auto non_negative = [](double x) { return x >= 0.0; };

std::vector<double> linspace(double a, double b, int count) {
  std::vector<double> v;
  for (int k = 0; k < count; ++k) v.push_back(count == 1 ? a : a + (b - a) * k / (count - 1));
  return v;
}

void check_times(Reader& r, const std::string& key, const std::vector<double>& times, double horizon) {
  for (double t : times) {
    if (!(t >= 0.0 && t <= horizon)) {
      r.fail(key, "times must lie in [0, horizon]");
      return;
    }
  }
}

void check_family(Reader& r, const std::string& key, long family, std::size_t n) {
  if (family < 1 || static_cast<std::size_t>(family) > n) {
    r.fail(key, "family must be between 1 and " + std::to_string(n));
  }
}

json resolve_model(Reader m, std::size_t& n) {
  const std::string kind = m.text("kind", std::nullopt, {"linear", "gas", "custom-table"});
  std::vector<double> u_star;
  std::vector<double> lower;
  std::vector<double> upper;
  if (kind == "gas") {
    n = 2;
    m.number("K", 1.0, positive, "K must be > 0");
    m.number("gamma", 2.0, [](double g) { return g > 1.0 && g < 3.0; },
             "gamma outside the admissible range 1 < gamma < 3");
    u_star = m.vector("u_star", std::vector<double>{1.0, 0.0}, 2);
    if (u_star.size() == 2 && !(u_star[0] > 0.0)) m.fail("u_star", "density must be positive");
    if (u_star.size() == 2) {
      lower = {0.8 * u_star[0], u_star[1] - 0.15};
      upper = {1.2 * u_star[0], u_star[1] + 0.15};
    }
    m.number("curve_radius", 0.5, positive, "curve_radius must be > 0");
  } else if (kind == "linear") {
    const auto a = m.matrix("A", std::nullopt);
    n = a.size();
    if (n == 0) {
      m.fail("A", "must be a non-empty square matrix");
    } else {
      for (const auto& row : a) {
        if (row.size() != n) m.fail("A", "must be square");
      }
    }
    u_star = m.vector("u_star", std::vector<double>(n, 0.0), n);
    lower = upper = u_star;
    for (std::size_t k = 0; k < lower.size(); ++k) {
      lower[k] -= 1.0;
      upper[k] += 1.0;
    }
  } else if (kind == "custom-table") {
    u_star = m.vector("u_star", std::nullopt);
    n = u_star.size();
    if (n == 0) return m.finish();
    m.vector("constant", std::vector<double>(n, 0.0), n);
    m.matrix("linear", std::nullopt, n, n);
    m.tensor("quadratic", n);
    lower = upper = u_star;
    for (std::size_t k = 0; k < lower.size(); ++k) {
      lower[k] -= 0.2;
      upper[k] += 0.2;
    }
    m.number("curve_radius", 0.5, positive, "curve_radius must be > 0");
  } else {
    return m.finish();
  }
  Reader box = m.child("box");
  const auto lo = box.vector("lower", lower, n);
  const auto hi = box.vector("upper", upper, n);
  for (std::size_t k = 0; k < std::min(lo.size(), hi.size()); ++k) {
    if (!(lo[k] < hi[k])) {
      box.fail("upper", "box must satisfy lower < upper componentwise");
      break;
    }
  }
  m.put("box", box.finish());
  m.integer("grid", 32, [](long g) { return g >= 2 && g <= 512; }, "grid must be between 2 and 512");
  return m.finish();
}

}  // namespace

json resolve(const json& config, std::vector<Diagnostic>& diags) {
  Reader top(&config, "", diags);
  const std::string schema = top.text("schema", std::nullopt);
  if (!schema.empty() && schema != schema_id) top.fail("schema", "expected '" + std::string(schema_id) + "'");
  top.text("name", std::string("scenario"));
  const std::string experiment = top.text("experiment", std::nullopt, experiments);
  top.integer("seed", 7, [](long s) { return s >= 0 && s <= 0xffffffffL; }, "seed must be a 32-bit unsigned integer");

  std::size_t n = 0;
  if (!top.has("model")) {
    top.fail("model", "is required");
    return top.finish();
  }
  const json model = resolve_model(top.child("model"), n);
  top.put("model", model);
  if (n == 0) return top.finish();
  std::vector<double> u_star = model.value("u_star", std::vector<double>(n, 0.0));

  const auto domain = top.vector("domain", std::vector<double>{0.0, 1.0}, 2);
  if (domain.size() == 2 && !(domain[0] < domain[1])) top.fail("domain", "must satisfy a < b");
  const double a = domain.size() == 2 ? domain[0] : 0.0;
  const double b = domain.size() == 2 ? domain[1] : 1.0;

  {
    Reader t = top.child("tracking");
    t.number("epsilon", 0.01, positive, "epsilon must be > 0");
    t.number("drop_threshold", 1e-12, non_negative, "drop_threshold must be >= 0");
    t.integer("max_events", 2000000, [](long x) { return x > 0; }, "max_events must be > 0");
    top.put("tracking", t.finish());
  }
  {
    Reader r = top.child("riemann");
    r.number("radius", 0.3, positive, "radius must be > 0");
    r.number("null_threshold", 1e-12, non_negative, "null_threshold must be >= 0");
    top.put("riemann", r.finish());
  }

  const bool needs_initial = experiment == "evolve" || experiment == "stabilize" || experiment == "counterexample";
  if (needs_initial || top.has("initial")) {
    Reader init = top.child("initial", needs_initial);
    const std::string kind =
        init.text("kind", std::string("constant"), {"constant", "jumps", "dense-shocks", "rarefaction-only"});
    if (kind == "constant") {
      init.vector("state", u_star, n);
    } else if (kind == "jumps") {
      const auto xs = init.vector("breakpoints", std::nullopt);
      init.matrix("states", std::nullopt, xs.size() + 1, n);
      double prev = a;
      for (double x : xs) {
        if (!(x > prev && x < b)) {
          init.fail("breakpoints", "must be strictly increasing inside (a, b)");
          break;
        }
        prev = x;
      }
    } else {
      const bool dense = kind == "dense-shocks";
      init.integer("count", dense ? 31 : 8, [](long c) { return c >= 1 && c <= 4096; },
                   "count must be between 1 and 4096");
      init.number("budget", 0.05, positive, "budget must be > 0");
      const auto iv = init.vector("interval", std::vector<double>{a, b}, 2);
      if (iv.size() == 2 && !(iv[0] >= a && iv[1] <= b && iv[0] < iv[1])) {
        init.fail("interval", "must be a non-empty sub-interval of the domain");
      }
      init.vector("left", u_star, n);
      check_family(init, "family", init.integer("family", 1), n);
    }
    top.put("initial", init.finish());
  }

  if (experiment == "evolve") {
    Reader e = top.child("evolve");
    const double h = e.number("horizon", 1.0, positive, "horizon must be > 0");
    check_times(e, "snapshot_times", e.vector("snapshot_times", std::vector<double>{0.0, 0.5 * h, h}), h);
    Reader d = e.child("density");
    check_family(d, "family", d.integer("family", 1), n);
    d.integer("cells", 64, [](long c) { return c >= 1; }, "cells must be >= 1");
    check_times(d, "times", d.vector("times", std::vector<double>{}), h);
    d.number("probe_margin", 0.0, non_negative, "probe_margin must be >= 0");
    e.put("density", d.finish());
    e.number("upsilon_factor", 10.0, positive, "upsilon_factor must be > 0");
    e.number("glimm_strength", 0.1, positive, "glimm_strength must be > 0");
    top.put("evolve", e.finish());
  } else if (experiment == "riemann") {
    Reader r = top.child("riemann_problem", true);
    r.vector("left", std::nullopt, n);
    r.vector("right", std::nullopt, n);
    top.put("riemann_problem", r.finish());
  } else if (experiment == "steer") {
    Reader s = top.child("steer", true);
    s.vector("from", u_star, n);
    s.vector("to", std::nullopt, n);
    s.number("chain_step", 0.05, positive, "chain_step must be > 0");
    top.put("steer", s.finish());
  } else if (experiment == "stabilize") {
    Reader s = top.child("stabilize");
    s.integer("k_max", 4, [](long k) { return k >= 1 && k <= 64; }, "k_max must be between 1 and 64");
    s.number("epsilon0", 0.01, positive, "epsilon0 must be > 0");
    s.number("epsilon_factor", 0.25, [](double f) { return f > 0.0 && f <= 1.0; }, "epsilon_factor must lie in (0, 1]");
    s.number("delta0", 0.2, positive, "delta0 must be > 0");
    s.number("halt_floor", 1e-9, non_negative, "halt_floor must be >= 0");
    s.number("chain_step", 0.05, positive, "chain_step must be > 0");
    top.put("stabilize", s.finish());
  } else if (experiment == "counterexample") {
    Reader c = top.child("counterexample");
    const double h = c.number("horizon", 2.0, positive, "horizon must be > 0");
    check_times(c, "census_times", c.vector("census_times", linspace(0.0, h, 11)), h);
    std::vector<double> density_default;
    for (double t : linspace(0.2, 2.0, 10)) {
      if (t <= h) density_default.push_back(t);
    }
    check_times(c, "density_times", c.vector("density_times", density_default), h);
    c.number("strength_floor", 1e-6, non_negative, "strength_floor must be >= 0");
    const double margin = c.number("probe_margin", 0.05, non_negative, "probe_margin must be >= 0");
    if (std::isfinite(margin) && !(a + 2.0 * margin < b - 2.0 * margin)) c.fail("probe_margin", "leaves an empty probe");
    c.integer("density_cells", 64, [](long x) { return x >= 1; }, "density_cells must be >= 1");
    check_family(c, "family", c.integer("family", 1), n);
    c.number("track_threshold", 0.005, non_negative, "track_threshold must be >= 0");
    c.number("upsilon_factor", 10.0, positive, "upsilon_factor must be > 0");
    c.number("glimm_strength", 0.1, positive, "glimm_strength must be > 0");
    top.put("counterexample", c.finish());
  } else if (experiment == "linear-control") {
    if (model.value("kind", std::string()) != "linear") top.fail("model.kind", "linear-control needs a linear model");
    Reader l = top.child("linear_control", true);
    for (const char* key : {"phi", "psi"}) {
      Reader p = l.child(key, true);
      const auto xs = p.vector("breakpoints", std::vector<double>{});
      p.matrix("states", std::nullopt, xs.size() + 1, n);
      double prev = a;
      for (double x : xs) {
        if (!(x > prev && x < b)) {
          p.fail("breakpoints", "must be strictly increasing inside (a, b)");
          break;
        }
        prev = x;
      }
      l.put(key, p.finish());
    }
    l.number("horizon", std::nullopt, positive, "horizon must be > 0");
    top.put("linear_control", l.finish());
  }
  return top.finish();
}

std::vector<Diagnostic> validate(const json& config) {
  std::vector<Diagnostic> diags;
  resolve(config, diags);
  return diags;
}

json load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

namespace {

State to_state(const json& v) {
  const auto xs = v.get<std::vector<double>>();
  State u(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t k = 0; k < xs.size(); ++k) u[static_cast<Eigen::Index>(k)] = xs[k];
  return u;
}

Matrix to_matrix(const json& v) {
  const auto rows = v.get<std::vector<std::vector<double>>>();
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.empty() ? 0 : rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

json state_json(const State& u) {
  json a = json::array();
  for (Eigen::Index k = 0; k < u.size(); ++k) a.push_back(u[k]);
  return a;
}

}  // namespace

Box build_box(const json& model) {
  return {to_state(model.at("box").at("lower")), to_state(model.at("box").at("upper"))};
}

FluxModel build_model(const json& m) {
  const std::string kind = m.at("kind");
  const State u_star = to_state(m.at("u_star"));
  if (kind == "gas") {
    return FluxModel::gas(m.at("K"), m.at("gamma"), u_star).with_curve_radius(m.at("curve_radius"));
  }
  if (kind == "linear") return FluxModel::linear(to_matrix(m.at("A")), u_star);
  std::vector<Matrix> quadratic;
  for (const json& h : m.at("quadratic")) quadratic.push_back(to_matrix(h));
  return FluxModel::quadratic_table(to_state(m.at("constant")), to_matrix(m.at("linear")), quadratic, u_star)
      .with_curve_radius(m.at("curve_radius"));
}

Profile build_profile(const FluxModel& model, Interval domain, const json& spec, unsigned seed) {
  const std::string kind = spec.at("kind");
  if (kind == "constant") return Profile::constant(domain, to_state(spec.at("state")));
  if (kind == "jumps") {
    Profile p;
    p.domain = domain;
    p.breakpoints = spec.at("breakpoints").get<std::vector<double>>();
    for (const json& s : spec.at("states")) p.values.push_back(to_state(s));
    p.validate();
    return p;
  }
  const int count = spec.at("count");
  const double budget = spec.at("budget");
  const auto iv = spec.at("interval").get<std::vector<double>>();
  const State left = to_state(spec.at("left"));
  const int family = spec.at("family").get<int>() - 1;
  if (kind == "dense-shocks") {
    return dense_shock_initial_data(model, domain, count, budget, {iv[0], iv[1]}, left, family);
  }
  // Rarefaction-only data: random positive strengths summing to the budget.
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> weight(0.5, 1.5);
  std::vector<double> w(static_cast<std::size_t>(count));
  double total = 0.0;
  for (double& x : w) total += (x = weight(rng));
  Profile p;
  p.domain = domain;
  p.values.push_back(left);
  for (int j = 0; j < count; ++j) {
    p.breakpoints.push_back(iv[0] + (iv[1] - iv[0]) * (j + 1) / (count + 1));
    p.values.push_back(
        rarefaction_curve(model, p.values.back(), family, budget * w[static_cast<std::size_t>(j)] / total).state);
  }
  p.validate();
  return p;
}

namespace {

struct Output {
  std::vector<std::pair<std::string, std::string>> files;
  json metrics = json::object();
  std::string status = "ok";
  std::string message;
  int exit_code = ExitCode::ok;

  void add(std::string name, std::string content) { files.emplace_back(std::move(name), std::move(content)); }
  void violation(const std::string& what) {
    status = "invariant-violation";
    exit_code = ExitCode::invariant_violation;
    message += (message.empty() ? "" : "; ") + what;
  }
};

std::string snapshot_name(std::size_t k) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "snapshots/snapshot_%03zu.csv", k);
  return buf;
}

json hypotheses_json(const HypothesisReport& r) {
  auto check = [](const HypothesisCheck& c) {
    return json{{"applicable", c.applicable}, {"passed", c.passed}, {"margin", c.margin}};
  };
  return json{{"hyperbolic", check(r.hyperbolic)},
              {"sign_split", check(r.sign_split)},
              {"speed_floor", check(r.speed_floor)},
              {"speed_bounds", check(r.speed_bounds)},
              {"genuine_nonlinearity", check(r.genuine_nonlinearity)},
              {"wedge", check(r.wedge)},
              {"p", r.p},
              {"c0", r.c0},
              {"lambda_lower", r.lambda_lower},
              {"lambda_upper", r.lambda_upper},
              {"samples", r.samples},
              {"violations", r.violations.size()}};
}

// Largest dV + C0 dQ over logged interactions (the Glimm functional increment).
double worst_upsilon(const Simulation& sim, double c0) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const InteractionRecord& r : sim.interactions()) worst = std::max(worst, r.dv + c0 * r.dq);
  return sim.interactions().empty() ? 0.0 : worst;
}

void common_tracking_outputs(Output& out, const Simulation& sim) {
  out.add("interactions.csv", report::interactions_csv(sim.interactions()));
  out.add("functionals.csv", report::functionals_csv(sim.history()));
}

void check_upsilon(Output& out, const Simulation& sim, const FluxModel& model, const State& u_star, double strength,
                   double factor, unsigned seed) {
  const double c0 = calibrate_glimm_constant(model, u_star, strength, 200, seed);
  const double worst = worst_upsilon(sim, c0);
  const double tolerance = factor * sim.options().epsilon;
  out.metrics["glimm_constant"] = c0;
  out.metrics["upsilon_max_increment"] = worst;
  out.metrics["upsilon_tolerance"] = tolerance;
  if (worst > tolerance) out.violation("Glimm functional increased by " + report::num(worst));
}

void run_evolve(const json& cfg, const FluxModel& model, Interval domain, const TrackingOptions& tracking,
                unsigned seed, Output& out) {
  const json& e = cfg.at("evolve");
  const Profile initial = build_profile(model, domain, cfg.at("initial"), seed);
  Simulation sim(model, domain, initial, tracking);
  const double horizon = e.at("horizon");
  sim.advance_to(horizon);

  json tv = json::array();
  const auto times = e.at("snapshot_times").get<std::vector<double>>();
  for (std::size_t k = 0; k < times.size(); ++k) {
    const Snapshot s = sim.snapshot_at(times[k]);
    out.add(snapshot_name(k), report::snapshot_csv(s));
    tv.push_back(json{{"t", times[k]}, {"tv", s.profile().total_variation()}, {"fronts", s.fronts.size()}});
  }
  common_tracking_outputs(out, sim);

  const json& d = e.at("density");
  if (!d.at("times").empty()) {
    const double m = d.at("probe_margin");
    const int family = d.at("family").get<int>() - 1;
    std::vector<DensityReport> reports;
    for (double t : d.at("times").get<std::vector<double>>()) {
      reports.push_back(
          positive_wave_density(model, sim.snapshot_at(t), family, d.at("cells"), {domain.a + m, domain.b - m}));
    }
    out.add("density_f" + std::to_string(family + 1) + ".csv", report::density_csv(reports));
    out.add("density_kappa.csv", report::kappa_csv(reports));
  }

  const Vector drift = sim.snapshot().profile().integral() - initial.integral() - sim.boundary_flux_integral();
  out.metrics["snapshots"] = tv;
  out.metrics["interactions"] = sim.interactions().size();
  out.metrics["fronts_final"] = sim.fronts().size();
  out.metrics["dropped_mass"] = sim.dropped_mass();
  out.metrics["conservation_error"] = drift.norm();
  const Functionals f = sim.functionals();
  out.metrics["final"] = json{{"V", f.v}, {"Q", f.q}, {"TV", f.tv}};
  check_upsilon(out, sim, model, model.reference_state(), e.at("glimm_strength"), e.at("upsilon_factor"), seed);
}

void run_riemann(const json& cfg, const FluxModel& model, const RiemannOptions& opts, Output& out) {
  const json& r = cfg.at("riemann_problem");
  const RiemannSolution sol = solve_riemann(model, to_state(r.at("left")), to_state(r.at("right")), opts);
  out.add("riemann.csv", report::riemann_csv(sol));
  json strengths = json::array();
  for (Eigen::Index i = 0; i < sol.strengths.size(); ++i) strengths.push_back(sol.strengths[i]);
  out.metrics["strengths"] = strengths;
  out.metrics["residual"] = sol.residual;
  for (std::size_t i = 0; i < sol.waves.size(); ++i) {
    const RiemannWave& w = sol.waves[i];
    if (w.kind == WaveKind::shock) {
      const double rh = rankine_hugoniot_residual(model, sol.states[i], sol.states[i + 1], w.speed_left);
      out.metrics["rh_residual_family_" + std::to_string(i + 1)] = rh;
    }
  }
}

void run_steer(const json& cfg, const FluxModel& model, Interval domain, double tau, const TrackingOptions& tracking,
               Output& out) {
  const json& s = cfg.at("steer");
  SteeringOptions opts;
  opts.chain_step = s.at("chain_step");
  opts.tracking = tracking;
  const SteeringResult result = steer_constant_states(model, domain, tau, to_state(s.at("from")), to_state(s.at("to")), opts);
  json plan = json::object();
  plan["tau"] = result.plan.tau;
  plan["horizon"] = result.plan.horizon;
  json chain = json::array();
  for (const State& u : result.plan.chain) chain.push_back(state_json(u));
  plan["chain"] = chain;
  json actions = json::array();
  for (const ControlAction& a : result.plan.actions) {
    actions.push_back(json{{"time", a.time}, {"side", to_string(a.side)}, {"outer", state_json(a.outer)}});
  }
  plan["actions"] = actions;
  out.add("plan.json", plan.dump(2) + "\n");
  for (std::size_t k = 0; k < result.plan.chain.size(); ++k) {
    out.add(snapshot_name(k), report::snapshot_csv(result.simulation.snapshot_at(2.0 * tau * static_cast<double>(k))));
  }
  common_tracking_outputs(out, result.simulation);
  out.metrics["hops"] = result.plan.chain.size() - 1;
  out.metrics["horizon"] = result.plan.horizon;
  double worst = 0.0;
  for (double e : result.hop_errors) worst = std::max(worst, e);
  out.metrics["max_hop_error"] = worst;
  out.metrics["fronts_final"] = result.simulation.fronts().size();
}

void run_stabilize(const json& cfg, const FluxModel& model, Interval domain, double tau, const TrackingOptions& tracking,
                   unsigned seed, Output& out) {
  const json& s = cfg.at("stabilize");
  StabilizeOptions opts;
  opts.k_max = s.at("k_max");
  opts.epsilon0 = s.at("epsilon0");
  opts.epsilon_factor = s.at("epsilon_factor");
  opts.halt_floor = s.at("halt_floor");
  opts.chain_step = s.at("chain_step");
  opts.step.delta0 = s.at("delta0");
  opts.tracking = tracking;
  const Profile phi = build_profile(model, domain, cfg.at("initial"), seed);
  const StabilizeResult result = stabilize(model, domain, tau, phi, model.reference_state(), opts);
  const ContractionRecord& rec = result.record;
  out.add("contraction.csv", report::contraction_csv(rec));
  for (std::size_t k = 0; k < rec.rows.size(); ++k) {
    out.add(snapshot_name(k), report::snapshot_csv(result.simulation.snapshot_at(rec.rows[k].time)));
  }
  common_tracking_outputs(out, result.simulation);
  const DoublyExponentialFit fit = fit_doubly_exponential(rec);
  out.metrics["tau"] = tau;
  out.metrics["rows"] = rec.rows.size();
  out.metrics["measured_constant"] = rec.measured_constant();
  out.metrics["pre_phase_hops"] = rec.pre_phase_hops;
  out.metrics["doubly_exponential_fit"] = json{{"slope", fit.slope}, {"intercept", fit.intercept},
                                               {"max_residual", fit.max_residual}, {"points", fit.points}};
  int late = 0;
  int wrong = 0;
  for (const StepMetrics& m : rec.steps) {
    late += m.late_exits;
    wrong += m.wrong_side_fronts;
  }
  out.metrics["late_exits"] = late;
  out.metrics["wrong_side_fronts"] = wrong;
  if (rec.contraction_failed) out.violation("contraction failure: " + rec.diagnostics);
  if (wrong > 0) out.violation("fronts injected from the wrong side");
}

void run_counterexample(const json& cfg, const FluxModel& model, Interval domain, const TrackingOptions& tracking,
                        unsigned seed, Output& out) {
  const json& c = cfg.at("counterexample");
  const Profile initial = build_profile(model, domain, cfg.at("initial"), seed);
  Simulation sim(model, domain, initial, tracking);
  const double horizon = c.at("horizon");
  sim.advance_to(horizon);
  const double margin = c.at("probe_margin");
  const Interval probe{domain.a + 2.0 * margin, domain.b - 2.0 * margin};
  const int family = c.at("family").get<int>() - 1;
  const double floor = c.at("strength_floor");

  const auto census_times = c.at("census_times").get<std::vector<double>>();
  const std::vector<CensusReport> census = shock_census(sim, census_times, probe, floor);
  out.add("census.csv", report::census_csv(census));
  for (std::size_t k = 0; k < census_times.size(); ++k) {
    out.add(snapshot_name(k), report::snapshot_csv(sim.snapshot_at(census_times[k])));
  }

  std::vector<DensityReport> density;
  for (double t : c.at("density_times").get<std::vector<double>>()) {
    density.push_back(positive_wave_density(model, sim.snapshot_at(t), family, c.at("density_cells"), probe));
  }
  out.add("density_f" + std::to_string(family + 1) + ".csv", report::density_csv(density));
  out.add("density_kappa.csv", report::kappa_csv(density));

  const ShockCollisionStats stats = same_family_shock_collisions(sim);
  out.metrics["same_family_collisions"] = stats.collisions;
  out.metrics["sign_compliant"] = stats.compliant;
  out.metrics["weakest_emitted"] = stats.weakest_emitted;
  out.metrics["creations"] = census.empty() ? 0 : census.back().creations.size();
  const double tv0 = initial.total_variation();
  const double tv1 = sim.snapshot().profile().total_variation();
  out.metrics["tv_initial"] = tv0;
  out.metrics["tv_horizon"] = tv1;
  out.metrics["tv_ratio"] = tv0 > 0.0 ? tv1 / tv0 : 0.0;

  // Persistence of the strongest shock, and of every initially strong one.
  const double threshold = c.at("track_threshold");
  int vanished = 0;
  int tracked = 0;
  for (const Lineage& l : sim.lineages()) {
    if (l.samples.empty() || l.samples.front().time > 0.0 || l.samples.front().strength < threshold * (1.0 - 1e-9)) continue;
    ++tracked;
    if (l.end == LineageEnd::cancelled && l.end_time <= horizon) ++vanished;
  }
  out.metrics["tracked_shocks"] = tracked;
  out.metrics["vanished_shocks"] = vanished;
  if (const auto id = strongest_lineage(sim, family, 0.0)) {
    const ShockTrack track = track_shock_strength(sim, *id, 0.0, horizon);
    out.add("lineage.csv", report::lineage_csv(track));
    out.metrics["persistence_constant"] = track.min_ratio;
    out.metrics["persistence_end"] = to_string(track.end);
  }
  double kappa = 0.0;
  for (const DensityReport& r : density) kappa = std::max(kappa, r.kappa_hat);
  out.metrics["kappa_hat_max"] = kappa;
  common_tracking_outputs(out, sim);
  check_upsilon(out, sim, model, model.reference_state(), c.at("glimm_strength"), c.at("upsilon_factor"), seed);
  if (stats.compliant != stats.collisions) out.violation("same-family shock collision without an opposite-family shock");
}

void run_linear_control(const json& cfg, const FluxModel& model, Interval domain, Output& out) {
  const json& l = cfg.at("linear_control");
  auto profile = [&](const json& spec) {
    Profile p;
    p.domain = domain;
    p.breakpoints = spec.at("breakpoints").get<std::vector<double>>();
    for (const json& s : spec.at("states")) p.values.push_back(to_state(s));
    p.validate();
    return p;
  };
  const Profile phi = profile(l.at("phi"));
  const Profile psi = profile(l.at("psi"));
  const double horizon = l.at("horizon");
  const LinearControlSolution sol = linear_exact_control(model.linear_matrix(), domain, phi, psi, horizon);
  const Profile start = sol.at(0.0);
  const Profile end = sol.at(horizon);
  out.add("snapshots/initial.csv", report::profile_csv(start));
  out.add("snapshots/terminal.csv", report::profile_csv(end));
  out.add("boundary.csv", report::boundary_csv(sol.boundary_data()));
  // Reconstruction error against psi, sampled at every cell midpoint of both profiles.
  double error = 0.0;
  std::vector<double> cuts = end.breakpoints;
  cuts.insert(cuts.end(), psi.breakpoints.begin(), psi.breakpoints.end());
  cuts.push_back(domain.a);
  cuts.push_back(domain.b);
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t k = 1; k < cuts.size(); ++k) {
    if (cuts[k] - cuts[k - 1] < 1e-9) continue;
    const double x = 0.5 * (cuts[k] + cuts[k - 1]);
    error = std::max(error, (end.at(x) - psi.at(x)).cwiseAbs().maxCoeff());
  }
  out.metrics["terminal_error"] = error;
  out.metrics["horizon"] = horizon;
}

}  // namespace

RunOutcome run(json config, const RunOptions& options) {
  RunOutcome outcome;
  if (options.epsilon) config["tracking"]["epsilon"] = *options.epsilon;
  if (options.seed) config["seed"] = *options.seed;
  std::vector<Diagnostic> diags;
  const json cfg = resolve(config, diags);
  if (!diags.empty()) {
    outcome.exit_code = ExitCode::config_error;
    for (const Diagnostic& d : diags) outcome.message += to_string(d) + "\n";
    return outcome;
  }

  const std::string experiment = cfg.at("experiment");
  const unsigned seed = cfg.at("seed").get<unsigned>();
  const Interval domain{cfg.at("domain")[0].get<double>(), cfg.at("domain")[1].get<double>()};

  Output out;
  json hypotheses;
  try {
    const FluxModel model = build_model(cfg.at("model"));
    const Box box = build_box(cfg.at("model"));
    HypothesisOptions hopts;
    hopts.grid_per_axis = cfg.at("model").at("grid");
    const HypothesisReport hyp = verify_hypotheses(model, box, hopts);
    hypotheses = hypotheses_json(hyp);

    TrackingOptions tracking;
    tracking.epsilon = cfg.at("tracking").at("epsilon");
    tracking.drop_threshold = cfg.at("tracking").at("drop_threshold");
    tracking.max_events = cfg.at("tracking").at("max_events").get<std::size_t>();
    tracking.riemann.radius = cfg.at("riemann").at("radius");
    tracking.riemann.null_threshold = cfg.at("riemann").at("null_threshold");

    const bool control = experiment == "steer" || experiment == "stabilize";
    if (control && !hyp.admits_control()) {
      outcome.exit_code = ExitCode::config_error;
      outcome.message = "model.box: the model violates the standing hypotheses on the box\n";
      return outcome;
    }
    if (experiment == "counterexample" && !hyp.admits_analysis()) {
      outcome.exit_code = ExitCode::config_error;
      outcome.message = "model.box: the model violates the structural hypotheses on the box\n";
      return outcome;
    }
    double tau = 0.0;
    if (control) {
      tau = crossing_time(model, domain, box, cfg.at("model").at("grid"));
      out.metrics["tau"] = tau;
    }

    if (experiment == "evolve") {
      run_evolve(cfg, model, domain, tracking, seed, out);
    } else if (experiment == "riemann") {
      run_riemann(cfg, model, tracking.riemann, out);
    } else if (experiment == "steer") {
      run_steer(cfg, model, domain, tau, tracking, out);
    } else if (experiment == "stabilize") {
      run_stabilize(cfg, model, domain, tau, tracking, seed, out);
    } else if (experiment == "counterexample") {
      run_counterexample(cfg, model, domain, tracking, seed, out);
    } else {
      run_linear_control(cfg, model, domain, out);
    }
  } catch (const PreconditionError& e) {
    outcome.exit_code = ExitCode::config_error;
    outcome.message = std::string("precondition: ") + e.what() + "\n";
    return outcome;
  } catch (const InvariantViolation& e) {
    outcome.exit_code = ExitCode::invariant_violation;
    outcome.message = std::string("invariant violation: ") + e.what() + "\n";
    return outcome;
  } catch (const ContractViolation& e) {
    outcome.exit_code = ExitCode::invariant_violation;
    outcome.message = std::string("contract violation: ") + e.what() + "\n";
    return outcome;
  } catch (const Error& e) {
    outcome.exit_code = ExitCode::divergence;
    outcome.message = std::string("solver failure: ") + e.what() + "\n";
    return outcome;
  }

  json manifest = json::object();
  manifest["schema"] = "hyperctl.manifest/v1";
  manifest["name"] = cfg.at("name");
  manifest["experiment"] = experiment;
  manifest["status"] = out.status;
  if (!out.message.empty()) manifest["message"] = out.message;
  manifest["conventions"] = json{
      {"families", "1-based in every file"},
      {"strength", "signed jump of the family's Riemann coordinate (gas, linear); left-eigenvector projection "
                   "for table models"},
      {"total_variation", "sum of Euclidean jumps of the profile"},
      {"budget", "sum of |strength| of the initial jumps"},
      {"delta", "max(sup distance to u_star, total variation)"}};
  manifest["hypotheses"] = hypotheses;
  manifest["metrics"] = out.metrics;
  json files = json::array();
  for (const auto& f : out.files) files.push_back(f.first);
  manifest["files"] = files;
  manifest["config"] = cfg;

  std::filesystem::create_directories(options.out);
  for (const auto& [name, content] : out.files) {
    const std::filesystem::path p = options.out / name;
    std::filesystem::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << content;
    outcome.files.push_back(name);
  }
  std::ofstream(options.out / "manifest.json", std::ios::binary) << manifest.dump(2) << "\n";
  outcome.files.push_back("manifest.json");
  outcome.manifest = std::move(manifest);
  outcome.exit_code = out.exit_code;
  outcome.message = out.message;
  return outcome;
}

RunOutcome run_file(const std::filesystem::path& config, const RunOptions& options) {
  json cfg;
  try {
    cfg = load(config);
  } catch (const std::exception& e) {
    RunOutcome o;
    o.exit_code = ExitCode::config_error;
    o.message = std::string(e.what()) + "\n";
    return o;
  }
  return run(std::move(cfg), options);
}

}  // namespace hyperctl::scenario
