#include "plots.hpp"

#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace hyperctl::scenario {

namespace {

struct Table {
  std::map<std::string, std::size_t> column;
  std::vector<std::vector<std::string>> rows;

  double value(const std::vector<std::string>& row, const std::string& name) const {
    return std::stod(row.at(column.at(name)));
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

bool read_table(const std::filesystem::path& path, Table& table) {
  std::ifstream in(path);
  if (!in) return false;
  std::string line;
  if (!std::getline(in, line)) return false;
  const auto header = split(line);
  for (std::size_t k = 0; k < header.size(); ++k) table.column[header[k]] = k;
  while (std::getline(in, line)) {
    if (!line.empty()) table.rows.push_back(split(line));
  }
  return true;
}

}  // namespace

std::vector<std::string> write_plots(const std::filesystem::path& run_dir, const std::filesystem::path& out_dir) {
  std::vector<std::pair<std::string, std::string>> files;
  Table t;
  if (read_table(run_dir / "density_kappa.csv", t)) {
    std::string text = "# t family kappa_hat\n";
    for (const auto& r : t.rows) {
      text += report::num(t.value(r, "t")) + " " + r.at(t.column.at("family")) + " " +
              report::num(t.value(r, "kappa_hat")) + "\n";
    }
    files.emplace_back("kappa.dat", text);
  }
  Table c;
  if (read_table(run_dir / "contraction.csv", c)) {
    std::string text = "# k log(log(1/delta))\n";
    for (const auto& r : c.rows) {
      const double delta = std::max(c.value(r, "sup_dist"), c.value(r, "tv"));
      if (delta > 0.0 && delta < 1.0) {
        text += r.at(c.column.at("k")) + " " + report::num(std::log(std::log(1.0 / delta))) + "\n";
      }
    }
    files.emplace_back("loglog.dat", text);
  }
  Table g;
  if (read_table(run_dir / "census.csv", g)) {
    std::string text = "# t family largest_gap\n";
    for (const auto& r : g.rows) {
      text += report::num(g.value(r, "t")) + " " + r.at(g.column.at("family")) + " " +
              report::num(g.value(r, "largest_gap")) + "\n";
    }
    files.emplace_back("census_gap.dat", text);
  }
  if (files.empty()) throw std::runtime_error(run_dir.string() + " holds no density, contraction or census output");
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> names;
  for (const auto& [name, text] : files) {
    std::ofstream(out_dir / name, std::ios::binary) << text;
    names.push_back(name);
  }
  return names;
}

}  // namespace hyperctl::scenario
