#pragma once

// diagnostics.csv, report.json and the per-run verdicts.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "config.hpp"
#include "simulation.hpp"

namespace nlnoether {

/// Shortest text that reads back to the same double (%.17g).
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_csv(std::ostream& out, const DiagnosticsSeries& s) {
  for (std::size_t i = 0; i < s.columns.size(); ++i) out << (i ? "," : "") << s.columns[i];
  out << '\n';
  for (const auto& row : s.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
}

inline void write_csv(const std::string& path, const DiagnosticsSeries& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_csv(out, s);
  if (!out) throw std::runtime_error("write failed for " + path);
}

/// Throws std::runtime_error naming the 1-based line of a malformed row.
inline DiagnosticsSeries read_csv(std::istream& in) {
  DiagnosticsSeries s;
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw std::runtime_error("line 1: missing header");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) s.columns.push_back(cell);
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      if (cell == "nan") {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      char* end = nullptr;
      const double x = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size())
        throw std::runtime_error("line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      row.push_back(x);
    }
    if (row.size() != s.columns.size())
      throw std::runtime_error("line " + std::to_string(lineno) + ": expected " +
                               std::to_string(s.columns.size()) + " fields, found " +
                               std::to_string(row.size()));
    s.rows.push_back(std::move(row));
  }
  return s;
}

inline DiagnosticsSeries read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_csv(in);
}

struct Verdict {
  std::string name;
  bool applicable = true;
  bool pass = true;
  double measured = 0.0;
  double threshold = 0.0;
  std::string description;
};

/// Names of every per-run verdict, in report order.
inline const std::vector<std::pair<std::string, std::string>>& run_check_list() {
  static const std::vector<std::pair<std::string, std::string>> list = {
      {"finite_state", "no divergence; every diagnostic is finite"},
      {"zero_mean_E", "max normalized |int E_hat| over samples <= 1e-12"},
      {"zero_mean_P", "max normalized |int P_hat| over samples <= 1e-12"},
      {"zero_mean_M_central", "central mode, dim >= 2: max normalized |int M_hat| <= 1e-12"},
      {"dirichlet_pinned", "fixed faces: max |u|, |v| on pinned cells at the end <= 1e-12"},
      {"momentum_conservation",
       "all faces free: max |p(t) - p(0)| / (rho int |v|) <= 1e-10"},
      {"energy_nonnegative", "min energy >= -1e-14 * max |energy|"},
  };
  return list;
}

inline std::vector<Verdict> run_verdicts(const ScenarioConfig& c, const RunResult& r) {
  std::vector<Verdict> out;
  auto add = [&](const std::string& name, bool applicable, double measured, double threshold,
                 bool pass) {
    Verdict v;
    v.name = name;
    v.applicable = applicable;
    v.measured = measured;
    v.threshold = threshold;
    v.pass = !applicable || pass;
    for (const auto& [n, d] : run_check_list())
      if (n == name) v.description = d;
    out.push_back(v);
  };

  bool finite = !r.diverged_at;
  for (const auto& row : r.series.rows)
    for (std::size_t i = 0; i < row.size(); ++i) {
      const std::string& col = r.series.columns[i];
      if (col == "gap_M" && c.dim == 1) continue;
      if (col.rfind("balance_", 0) == 0 && r.series.rows.size() < 3) continue;
      finite = finite && std::isfinite(row[i]);
    }
  add("finite_state", true, finite ? 0.0 : 1.0, 0.0, finite);

  double gE = 0.0, gP = 0.0, gM = 0.0;
  for (const auto& g : r.gaps) {
    gE = std::max(gE, g.E);
    gP = std::max(gP, g.P);
    if (!std::isnan(g.M)) gM = std::max(gM, g.M);
  }
  add("zero_mean_E", true, gE, 1e-12, gE <= 1e-12);
  add("zero_mean_P", true, gP, 1e-12, gP <= 1e-12);
  add("zero_mean_M_central", c.kernel.central && c.dim >= 2, gM, 1e-12, gM <= 1e-12);

  const DomainGrid grid = build_grid(c);
  double pinned = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p)
    if (grid.dirichlet_mask()[p])
      for (int k = 0; k < c.dim; ++k)
        pinned = std::max({pinned, std::abs(r.final_state.u(p, k)), std::abs(r.final_state.v(p, k))});
  add("dirichlet_pinned", !c.fixed_faces.empty(), pinned, 1e-12, pinned <= 1e-12);

  // Normalized by the largest mass-weighted |v| seen at any sample.
  double drift = 0.0, scale = 0.0;
  if (!r.bulk.empty()) {
    for (const auto& q : r.bulk)
      for (std::size_t k = 0; k < q.linear_momentum.size(); ++k)
        drift = std::max(drift, std::abs(q.linear_momentum[k] - r.bulk.front().linear_momentum[k]));
  }
  for (const State* s : {&r.initial, &r.final_state}) {
    if (s->v.empty()) continue;
    double l1 = 0.0;
    for (std::size_t p = 0; p < grid.size(); ++p)
      for (int k = 0; k < c.dim; ++k) l1 += grid.weight(p) * std::abs(s->v(p, k));
    scale = std::max(scale, c.material.rho * l1);
  }
  const double rel = drift / (scale > 0.0 ? scale : 1.0);
  add("momentum_conservation", c.fixed_faces.empty(), rel, 1e-10, rel <= 1e-10);

  double emin = std::numeric_limits<double>::infinity(), emax = 0.0;
  for (const auto& q : r.bulk) {
    emin = std::min(emin, q.energy);
    emax = std::max(emax, std::abs(q.energy));
  }
  if (r.bulk.empty()) emin = 0.0;
  add("energy_nonnegative", true, emin, -1e-14 * emax, emin >= -1e-14 * emax);
  return out;
}

inline json verdicts_json(const std::vector<Verdict>& vs) {
  json out = json::object();
  for (const auto& v : vs)
    out[v.name] = {{"pass", v.pass}, {"applicable", v.applicable},
                   {"measured", detail::number_to_json(v.measured)},
                   {"threshold", detail::number_to_json(v.threshold)}};
  return out;
}

inline json build_report(const ScenarioConfig& c, const RunResult& r) {
  json rep;
  rep["config"] = echo_config(c);
  rep["verdicts"] = verdicts_json(run_verdicts(c, r));
  rep["samples"] = r.series.rows.size();
  rep["diverged_at"] = r.diverged_at ? json(*r.diverged_at) : json(nullptr);
  const double rate = r.wall_seconds > 0.0 ? r.steps_taken / r.wall_seconds : 0.0;
  rep["metrics"] = {{"wall_seconds", r.wall_seconds},
                    {"steps", r.steps_taken},
                    {"steps_per_second", rate}};
  return rep;
}

}  // namespace nlnoether
