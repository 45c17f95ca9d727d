// nlnoether: run scenarios, verify properties, summarize diagnostics.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>

#include "CLI11.hpp"

#include "nlnoether/checks.hpp"
#include "nlnoether/config.hpp"
#include "nlnoether/output.hpp"
#include "nlnoether/simulation.hpp"

namespace fs = std::filesystem;
using namespace nlnoether;

namespace {

constexpr const char* kVersion = "nlnoether 0.1.0";

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
  ScenarioConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  RunResult res;
  try {
    res = run(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  try {
    fs::create_directories(out_dir);
    write_csv((fs::path(out_dir) / "diagnostics.csv").string(), res.series);
    std::ofstream rep(fs::path(out_dir) / "report.json");
    rep << build_report(cfg, res).dump(2) << "\n";
    if (!rep) throw std::runtime_error("cannot write report.json");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (res.diverged_at) {
    std::cerr << "solver diverged: non-finite state at step " << *res.diverged_at << "\n";
    return 2;
  }
  std::printf("%zu steps, %zu samples, %.3f s -> %s\n", res.steps_taken, res.series.rows.size(),
              res.wall_seconds, out_dir.c_str());
  return 0;
}

const char* relation_word(const checks::CheckRow& r) { return r.pass ? "PASS" : "FAIL"; }

int cmd_check(const std::string& suite) {
  std::vector<std::string> suites;
  if (suite == "all") {
    suites = checks::suite_names();
  } else if (std::find(checks::suite_names().begin(), checks::suite_names().end(), suite) !=
             checks::suite_names().end()) {
    suites = {suite};
  } else {
    std::cerr << "unknown suite '" << suite << "' (identities, conservation, residuals, all)\n";
    return 1;
  }
  bool all_pass = true;
  for (const auto& s : suites) {
    std::printf("[%s]\n", s.c_str());
    std::printf("%-28s %-50s %-12s %-16s %s\n", "check", "law", "measured", "threshold", "verdict");
    for (const auto& row : checks::run_suite(s)) {
      std::printf("%-28s %-50s %-12.4e %-16s %s\n", row.name.c_str(), row.law.c_str(),
                  row.measured, checks::threshold_text(row).c_str(), relation_word(row));
      all_pass = all_pass && row.pass;
    }
  }
  return all_pass ? 0 : 1;
}

int cmd_report(const std::string& dir) {
  DiagnosticsSeries s;
  try {
    s = read_csv((fs::path(dir) / "diagnostics.csv").string());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::printf("%zu samples\n", s.rows.size());
  std::printf("%-22s %-24s %-24s %s\n", "column", "min", "max", "max_abs");
  for (std::size_t c = 0; c < s.columns.size(); ++c) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, ma = 0.0;
    bool any = false;
    for (const auto& row : s.rows) {
      if (std::isnan(row[c])) continue;
      any = true;
      lo = std::min(lo, row[c]);
      hi = std::max(hi, row[c]);
      ma = std::max(ma, std::abs(row[c]));
    }
    if (!any) {
      std::printf("%-22s %-24s %-24s %s\n", s.columns[c].c_str(), "nan", "nan", "nan");
      continue;
    }
    std::printf("%-22s %-24.16e %-24.16e %.16e\n", s.columns[c].c_str(), lo, hi, ma);
  }
  return 0;
}

void list_checks() {
  std::printf("report verdicts (simulate):\n");
  for (const auto& [name, desc] : run_check_list()) std::printf("  %-28s %s\n", name.c_str(), desc.c_str());
  for (const auto& [suite, names] : checks::suite_checks()) {
    std::printf("check --suite %s:\n", suite.c_str());
    for (const auto& n : names) std::printf("  %s\n", n.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal elastodynamics simulator and conservation-law checks"};
  app.require_subcommand(0, 1);
  bool show_version = false, show_checks = false;
  app.add_flag("--version", show_version, "Print the version");
  app.add_flag("--list-checks", show_checks, "List every verdict and check name");

  std::string config_path, out_dir, suite, report_dir;
  auto* sim = app.add_subcommand("simulate", "Run a scenario and write diagnostics.csv and report.json");
  sim->add_option("--config", config_path, "Scenario JSON file")->required();
  sim->add_option("--out", out_dir, "Output directory")->required();
  auto* chk = app.add_subcommand("check", "Run a property suite");
  chk->add_option("--suite", suite, "identities, conservation, residuals or all")->required();
  auto* rep = app.add_subcommand("report", "Summarize a diagnostics.csv");
  rep->add_option("--dir", report_dir, "Directory holding diagnostics.csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (show_version) {
    std::printf("%s\n", kVersion);
    return 0;
  }
  if (show_checks) {
    list_checks();
    return 0;
  }
  try {
    if (*sim) return cmd_simulate(config_path, out_dir);
    if (*chk) return cmd_check(suite);
    if (*rep) return cmd_report(report_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cout << app.help();
  return 1;
}
