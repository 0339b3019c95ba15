#pragma once

#include "chemo/config.hpp"

#include <string>
#include <vector>

namespace chemo {

/// A scalar acceptance check: pass iff `value relation threshold`.
struct Check {
  std::string name;
  double value = 0;
  std::string relation = "<=";
  double threshold = 0;
  bool pass = false;
  std::string note;
};

/// Wide table: first column t, then one column per label.
struct SeriesTable {
  std::vector<std::string> labels;
  std::vector<double> times;
  std::vector<std::vector<double>> columns;

  void add(const std::string& label, const std::vector<double>& values);
};

struct RunSummary {
  ScenarioConfig config;
  std::vector<ExpectedRate> expected;
  DecayReport fits;
  std::vector<Check> checks;
  double mass_drift = 0;
  double oracle_gap = -1;          // negative: not requested
  std::vector<double> oracle_deltas;
  std::vector<std::string> issues; // raised diagnostics
  std::string blow_up;             // non-empty after a blow-up
  double wall_time = 0;

  bool blew_up() const { return !blow_up.empty(); }
  bool pass() const;
};

struct ScenarioResult {
  RunSummary summary;
  SeriesTable table;
  std::vector<Snapshot> snapshots;
};

/// Runs the scenario without touching the file system.
ScenarioResult run_scenario(const ScenarioConfig& config);

/// run_scenario plus series.csv, report.json and optional snapshots in config.output_dir.
RunSummary execute(const ScenarioConfig& config);

std::string series_csv(const SeriesTable& table);
std::string report_json(const RunSummary& summary);

/// Exit status: 0 pass, 1 failed checks or diagnostics, 3 blow-up.
int exit_code(const RunSummary& summary);

}  // namespace chemo
