#pragma once

#include "chemo/analysis.hpp"
#include "chemo/solver.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace chemo {

enum class ScenarioKind { ZeroState, ConstantState, PksCompare, KernelRates };

std::string to_string(ScenarioKind kind);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KernelSettings {
  double cutoff = 0;         // 0: branch radius beta / (2 gamma)
  double probe_width = 0;    // 0: 4 h
  int samples = 48;          // log-spaced times per series
  double t_min = 1;          // start of the shared time grid
  double exp_window_lo = 1;  // window for the exponential rate of the hyperbolic part
  double exp_window_hi = 30;
};

struct DiagnosticSettings {
  bool oracle = false;
  double oracle_t_end = 0.5;
  int oracle_nodes = 64;
  int oracle_picard = 6;
  double mass_tolerance = 1e-9;
};

struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::ZeroState;
  SolverConfig solver;
  FitWindow window;
  KernelSettings kernel;
  DiagnosticSettings diagnostics;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  bool snapshots = false;
};

/**
 * INI-style text: `[section]` headers, `key = value` lines, `#` or `;` comments.
 * Every default is resolved; unknown sections or keys, missing required keys
 * and malformed values raise ConfigError naming the key and line.
 */
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/// Resolved configuration in the input format (parse_config(to_ini(c)) reproduces c).
std::string to_ini(const ScenarioConfig& config);

}  // namespace chemo
