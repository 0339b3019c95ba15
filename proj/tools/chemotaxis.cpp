#include "chemo/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

using namespace chemo;

namespace {

int run_command(const std::string& path, const std::string& output_dir, long long seed, bool snapshots) {
  ScenarioConfig config;
  try {
    config = load_config(path);
  } catch (const ConfigError& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return 2;
  }
  if (!output_dir.empty()) config.output_dir = output_dir;
  if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
  if (snapshots) config.snapshots = true;

  const RunSummary summary = execute(config);
  for (const ReportEntry& e : summary.fits.entries)
    std::printf("%-4s %-18s fitted %+.4f expected %+.4f tol %.2f r2 %.4f %s\n", e.pass ? "PASS" : "FAIL",
                e.quantity.c_str(), e.fitted_exponent, e.expected_exponent, e.tolerance, e.r_squared, e.note.c_str());
  for (const Check& c : summary.checks)
    std::printf("%-4s %s = %.6g %s %.6g\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value, c.relation.c_str(),
                c.threshold);
  for (const std::string& issue : summary.issues) std::printf("DIAG %s\n", issue.c_str());
  std::printf("%s: %s in %.1f s, output in %s\n", to_string(config.scenario).c_str(), summary.pass() ? "pass" : "FAIL",
              summary.wall_time, config.output_dir.c_str());
  return exit_code(summary);
}

int check_command(const std::string& path) {
  try {
    std::cout << to_ini(load_config(path));
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return 2;
  }
}

int rates_command(int dim, int orders) {
  std::printf("%-14s %8s\n", "quantity", "rate");
  for (const ExpectedRate& r : expected_rates(dim, orders)) std::printf("%-14s %8.4f\n", r.quantity.c_str(), r.rate);
  std::printf("\nconstant-state rate  %.4f\ncomparison rate      %.4f\n", constant_state_rate(dim), comparison_rate(dim));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decay experiments for a hyperbolic-parabolic chemotaxis system"};
  app.require_subcommand(1);

  std::string config_path, output_dir;
  long long seed = -1;
  bool snapshots = false;
  auto* run = app.add_subcommand("run", "Run a scenario and write series.csv and report.json");
  run->add_option("config", config_path, "Scenario config file")->required();
  run->add_option("--output-dir", output_dir, "Override [output] dir");
  run->add_option("--seed", seed, "Override [scenario] seed")->check(CLI::NonNegativeNumber);
  run->add_flag("--snapshots", snapshots, "Write sparse full-state snapshots");

  std::string check_path;
  auto* check = app.add_subcommand("check-config", "Validate a config and print it with defaults resolved");
  check->add_option("path", check_path, "Scenario config file")->required();

  int dim = 1;
  int orders = 3;
  auto* rates = app.add_subcommand("expected-rates", "Print the zero-state decay-rate table");
  rates->add_option("--dim", dim, "Space dimension")->required()->check(CLI::Range(1, 3));
  rates->add_option("--orders", orders, "Highest derivative order")->check(CLI::Range(0, 8));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*run) return run_command(config_path, output_dir, seed, snapshots);
    if (*check) return check_command(check_path);
    if (*rates) return rates_command(dim, orders);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
