#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zenospin/inversion.hpp"
#include "zenospin/io.hpp"

namespace zenospin {

// Batch-command implementations behind the CLI verbs. Each throws
// ValidationError (exit 2) or NumericalError (exit 3); the binary maps them.

struct SimulateOutput {
  std::string csv_path;
  TrajectoryFile file;
};

SimulateOutput cmd_simulate(const ScenarioConfig& config);

struct SweepRow {
  double tau_s = 0.0;
  int cycles = 0;
  double transferred_fraction = 0.0;
  double equipartition_distance = 0.0;
  int monotonicity_violations = 0;
};

struct SweepOutput {
  std::vector<SweepRow> rows;  // input order
  std::string table;           // printable summary
};

// Runs the scenario once per tau at a fixed total time budget
// (cycles = round(total_time / tau)). Needs >= 2 tau values.
SweepOutput cmd_sweep_tau(const ScenarioConfig& base, const std::vector<double>& taus,
                          double total_time_s);

struct FitConfig {
  std::string manifest_path;
  bool refine = false;
  bool fit_damping = false;
  int bootstrap_replicates = 0;
  std::uint64_t seed = 1;
  std::string report_path;     // optional
  std::string estimates_path;  // optional
};

struct FitOutput {
  CouplingEstimate estimate;
  std::optional<BootstrapReport> bootstrap;
  std::string report;
};

FitOutput cmd_fit(const FitConfig& config);

std::string cmd_predict(const std::string& system_ref, const InitialSpecText& initial);

std::string cmd_preset_list();

}  // namespace zenospin
