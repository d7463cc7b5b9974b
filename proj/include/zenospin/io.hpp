#pragma once

#include <optional>
#include <string>
#include <vector>

#include "zenospin/dynamics.hpp"
#include "zenospin/inversion.hpp"
#include "zenospin/spin_system.hpp"

namespace zenospin {

// Shortest decimal form that round-trips the double exactly; deterministic.
std::string format_double(double value);

// ---------------------------------------------------------------------------
// Spin-system files ("zenospin-spinsys v1"): version line, then
//   angular_factor <value>
//   site <label>                  (one per site, order defines indices)
//   coupling <label_a> <label_b> <J_hz>
//   group <name> <member labels...>
// Unlisted pairs default to J = 0; ungrouped sites become singleton groups.
// ---------------------------------------------------------------------------
void write_spin_system(const SpinSystem& system, const Convention& convention,
                       const std::string& path);
std::pair<SpinSystem, Convention> read_spin_system(const std::string& path);

// Resolves a preset name or a spin-system file path.
std::pair<SpinSystem, Convention> resolve_system(const std::string& reference);

// Textual initial-state spec: "excite:2,2'", "deplete:1,1'",
// "custom:0,0,1,1,0" or "op:2,x" (coherent mode only).
struct InitialSpecText {
  std::string kind;                 // excite | deplete | custom | op
  std::vector<std::string> sites;   // labels (excite/deplete)
  std::vector<double> custom;
  std::string op_site;
  char op_axis = 'x';

  InitialSpec resolve(const SpinSystem& system) const;  // not for "op"
  std::string to_string() const;
};
InitialSpecText parse_initial_spec(const std::string& text);

// ---------------------------------------------------------------------------
// Trajectory CSV: '#'-prefixed metadata block (schema version, convention,
// scenario) followed by a header row `time_s,<site labels...>,g:<group>...`
// and one row per cycle. A structured-text sidecar `<path>.meta` repeats the
// metadata.
// ---------------------------------------------------------------------------
struct TrajectoryFile {
  std::string mode;  // projected | coherent
  std::string system_ref;
  InitialSpecText initial;
  PolarizationTrajectory trajectory;  // values for coherent mode hold the observables
};

void write_trajectory_csv(const TrajectoryFile& file, const std::string& path);
TrajectoryFile read_trajectory_csv(const std::string& path);

// ---------------------------------------------------------------------------
// Experiment manifest ("zenospin-manifest v1"):
//   system <preset or file>
//   experiment file=<csv> initial=<spec> [tau_s=<v>] [cycles=<n>] [noise=<v>]
// Relative CSV paths are resolved against the manifest directory.
// ---------------------------------------------------------------------------
struct ManifestEntry {
  std::string file;
  InitialSpecText initial;
  std::optional<double> tau_s;
  std::optional<int> cycles;
  double noise_level = 0.0;
};

struct Manifest {
  std::string system_ref;
  std::vector<ManifestEntry> entries;
};

Manifest read_manifest(const std::string& path);

// Loads every referenced trajectory, validating labels, mode, tau and cycle
// counts against the manifest and the system. Throws ValidationError with
// the offending field on any mismatch.
BuildUpDataset load_dataset(const Manifest& manifest, const SpinSystem& system,
                            const Convention& convention);

// Estimates CSV + human-readable report text.
void write_estimates_csv(const CouplingEstimate& estimate, const BuildUpDataset& dataset,
                         const std::string& path);
std::string estimate_report(const CouplingEstimate& estimate, const BuildUpDataset& dataset,
                            const SpinSystem& system,
                            const std::optional<BootstrapReport>& bootstrap = std::nullopt);

// ---------------------------------------------------------------------------
// Scenario config files ("zenospin-scenario v1"), key/value lines mirroring
// the CLI flags. Unknown keys are rejected.
// ---------------------------------------------------------------------------
struct ScenarioConfig {
  std::string system_ref;
  std::string mode = "projected";
  std::optional<InitialSpecText> initial;
  std::optional<double> tau_s;
  std::optional<int> cycles;
  double epsilon = 0.0;
  double damping_per_s = 0.0;
  // coherent grid: start/step/stop (seconds)
  std::optional<double> time_start, time_step, time_stop;
  std::string out;
  std::uint64_t seed = 0;

  void validate() const;  // mode-specific required fields
};

ScenarioConfig read_scenario(const std::string& path);

// Applies ZENOSPIN_OUT_DIR to relative output paths.
std::string resolve_output_path(const std::string& path);

}  // namespace zenospin
