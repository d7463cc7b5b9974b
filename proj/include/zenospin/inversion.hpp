#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "zenospin/dynamics.hpp"
#include "zenospin/spin_system.hpp"

namespace zenospin {

// One projected build-up experiment: how the state was prepared and the
// recorded per-site (and/or per-group) trajectory.
struct Experiment {
  InitialSpec initial;
  double tau = 0.0;
  int cycles = 0;
  Eigen::MatrixXd site_values;   // (M+1) x n, may be empty when only group data exists
  Eigen::MatrixXd group_values;  // (M+1) x n_groups; derived from sites if empty
  double noise_level = 0.0;      // expected per-point noise sigma, 0 if unknown
  std::string source;            // e.g. originating file, for reports
};

struct BuildUpDataset {
  std::vector<std::string> labels;
  std::vector<std::vector<int>> groups;
  std::vector<std::string> group_names;
  std::vector<Experiment> experiments;
  Convention convention;

  int n_sites() const { return static_cast<int>(labels.size()); }
  int n_groups() const { return static_cast<int>(groups.size()); }
  // Group-mean trajectory of an experiment (computes it from sites if absent).
  Eigen::MatrixXd group_trajectory(const Experiment& e) const;
  // Initial polarization of each group; throws if a group is not uniform.
  Eigen::VectorXd group_initials(const Experiment& e) const;
  void validate() const;
};

// Early-window build-up / decay rates for one experiment.
struct ExperimentSlopes {
  int window = 0;                       // slope fitted over cycles 0..window
  std::vector<int> cold_groups;         // groups starting at polarization 0
  std::vector<double> cross_rate;       // per-cycle build-up rate per cold group
  std::vector<double> cross_rate_se;
  std::vector<int> warm_groups;         // initially polarized groups
  std::vector<double> self_decay_rate;  // s in P(m) ~ P(0) (1 - s m)
  std::vector<double> self_decay_se;
};

// Fits P_b(m) ~ r m + q m^2 (cold groups) and the matching decay form (warm
// groups) over the automatic early window: all cold build-ups below 25% of
// the equipartition asymptote. Throws when the window is shorter than 3
// cycles or early data is non-monotonic beyond the noise tolerance.
std::vector<ExperimentSlopes> shorttau_slopes(const BuildUpDataset& dataset);

enum class EstimateMethod { short_tau_ratio, least_squares };

std::string method_name(EstimateMethod method);

struct PairEstimate {
  int group_a = 0;  // group indices, a < b
  int group_b = 0;
  double j_hz = 0.0;    // effective |J| (RMS over member pairs)
  double se_hz = 0.0;
  bool identifiable = true;
};

struct FitDiagnostics {
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = true;
  bool hit_bound = false;
  int observation_count = 0;
  std::vector<int> windows;           // per experiment (short-tau route)
  std::vector<std::string> notes;
};

struct CouplingEstimate {
  EstimateMethod method = EstimateMethod::short_tau_ratio;
  std::vector<PairEstimate> pairs;    // every group pair a < b
  double damping_per_s = 0.0;
  bool damping_fitted = false;
  FitDiagnostics diagnostics;

  const PairEstimate& pair(int ga, int gb) const;
};

// Ratio-route extraction: converts early-window build-up rates into
// effective |J| per group pair via r = g_excited (f tau / 2)^2 J^2 summed
// over contributing warm groups, solved as a weighted linear system in J^2.
// Throws ValidationError when requested pairs are unidentifiable (rank
// deficiency) or the estimates land outside the small-tau validity regime.
CouplingEstimate estimate_couplings_shorttau(const BuildUpDataset& dataset);

struct RefineOptions {
  int max_iterations = 100;
  bool fit_damping = false;
  double initial_damping_per_s = 0.0;
  double fd_step = 1e-4;        // finite-difference step scale (Hz / s^-1)
  double step_tolerance = 1e-9;
};

// Damped least-squares refinement of |J| (and optionally the damping rate)
// against full forward simulations of every experiment. Deterministic for
// fixed options; non-convergence returns the best point with
// diagnostics.converged = false.
CouplingEstimate refine_fit(const BuildUpDataset& dataset, const CouplingEstimate& initial,
                            const RefineOptions& options = {});

struct BootstrapReport {
  std::vector<PairEstimate> pairs;  // j_hz = mean over replicates, se_hz = stddev
  int replicates = 0;
  std::uint64_t seed = 0;
  EstimateMethod method = EstimateMethod::short_tau_ratio;
};

// Residual-bootstrap standard errors: resamples fit residuals with a seeded
// generator, re-runs the estimate's extraction route per replicate.
BootstrapReport bootstrap_uncertainty(const BuildUpDataset& dataset,
                                      const CouplingEstimate& estimate, int replicates,
                                      std::uint64_t seed);

// Forward-model trajectories for a coupling hypothesis expressed as
// group-pair effective couplings (every member pair carries the effective
// value; within-group couplings zero). Shared by refine/bootstrap/reports.
SpinSystem dataset_system(const BuildUpDataset& dataset, const std::vector<PairEstimate>& pairs);

std::vector<Eigen::MatrixXd> forward_group_trajectories(const BuildUpDataset& dataset,
                                                        const std::vector<PairEstimate>& pairs,
                                                        double damping_per_s);

}  // namespace zenospin
