#pragma once

#include <vector>

#include <Eigen/Dense>

#include "zenospin/dynamics.hpp"
#include "zenospin/spin_system.hpp"

namespace zenospin {

// Closed-form single-pair transfer under isotropic mixing with one projected
// cycle of length tau:
//   stay = (1 + cos(angular_factor * J * tau)) / 2,
//   transfer = (1 - cos(angular_factor * J * tau)) / 2.
// Under the default 2*pi convention transfer completes at tau = 1/(2J).
struct TwoSpinTransfer {
  double stay = 1.0;
  double transfer = 0.0;
};

TwoSpinTransfer two_spin_transfer(double j_hz, double tau, const Convention& convention = {});

// Validity thresholds for the quadratic small-tau model on max |J_ij| tau.
inline constexpr double kSmallTauWarn = 0.2;
inline constexpr double kSmallTauRefuse = 0.5;

// N x N per-cycle polarization-transfer matrix in the small-tau regime:
// off-diagonal p_ij = (angular_factor * J_ij * tau / 2)^2, i.e. (pi J tau)^2
// under the 2*pi convention (the tau^2 coefficient of the exact transfer);
// diagonal 1 - sum_j p_ij. Rows and columns sum to 1 by construction.
struct SmallTauModel {
  Eigen::MatrixXd per_cycle;  // n x n
  double tau = 0.0;
  double max_jtau = 0.0;      // max |J_ij| * tau over pairs
  bool beyond_warn_threshold = false;
  Convention convention;

  // Site-level transfer after m cycles, [per_cycle]^m.
  Eigen::MatrixXd power(int m) const;
};

// Throws ValidationError when max |J_ij| tau exceeds the refuse threshold.
SmallTauModel small_tau_kernel(const SpinSystem& system, double tau,
                               const Convention& convention = {});

// Exact one-cycle site-level map: column i holds the per-site polarizations
// after one projected cycle starting from excite {i}. This is the object the
// small-tau model approximates; meaningful as a linear map only in the
// small-tau regime where site superposition holds to O(tau^4).
Eigen::MatrixXd exact_site_kernel(const TransferKernel& kernel, const SpinSystem& system);

// Long-time equipartition asymptote (sum_i P_i(0)) / n for a connected
// network under ideal projected dynamics.
struct EquilibriumPrediction {
  double per_site = 0.0;
  std::vector<double> group_values;  // member means; all equal per_site
  std::vector<std::string> group_names;
};

EquilibriumPrediction equilibrium_prediction(const SpinSystem& system,
                                             const Eigen::VectorXd& initial_polarizations);

}  // namespace zenospin
