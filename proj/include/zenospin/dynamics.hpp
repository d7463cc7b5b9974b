#pragma once

#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "zenospin/hamiltonian.hpp"
#include "zenospin/spin_system.hpp"

namespace zenospin {

// Diagonal of a density matrix in the product basis; entries >= 0, sum 1.
struct PopulationState {
  int n = 0;
  Eigen::VectorXd populations;  // length 2^n

  void validate() const;  // throws ValidationError outside tolerances
};

// Initial-state request: selected sites polarized (excite), selected sites
// emptied with the rest polarized (deplete), or an explicit per-site vector.
struct InitialSpec {
  enum class Kind { excite, deplete, custom };
  Kind kind = Kind::excite;
  std::vector<int> sites;     // for excite / deplete
  Eigen::VectorXd custom;     // for custom, length n, entries in [-1, 1]

  Eigen::VectorXd site_polarizations(int n) const;
  static InitialSpec excite(std::vector<int> sites);
  static InitialSpec deplete(std::vector<int> sites);
  static InitialSpec from_vector(Eigen::VectorXd p);
};

// Product-state diagonal with per-site polarizations P_i:
// populations = prod_i ((1+P_i)/2, (1-P_i)/2) in bit order.
PopulationState initial_population(const SpinSystem& system, const Eigen::VectorXd& polarizations);

// Per-site polarizations P_i = 2<I_iz> recovered from a population vector.
Eigen::VectorXd site_polarizations(const PopulationState& state);

// Cached eigendecomposition of the sector blocks; exp(-iH tau) for any tau
// without re-decomposing. Immutable and shareable.
class SectorPropagator {
 public:
  explicit SectorPropagator(SectorDecomposition sectors);

  // U_s = V exp(-i w tau) V^T per sector, each unitary.
  std::vector<Eigen::MatrixXcd> unitaries(double tau) const;

  // Full 2^n x 2^n unitary assembled from the sector blocks.
  Eigen::MatrixXcd full_unitary(double tau) const;

  const SectorDecomposition& sectors() const { return sectors_; }
  int n() const { return sectors_.n; }

 private:
  SectorDecomposition sectors_;
  std::vector<Eigen::VectorXd> eigenvalues_;
  std::vector<Eigen::MatrixXd> eigenvectors_;
};

// Projection channel: off-diagonal elements scaled by epsilon (0 = ideal
// pinch). Throws ValidationError if rho is non-Hermitian beyond 1e-9.
Eigen::MatrixXcd pinch(const Eigen::MatrixXcd& rho, double epsilon);

// Imperfect-projection and phenomenological-damping knobs for one cycle.
struct ProjectionSpec {
  double epsilon = 0.0;        // off-diagonal retention in [0, 1]
  double damping_per_s = 0.0;  // uniform decay of the traceless part, >= 0

  void validate() const;
};

// Population-space map of one evolve-then-project cycle: T_ab = |U_ab|^2,
// block diagonal over Mz sectors, each block doubly stochastic.
struct TransferKernel {
  int n = 0;
  double tau = 0.0;
  Convention convention;
  std::vector<Eigen::MatrixXd> blocks;          // per sector
  std::vector<std::vector<int>> sector_states;  // per sector basis indices
  std::shared_ptr<const SectorPropagator> propagator;  // for the leaky path

  Eigen::VectorXd apply(const Eigen::VectorXd& populations) const;
  Eigen::MatrixXd assemble() const;  // full 2^n x 2^n, for inspection/tests
};

TransferKernel transfer_kernel(std::shared_ptr<const SectorPropagator> propagator, double tau);

// Per-spin polarizations sampled at cycle boundaries m*tau.
struct PolarizationTrajectory {
  std::vector<double> times;       // length M+1
  Eigen::MatrixXd values;          // (M+1) x n, entries 2<I_iz>
  Eigen::MatrixXd group_values;    // (M+1) x n_groups, member means
  std::vector<std::string> labels;
  std::vector<std::string> group_names;
  double tau = 0.0;
  int cycles = 0;
  ProjectionSpec projection;
  Convention convention;

  int n_sites() const { return static_cast<int>(values.cols()); }
};

inline constexpr int kDefaultCycleCap = 100000;

// Iterated projected evolution P(M tau) = [p(tau)]^M P(0). The ideal
// projection (epsilon = 0) runs on the population kernel; epsilon > 0 falls
// back to full density-matrix cycling U rho U^+ followed by pinch. Damping
// multiplies the traceless part by exp(-damping*tau) after each cycle.
PolarizationTrajectory evolve_projected(const TransferKernel& kernel, const SpinSystem& system,
                                        const PopulationState& initial, int cycles,
                                        const ProjectionSpec& projection = {},
                                        int cycle_cap = kDefaultCycleCap);

// Free coherent evolution of a deviation density matrix proportional to a
// single-spin operator; returns Tr(obs rho(t)) / Tr(rho0^2) on the grid.
struct CoherentTrajectory {
  std::vector<double> times;
  Eigen::MatrixXd values;  // n_times x n_observables
  std::vector<std::string> observable_names;
  Convention convention;
};

using SpinAxisOp = std::pair<int, char>;  // (site, axis)

CoherentTrajectory evolve_coherent(const SpinSystem& system, SpinAxisOp initial_op,
                                   const std::vector<double>& times,
                                   const std::vector<SpinAxisOp>& observables,
                                   const Convention& convention = {});

}  // namespace zenospin
