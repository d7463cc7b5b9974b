#pragma once

// Shared test utilities: an independent brute-force oracle for projected
// dynamics (full density matrix, no sector structure), seeded random system
// generation, and scratch-directory helpers.

#include <filesystem>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "zenospin/dynamics.hpp"
#include "zenospin/hamiltonian.hpp"
#include "zenospin/inversion.hpp"
#include "zenospin/spin_system.hpp"

namespace testing {

// Simulates one projected experiment per initial spec and packs the group
// trajectories into a dataset ready for the inversion routines.
inline zenospin::BuildUpDataset simulate_dataset(const zenospin::SpinSystem& system,
                                                 const std::vector<zenospin::InitialSpec>& initials,
                                                 double tau, int cycles,
                                                 double damping_per_s = 0.0) {
  using namespace zenospin;
  BuildUpDataset dataset;
  dataset.labels = system.labels;
  dataset.groups = system.groups;
  dataset.group_names = system.group_names;
  const auto prop = std::make_shared<const SectorPropagator>(build_sector_hamiltonians(system));
  const TransferKernel kernel = transfer_kernel(prop, tau);
  for (const auto& initial : initials) {
    ProjectionSpec proj;
    proj.damping_per_s = damping_per_s;
    const PopulationState p0 = initial_population(system, initial.site_polarizations(system.n));
    const PolarizationTrajectory traj = evolve_projected(kernel, system, p0, cycles, proj);
    Experiment e;
    e.initial = initial;
    e.tau = tau;
    e.cycles = cycles;
    e.site_values = traj.values;
    e.group_values = traj.group_values;
    e.source = "simulated";
    dataset.experiments.push_back(std::move(e));
  }
  return dataset;
}

// Brute-force reference for evolve_projected: builds the full 2^n
// Hamiltonian, exponentiates it in the full space (no Mz blocking), and
// cycles the complete density matrix through evolve -> pinch -> damp.
inline Eigen::MatrixXd brute_force_projected(const zenospin::SpinSystem& system,
                                             const Eigen::VectorXd& initial_polarizations,
                                             double tau, int cycles, double epsilon = 0.0,
                                             double damping_per_s = 0.0,
                                             const zenospin::Convention& convention = {}) {
  using namespace zenospin;
  const int n = system.n;
  const int dim = basis_dim(n);
  const Eigen::MatrixXd h = build_hamiltonian(system, convention);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  const Eigen::MatrixXcd u = solver.eigenvectors().cast<std::complex<double>>() *
                             (std::complex<double>(0.0, -tau) * solver.eigenvalues().array())
                                 .exp()
                                 .matrix()
                                 .asDiagonal() *
                             solver.eigenvectors().transpose().cast<std::complex<double>>();

  const PopulationState p0 = initial_population(system, initial_polarizations);
  Eigen::MatrixXcd rho = p0.populations.cast<std::complex<double>>().asDiagonal();

  Eigen::MatrixXd traj(cycles + 1, n);
  auto record = [&](int row) {
    const Eigen::VectorXd pop = rho.diagonal().real();
    for (int i = 0; i < n; ++i) {
      double v = 0.0;
      for (int b = 0; b < dim; ++b) v += pop(b) * spin_sign(b, i);
      traj(row, i) = v;
    }
  };
  record(0);
  const double damp = std::exp(-damping_per_s * tau);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);
  for (int m = 1; m <= cycles; ++m) {
    rho = u * rho * u.adjoint();
    // pinch: keep diagonal, scale off-diagonal by epsilon
    Eigen::MatrixXcd pinched = epsilon * rho;
    pinched.diagonal() = rho.diagonal();
    rho = pinched;
    if (damping_per_s > 0.0) rho = (1.0 / dim) * id + damp * (rho - (1.0 / dim) * id);
    record(m);
  }
  return traj;
}

// Random all-to-some coupled system with |J| in [j_min, j_max]; guaranteed
// connected. Optionally assigns random signs.
inline zenospin::SpinSystem random_system(std::mt19937_64& rng, int n, double j_min = 1.0,
                                          double j_max = 10.0, bool random_signs = false,
                                          double edge_probability = 0.6) {
  std::uniform_real_distribution<double> mag(j_min, j_max);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (true) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        if (unit(rng) < edge_probability) {
          double v = mag(rng);
          if (random_signs && unit(rng) < 0.5) v = -v;
          j(a, b) = j(b, a) = v;
        }
      }
    }
    // connectivity check by breadth-first reach
    std::vector<int> stack{0};
    std::vector<bool> seen(n, false);
    seen[0] = true;
    int reached = 1;
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      for (int b = 0; b < n; ++b) {
        if (!seen[b] && j(a, b) != 0.0) {
          seen[b] = true;
          ++reached;
          stack.push_back(b);
        }
      }
    }
    if (reached != n) continue;

    std::vector<std::string> labels;
    for (int i = 0; i < n; ++i) labels.push_back("s" + std::to_string(i));
    std::vector<zenospin::CouplingEntry> entries;
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        if (j(a, b) != 0.0) entries.push_back({labels[a], labels[b], j(a, b)});
      }
    }
    return zenospin::build_spin_system(labels, entries);
  }
}

// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("zenospin_test_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
