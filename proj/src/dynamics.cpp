#include "zenospin/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace zenospin {

using complexd = std::complex<double>;

void PopulationState::validate() const {
  if (populations.size() != basis_dim(n)) throw ValidationError("population vector has wrong length");
  const double sum = populations.sum();
  if (std::abs(sum - 1.0) > 1e-12) {
    throw ValidationError("populations sum to " + std::to_string(sum) + ", expected 1");
  }
  if ((populations.array() < -1e-14).any()) {
    throw ValidationError("negative population entry beyond tolerance");
  }
}

Eigen::VectorXd InitialSpec::site_polarizations(int n) const {
  Eigen::VectorXd p;
  switch (kind) {
    case Kind::excite:
      p = Eigen::VectorXd::Zero(n);
      for (int s : sites) {
        if (s < 0 || s >= n) throw ValidationError("initial-state site index out of range");
        p(s) = 1.0;
      }
      break;
    case Kind::deplete:
      p = Eigen::VectorXd::Ones(n);
      for (int s : sites) {
        if (s < 0 || s >= n) throw ValidationError("initial-state site index out of range");
        p(s) = 0.0;
      }
      break;
    case Kind::custom:
      if (custom.size() != n) throw ValidationError("custom polarization vector has wrong length");
      p = custom;
      break;
  }
  if ((p.array().abs() > 1.0 + 1e-12).any()) {
    throw ValidationError("site polarization outside [-1, 1]");
  }
  return p;
}

InitialSpec InitialSpec::excite(std::vector<int> sites) {
  InitialSpec s;
  s.kind = Kind::excite;
  s.sites = std::move(sites);
  return s;
}

InitialSpec InitialSpec::deplete(std::vector<int> sites) {
  InitialSpec s;
  s.kind = Kind::deplete;
  s.sites = std::move(sites);
  return s;
}

InitialSpec InitialSpec::from_vector(Eigen::VectorXd p) {
  InitialSpec s;
  s.kind = Kind::custom;
  s.custom = std::move(p);
  return s;
}

PopulationState initial_population(const SpinSystem& system, const Eigen::VectorXd& polarizations) {
  const int n = system.n;
  if (polarizations.size() != n) throw ValidationError("polarization vector has wrong length");
  if ((polarizations.array().abs() > 1.0 + 1e-12).any()) {
    throw ValidationError("site polarization outside [-1, 1]");
  }
  PopulationState state;
  state.n = n;
  state.populations.resize(basis_dim(n));
  for (int b = 0; b < basis_dim(n); ++b) {
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      w *= ((b >> i) & 1) ? 0.5 * (1.0 - polarizations(i)) : 0.5 * (1.0 + polarizations(i));
    }
    state.populations(b) = w;
  }
  return state;
}

Eigen::VectorXd site_polarizations(const PopulationState& state) {
  const int n = state.n;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  for (int b = 0; b < basis_dim(n); ++b) {
    const double w = state.populations(b);
    if (w == 0.0) continue;
    for (int i = 0; i < n; ++i) p(i) += w * spin_sign(b, i);
  }
  return p;
}

SectorPropagator::SectorPropagator(SectorDecomposition sectors) : sectors_(std::move(sectors)) {
  eigenvalues_.reserve(sectors_.sectors.size());
  eigenvectors_.reserve(sectors_.sectors.size());
  for (const auto& sec : sectors_.sectors) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sec.block);
    if (solver.info() != Eigen::Success) {
      throw NumericalError("eigendecomposition failed in Mz sector " + std::to_string(sec.mz_twice));
    }
    eigenvalues_.push_back(solver.eigenvalues());
    eigenvectors_.push_back(solver.eigenvectors());
  }
}

std::vector<Eigen::MatrixXcd> SectorPropagator::unitaries(double tau) const {
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(eigenvalues_.size());
  for (size_t s = 0; s < eigenvalues_.size(); ++s) {
    const Eigen::VectorXcd phases =
        (complexd(0.0, -tau) * eigenvalues_[s].array()).exp().matrix();
    out.push_back(eigenvectors_[s].cast<complexd>() * phases.asDiagonal() *
                  eigenvectors_[s].transpose().cast<complexd>());
  }
  return out;
}

Eigen::MatrixXcd SectorPropagator::full_unitary(double tau) const {
  const int dim = basis_dim(sectors_.n);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim, dim);
  const auto blocks = unitaries(tau);
  for (size_t s = 0; s < blocks.size(); ++s) {
    const auto& states = sectors_.sectors[s].states;
    const int d = static_cast<int>(states.size());
    for (int p = 0; p < d; ++p) {
      for (int q = 0; q < d; ++q) u(states[p], states[q]) = blocks[s](p, q);
    }
  }
  return u;
}

Eigen::MatrixXcd pinch(const Eigen::MatrixXcd& rho, double epsilon) {
  if (epsilon < 0.0 || epsilon > 1.0) throw ValidationError("pinch retention must be in [0, 1]");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-9) {
    throw ValidationError("pinch input is not Hermitian within 1e-9");
  }
  if (epsilon == 1.0) return rho;
  Eigen::MatrixXcd out = epsilon * rho;
  out.diagonal() = rho.diagonal();
  return out;
}

void ProjectionSpec::validate() const {
  if (epsilon < 0.0 || epsilon > 1.0) throw ValidationError("projection fidelity epsilon must be in [0, 1]");
  if (!(damping_per_s >= 0.0)) throw ValidationError("damping rate must be >= 0");
}

Eigen::VectorXd TransferKernel::apply(const Eigen::VectorXd& populations) const {
  if (populations.size() != basis_dim(n)) throw ValidationError("population vector has wrong length");
  Eigen::VectorXd out(populations.size());
  for (size_t s = 0; s < blocks.size(); ++s) {
    const auto& states = sector_states[s];
    const int d = static_cast<int>(states.size());
    Eigen::VectorXd sub(d);
    for (int p = 0; p < d; ++p) sub(p) = populations(states[p]);
    const Eigen::VectorXd mixed = blocks[s] * sub;
    for (int p = 0; p < d; ++p) out(states[p]) = mixed(p);
  }
  return out;
}

Eigen::MatrixXd TransferKernel::assemble() const {
  const int dim = basis_dim(n);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(dim, dim);
  for (size_t s = 0; s < blocks.size(); ++s) {
    const auto& states = sector_states[s];
    const int d = static_cast<int>(states.size());
    for (int p = 0; p < d; ++p) {
      for (int q = 0; q < d; ++q) t(states[p], states[q]) = blocks[s](p, q);
    }
  }
  return t;
}

TransferKernel transfer_kernel(std::shared_ptr<const SectorPropagator> propagator, double tau) {
  if (!propagator) throw ValidationError("null propagator");
  if (tau < 0.0) throw ValidationError("cycle time tau must be >= 0");
  TransferKernel kernel;
  kernel.n = propagator->n();
  kernel.tau = tau;
  kernel.convention = propagator->sectors().convention;
  kernel.propagator = propagator;
  const auto unitaries = propagator->unitaries(tau);
  for (size_t s = 0; s < unitaries.size(); ++s) {
    kernel.blocks.push_back(unitaries[s].cwiseAbs2());
    kernel.sector_states.push_back(propagator->sectors().sectors[s].states);
  }
  return kernel;
}

namespace {

void record_row(Eigen::MatrixXd& values, int row, const Eigen::VectorXd& pop, int n) {
  for (int i = 0; i < n; ++i) values(row, i) = 0.0;
  for (int b = 0; b < basis_dim(n); ++b) {
    const double w = pop(b);
    if (w == 0.0) continue;
    for (int i = 0; i < n; ++i) values(row, i) += w * spin_sign(b, i);
  }
}

// practical bound for the full density-matrix (leaky projection) path
constexpr int kMaxSpinsDensityPath = 12;

}  // namespace

PolarizationTrajectory evolve_projected(const TransferKernel& kernel, const SpinSystem& system,
                                        const PopulationState& initial, int cycles,
                                        const ProjectionSpec& projection, int cycle_cap) {
  projection.validate();
  initial.validate();
  if (system.n != kernel.n) throw ValidationError("system/kernel size mismatch");
  if (cycles < 0) throw ValidationError("cycle count must be >= 0");
  if (cycles > cycle_cap) {
    throw ValidationError("cycle count " + std::to_string(cycles) + " exceeds cap " +
                          std::to_string(cycle_cap));
  }

  const int n = system.n;
  const int dim = basis_dim(n);
  PolarizationTrajectory traj;
  traj.labels = system.labels;
  traj.group_names = system.group_names;
  traj.tau = kernel.tau;
  traj.cycles = cycles;
  traj.projection = projection;
  traj.convention = kernel.convention;
  traj.times.resize(cycles + 1);
  for (int m = 0; m <= cycles; ++m) traj.times[m] = m * kernel.tau;
  traj.values.resize(cycles + 1, n);

  const double damping_factor = std::exp(-projection.damping_per_s * kernel.tau);
  const double uniform = 1.0 / dim;

  if (projection.epsilon == 0.0) {
    Eigen::VectorXd pop = initial.populations;
    record_row(traj.values, 0, pop, n);
    for (int m = 1; m <= cycles; ++m) {
      pop = kernel.apply(pop);
      if (projection.damping_per_s > 0.0) {
        pop = (pop.array() - uniform) * damping_factor + uniform;
      }
      record_row(traj.values, m, pop, n);
    }
  } else {
    if (n > kMaxSpinsDensityPath) {
      throw ValidationError("leaky projection (epsilon > 0) runs on the full density matrix and is limited to " +
                            std::to_string(kMaxSpinsDensityPath) + " spins");
    }
    const Eigen::MatrixXcd u = kernel.propagator->full_unitary(kernel.tau);
    Eigen::MatrixXcd rho = initial.populations.cast<complexd>().asDiagonal();
    record_row(traj.values, 0, initial.populations, n);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);
    for (int m = 1; m <= cycles; ++m) {
      rho = u * rho * u.adjoint();
      rho = pinch(rho, projection.epsilon);
      if (projection.damping_per_s > 0.0) {
        rho = uniform * id + damping_factor * (rho - uniform * id);
      }
      const Eigen::VectorXd pop = rho.diagonal().real();
      record_row(traj.values, m, pop, n);
    }
  }

  const int ngroups = static_cast<int>(system.groups.size());
  traj.group_values.resize(cycles + 1, ngroups);
  for (int g = 0; g < ngroups; ++g) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(cycles + 1);
    for (int s : system.groups[g]) mean += traj.values.col(s);
    traj.group_values.col(g) = mean / static_cast<double>(system.groups[g].size());
  }
  return traj;
}

CoherentTrajectory evolve_coherent(const SpinSystem& system, SpinAxisOp initial_op,
                                   const std::vector<double>& times,
                                   const std::vector<SpinAxisOp>& observables,
                                   const Convention& convention) {
  if (times.empty()) throw ValidationError("coherent evolution needs a non-empty time grid");
  if (observables.empty()) throw ValidationError("coherent evolution needs at least one observable");
  if (system.n > kMaxSpinsDensityPath) {
    throw ValidationError("coherent mode runs in the full 2^n space and is limited to " +
                          std::to_string(kMaxSpinsDensityPath) + " spins");
  }

  const Eigen::MatrixXd h = build_hamiltonian(system, convention);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success) throw NumericalError("full-space eigendecomposition failed");
  const Eigen::MatrixXd& v = solver.eigenvectors();
  const Eigen::VectorXd& w = solver.eigenvalues();

  const Eigen::MatrixXcd rho0 = single_spin_operator(system, initial_op.first, initial_op.second);
  const double norm = rho0.squaredNorm();  // Tr(rho0^2) for Hermitian rho0
  const Eigen::MatrixXcd rho0_eig = v.transpose() * rho0 * v;

  CoherentTrajectory traj;
  traj.times = times;
  traj.convention = convention;
  traj.values.resize(static_cast<int>(times.size()), static_cast<int>(observables.size()));
  for (const auto& [site, axis] : observables) {
    traj.observable_names.push_back(system.labels.at(site) + ":" + axis);
  }

  std::vector<Eigen::MatrixXcd> coeff;  // C_ab = Obs~_ab * rho0~_ba
  coeff.reserve(observables.size());
  for (const auto& [site, axis] : observables) {
    const Eigen::MatrixXcd obs_eig =
        v.transpose() * single_spin_operator(system, site, axis) * v;
    coeff.push_back(obs_eig.cwiseProduct(rho0_eig.transpose()));
  }

  for (size_t k = 0; k < times.size(); ++k) {
    const Eigen::VectorXcd d = (complexd(0.0, -times[k]) * w.array()).exp().matrix();
    for (size_t o = 0; o < coeff.size(); ++o) {
      // Tr(Obs rho(t)) = sum_ab C_ab conj(d_a) d_b
      const complexd val = d.dot(coeff[o] * d) / norm;
      traj.values(static_cast<int>(k), static_cast<int>(o)) = val.real();
    }
  }
  return traj;
}

}  // namespace zenospin
