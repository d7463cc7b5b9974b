#include "zenospin/approx.hpp"

#include <cmath>
#include <string>

namespace zenospin {

TwoSpinTransfer two_spin_transfer(double j_hz, double tau, const Convention& convention) {
  if (tau < 0.0) throw ValidationError("tau must be >= 0");
  const double c = std::cos(convention.angular_factor * j_hz * tau);
  return {0.5 * (1.0 + c), 0.5 * (1.0 - c)};
}

Eigen::MatrixXd SmallTauModel::power(int m) const {
  if (m < 0) throw ValidationError("cycle count must be >= 0");
  const int n = static_cast<int>(per_cycle.rows());
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd base = per_cycle;
  while (m > 0) {
    if (m & 1) result = result * base;
    base = base * base;
    m >>= 1;
  }
  return result;
}

SmallTauModel small_tau_kernel(const SpinSystem& system, double tau, const Convention& convention) {
  validate_spin_system(system);
  if (tau < 0.0) throw ValidationError("tau must be >= 0");
  const int n = system.n;

  SmallTauModel model;
  model.tau = tau;
  model.convention = convention;
  model.max_jtau = system.couplings.cwiseAbs().maxCoeff() * tau;
  if (model.max_jtau > kSmallTauRefuse) {
    throw ValidationError("small-tau model invalid: max |J| tau = " + std::to_string(model.max_jtau) +
                          " exceeds " + std::to_string(kSmallTauRefuse));
  }
  model.beyond_warn_threshold = model.max_jtau > kSmallTauWarn;

  model.per_cycle.resize(n, n);
  const double half_factor = 0.5 * convention.angular_factor;  // pi under 2*pi
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double a = half_factor * system.couplings(i, j) * tau;
      model.per_cycle(i, j) = a * a;
      row += a * a;
    }
    model.per_cycle(i, i) = 1.0 - row;
  }
  return model;
}

Eigen::MatrixXd exact_site_kernel(const TransferKernel& kernel, const SpinSystem& system) {
  const int n = system.n;
  if (kernel.n != n) throw ValidationError("system/kernel size mismatch");
  Eigen::MatrixXd map(n, n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd p0 = Eigen::VectorXd::Zero(n);
    p0(i) = 1.0;
    PopulationState state = initial_population(system, p0);
    state.populations = kernel.apply(state.populations);
    map.col(i) = site_polarizations(state);
  }
  return map;
}

EquilibriumPrediction equilibrium_prediction(const SpinSystem& system,
                                             const Eigen::VectorXd& initial_polarizations) {
  if (initial_polarizations.size() != system.n) {
    throw ValidationError("polarization vector has wrong length");
  }
  EquilibriumPrediction pred;
  pred.per_site = initial_polarizations.sum() / system.n;
  pred.group_names = system.group_names;
  pred.group_values.assign(system.groups.size(), pred.per_site);
  return pred;
}

}  // namespace zenospin
