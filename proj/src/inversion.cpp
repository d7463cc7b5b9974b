#include "zenospin/inversion.hpp"

#include "zenospin/approx.hpp"
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

namespace zenospin {

namespace {

std::string pair_label(const BuildUpDataset& d, int ga, int gb) {
  return "(" + d.group_names[ga] + "," + d.group_names[gb] + ")";
}

int pair_index(int ga, int gb, int ngroups) {
  if (ga > gb) std::swap(ga, gb);
  // position in the a<b enumeration
  int idx = 0;
  for (int a = 0; a < ga; ++a) idx += ngroups - 1 - a;
  return idx + (gb - ga - 1);
}

std::vector<std::pair<int, int>> all_pairs(int ngroups) {
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < ngroups; ++a) {
    for (int b = a + 1; b < ngroups; ++b) pairs.emplace_back(a, b);
  }
  return pairs;
}

// slope of y(m)-y(0) ~ r m + q m^2 over m = 1..w with standard error of r
struct RateFit {
  double rate = 0.0;
  double se = 0.0;
};

RateFit fit_rate(const Eigen::VectorXd& y, int window) {
  const int npts = window;  // m = 1..window
  Eigen::MatrixXd a(npts, 2);
  Eigen::VectorXd rhs(npts);
  for (int m = 1; m <= window; ++m) {
    a(m - 1, 0) = m;
    a(m - 1, 1) = static_cast<double>(m) * m;
    rhs(m - 1) = y(m) - y(0);
  }
  const Eigen::Matrix2d ata = a.transpose() * a;
  const Eigen::Vector2d atb = a.transpose() * rhs;
  const Eigen::Vector2d coef = ata.ldlt().solve(atb);
  const Eigen::VectorXd resid = rhs - a * coef;
  const int dof = std::max(npts - 2, 1);
  const double sigma2 = resid.squaredNorm() / dof;
  const Eigen::Matrix2d cov = sigma2 * ata.inverse();
  return {coef(0), std::sqrt(std::max(cov(0, 0), 0.0))};
}

}  // namespace

Eigen::MatrixXd BuildUpDataset::group_trajectory(const Experiment& e) const {
  if (e.group_values.size() > 0) {
    if (e.group_values.cols() != n_groups() || e.group_values.rows() != e.cycles + 1) {
      throw ValidationError("experiment group trajectory has wrong shape");
    }
    return e.group_values;
  }
  if (e.site_values.size() == 0) throw ValidationError("experiment carries no trajectory data");
  if (e.site_values.cols() != n_sites() || e.site_values.rows() != e.cycles + 1) {
    throw ValidationError("experiment site trajectory has wrong shape");
  }
  Eigen::MatrixXd out(e.cycles + 1, n_groups());
  for (int g = 0; g < n_groups(); ++g) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(e.cycles + 1);
    for (int s : groups[g]) mean += e.site_values.col(s);
    out.col(g) = mean / static_cast<double>(groups[g].size());
  }
  return out;
}

Eigen::VectorXd BuildUpDataset::group_initials(const Experiment& e) const {
  const Eigen::VectorXd p = e.initial.site_polarizations(n_sites());
  Eigen::VectorXd c(n_groups());
  for (int g = 0; g < n_groups(); ++g) {
    const double first = p(groups[g][0]);
    for (int s : groups[g]) {
      if (p(s) != first) {
        throw ValidationError("initial polarization not uniform inside group '" + group_names[g] +
                              "'; group-level extraction needs group-uniform preparation");
      }
    }
    c(g) = first;
  }
  return c;
}

void BuildUpDataset::validate() const {
  if (labels.empty()) throw ValidationError("dataset has no sites");
  if (groups.size() != group_names.size()) throw ValidationError("group name count mismatch");
  if (experiments.empty()) throw ValidationError("dataset has no experiments");
  for (const auto& e : experiments) {
    if (e.tau <= 0.0) throw ValidationError("experiment tau must be > 0");
    if (e.cycles < 2) throw ValidationError("experiment needs at least 2 cycles");
    group_trajectory(e);
    group_initials(e);
  }
}

std::vector<ExperimentSlopes> shorttau_slopes(const BuildUpDataset& dataset) {
  dataset.validate();
  std::vector<ExperimentSlopes> out;
  out.reserve(dataset.experiments.size());

  for (const auto& e : dataset.experiments) {
    const Eigen::MatrixXd traj = dataset.group_trajectory(e);
    const Eigen::VectorXd c = dataset.group_initials(e);
    const Eigen::VectorXd p0 = e.initial.site_polarizations(dataset.n_sites());
    const double asymptote = p0.sum() / dataset.n_sites();

    ExperimentSlopes slopes;
    for (int g = 0; g < dataset.n_groups(); ++g) {
      (c(g) == 0.0 ? slopes.cold_groups : slopes.warm_groups).push_back(g);
    }
    if (slopes.cold_groups.empty()) {
      throw ValidationError("experiment '" + e.source + "' has no unpolarized group: not a build-up experiment");
    }
    if (asymptote <= 0.0) {
      throw ValidationError("experiment '" + e.source + "' has non-positive equipartition asymptote; cannot window");
    }

    // shared early window: every cold build-up below 25% of the asymptote
    int window = e.cycles;
    for (int g : slopes.cold_groups) {
      for (int m = 0; m <= e.cycles; ++m) {
        if (traj(m, g) >= 0.25 * asymptote) {
          window = std::min(window, m - 1);
          break;
        }
      }
    }
    if (window < 3) {
      throw ValidationError("early window too short (" + std::to_string(window) +
                            " cycles) in experiment '" + e.source + "'; need >= 3");
    }
    slopes.window = window;

    const double drop_tolerance = 8.0 * e.noise_level + 1e-9;
    for (int g : slopes.cold_groups) {
      double running_max = traj(0, g);
      for (int m = 1; m <= window; ++m) {
        if (running_max - traj(m, g) > drop_tolerance) {
          throw ValidationError("non-monotone early build-up in group '" + dataset.group_names[g] +
                                "' of experiment '" + e.source + "'");
        }
        running_max = std::max(running_max, traj(m, g));
      }
      const RateFit fit = fit_rate(traj.col(g), window);
      slopes.cross_rate.push_back(fit.rate);
      slopes.cross_rate_se.push_back(fit.se);
    }
    for (int g : slopes.warm_groups) {
      // decay form P(m) ~ P(0)(1 - s m): fit P(0)-P(m), normalize by P(0)
      const Eigen::VectorXd flipped = traj(0, g) - traj.col(g).array();
      const RateFit fit = fit_rate(flipped, window);
      slopes.self_decay_rate.push_back(fit.rate / traj(0, g));
      slopes.self_decay_se.push_back(fit.se / std::abs(traj(0, g)));
    }
    out.push_back(std::move(slopes));
  }
  return out;
}

std::string method_name(EstimateMethod method) {
  return method == EstimateMethod::short_tau_ratio ? "short_tau_ratio" : "least_squares";
}

const PairEstimate& CouplingEstimate::pair(int ga, int gb) const {
  if (ga > gb) std::swap(ga, gb);
  for (const auto& p : pairs) {
    if (p.group_a == ga && p.group_b == gb) return p;
  }
  throw ValidationError("no estimate for group pair (" + std::to_string(ga) + "," + std::to_string(gb) + ")");
}

CouplingEstimate estimate_couplings_shorttau(const BuildUpDataset& dataset) {
  const auto slopes = shorttau_slopes(dataset);
  const int ngroups = dataset.n_groups();
  const auto pairs = all_pairs(ngroups);
  const int nunknowns = static_cast<int>(pairs.size());
  if (nunknowns == 0) throw ValidationError("dataset has a single group: no couplings to estimate");

  // rows: cold-group build-up rates, linear in x_q = J_eff,q^2
  std::vector<Eigen::VectorXd> row_coeffs;
  std::vector<double> row_rhs, row_weight;
  for (size_t ei = 0; ei < dataset.experiments.size(); ++ei) {
    const auto& e = dataset.experiments[ei];
    const auto& sl = slopes[ei];
    const Eigen::VectorXd c = dataset.group_initials(e);
    const double quad = 0.5 * dataset.convention.angular_factor * e.tau;  // pi tau
    for (size_t k = 0; k < sl.cold_groups.size(); ++k) {
      const int gb = sl.cold_groups[k];
      Eigen::VectorXd coeff = Eigen::VectorXd::Zero(nunknowns);
      for (int ga = 0; ga < ngroups; ++ga) {
        if (ga == gb || c(ga) == 0.0) continue;
        coeff(pair_index(ga, gb, ngroups)) +=
            c(ga) * static_cast<double>(dataset.groups[ga].size()) * quad * quad;
      }
      const double se = sl.cross_rate_se[k];
      const double floor = 1e-12 + 1e-6 * std::abs(sl.cross_rate[k]);
      row_coeffs.push_back(coeff);
      row_rhs.push_back(sl.cross_rate[k]);
      row_weight.push_back(1.0 / (se * se + floor * floor));
    }
  }

  const int nrows = static_cast<int>(row_rhs.size());
  Eigen::MatrixXd a(nrows, nunknowns);
  Eigen::VectorXd b(nrows);
  for (int r = 0; r < nrows; ++r) {
    const double sw = std::sqrt(row_weight[r]);
    a.row(r) = sw * row_coeffs[r].transpose();
    b(r) = sw * row_rhs[r];
  }

  // identifiability: pairs whose column never appears, or rank deficiency
  std::vector<int> dead_columns;
  for (int q = 0; q < nunknowns; ++q) {
    if (a.col(q).cwiseAbs().maxCoeff() == 0.0) dead_columns.push_back(q);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-10);
  if (!dead_columns.empty() || qr.rank() < nunknowns) {
    std::string msg = "underdetermined coupling pairs:";
    if (!dead_columns.empty()) {
      for (int q : dead_columns) msg += " " + pair_label(dataset, pairs[q].first, pairs[q].second);
    } else {
      msg += " rank " + std::to_string(qr.rank()) + " < " + std::to_string(nunknowns);
    }
    throw ValidationError(msg + "; add excitation experiments covering them");
  }

  const Eigen::VectorXd x = qr.solve(b);
  const Eigen::VectorXd resid = b - a * x;
  const int dof = std::max(nrows - nunknowns, 1);
  const double sigma2 = resid.squaredNorm() / dof;
  const Eigen::MatrixXd cov = (a.transpose() * a).inverse();

  CouplingEstimate est;
  est.method = EstimateMethod::short_tau_ratio;
  est.diagnostics.residual_norm = resid.norm();
  est.diagnostics.observation_count = nrows;
  for (const auto& sl : slopes) est.diagnostics.windows.push_back(sl.window);

  for (int q = 0; q < nunknowns; ++q) {
    PairEstimate pe;
    pe.group_a = pairs[q].first;
    pe.group_b = pairs[q].second;
    const double xq = x(q);
    // weighted-LS variance of x_q; for homoscedastic exact weights sigma2 ~ 1
    const double var_x = std::max(cov(q, q), 0.0) * std::max(sigma2, 1.0);
    if (xq > 0.0) {
      pe.j_hz = std::sqrt(xq);
      pe.se_hz = 0.5 * std::sqrt(var_x) / pe.j_hz;
    } else {
      pe.j_hz = 0.0;
      pe.se_hz = std::sqrt(std::sqrt(var_x));
      if (xq < -std::sqrt(var_x)) {
        est.diagnostics.notes.push_back("pair " + pair_label(dataset, pe.group_a, pe.group_b) +
                                        " fit significantly negative J^2; clamped to 0");
      }
    }
    est.pairs.push_back(pe);
  }

  // validity of the extracted regime
  double worst_jtau = 0.0;
  for (const auto& e : dataset.experiments) {
    for (const auto& pe : est.pairs) worst_jtau = std::max(worst_jtau, pe.j_hz * e.tau);
  }
  if (worst_jtau > kSmallTauRefuse) {
    throw ValidationError("extracted couplings violate the small-tau regime (max |J| tau = " +
                          std::to_string(worst_jtau) + "); re-acquire with smaller tau");
  }
  if (worst_jtau > kSmallTauWarn) {
    est.diagnostics.notes.push_back("max |J| tau = " + std::to_string(worst_jtau) +
                                    " beyond the warn threshold; consider smaller tau");
  }

  // self-decay consistency (the paper's alternative extraction route)
  for (size_t ei = 0; ei < dataset.experiments.size(); ++ei) {
    const auto& e = dataset.experiments[ei];
    const auto& sl = slopes[ei];
    const Eigen::VectorXd c = dataset.group_initials(e);
    const double quad = 0.5 * dataset.convention.angular_factor * e.tau;
    for (size_t k = 0; k < sl.warm_groups.size(); ++k) {
      const int ga = sl.warm_groups[k];
      double predicted = 0.0;
      for (int gb = 0; gb < ngroups; ++gb) {
        if (gb == ga) continue;
        const double x_ab = [&] {
          const auto& pe = est.pair(ga, gb);
          return pe.j_hz * pe.j_hz;
        }();
        predicted += (c(ga) - c(gb)) / c(ga) * static_cast<double>(dataset.groups[gb].size()) *
                     quad * quad * x_ab;
      }
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "experiment %zu self-decay of '%s': fitted %.3e/cycle vs predicted %.3e/cycle",
                    ei, dataset.group_names[ga].c_str(), sl.self_decay_rate[k], predicted);
      est.diagnostics.notes.push_back(buf);
    }
  }
  return est;
}

SpinSystem dataset_system(const BuildUpDataset& dataset, const std::vector<PairEstimate>& pairs) {
  SpinSystem sys;
  sys.n = dataset.n_sites();
  sys.labels = dataset.labels;
  sys.groups = dataset.groups;
  sys.group_names = dataset.group_names;
  sys.couplings = Eigen::MatrixXd::Zero(sys.n, sys.n);
  for (const auto& pe : pairs) {
    for (int i : dataset.groups[pe.group_a]) {
      for (int j : dataset.groups[pe.group_b]) {
        sys.couplings(i, j) = sys.couplings(j, i) = pe.j_hz;
      }
    }
  }
  validate_spin_system(sys);
  return sys;
}

std::vector<Eigen::MatrixXd> forward_group_trajectories(const BuildUpDataset& dataset,
                                                        const std::vector<PairEstimate>& pairs,
                                                        double damping_per_s) {
  const SpinSystem sys = dataset_system(dataset, pairs);
  const auto propagator =
      std::make_shared<const SectorPropagator>(build_sector_hamiltonians(sys, dataset.convention));
  std::vector<Eigen::MatrixXd> out;
  out.reserve(dataset.experiments.size());
  for (const auto& e : dataset.experiments) {
    const TransferKernel kernel = transfer_kernel(propagator, e.tau);
    ProjectionSpec proj;
    proj.damping_per_s = damping_per_s;
    const PopulationState p0 = initial_population(sys, e.initial.site_polarizations(sys.n));
    out.push_back(evolve_projected(kernel, sys, p0, e.cycles, proj).group_values);
  }
  return out;
}

namespace {

Eigen::VectorXd stack_residuals(const BuildUpDataset& dataset,
                                const std::vector<Eigen::MatrixXd>& model) {
  int total = 0;
  for (const auto& e : dataset.experiments) total += (e.cycles + 1) * dataset.n_groups();
  Eigen::VectorXd r(total);
  int at = 0;
  for (size_t ei = 0; ei < dataset.experiments.size(); ++ei) {
    const Eigen::MatrixXd data = dataset.group_trajectory(dataset.experiments[ei]);
    const Eigen::MatrixXd diff = data - model[ei];
    for (int g = 0; g < diff.cols(); ++g) {
      r.segment(at, diff.rows()) = diff.col(g);
      at += static_cast<int>(diff.rows());
    }
  }
  return r;
}

}  // namespace

CouplingEstimate refine_fit(const BuildUpDataset& dataset, const CouplingEstimate& initial,
                            const RefineOptions& options) {
  dataset.validate();
  if (initial.pairs.empty()) throw ValidationError("refine_fit needs an initial estimate");

  const int npairs = static_cast<int>(initial.pairs.size());
  const int nparams = npairs + (options.fit_damping ? 1 : 0);
  Eigen::VectorXd theta(nparams);
  for (int q = 0; q < npairs; ++q) theta(q) = initial.pairs[q].j_hz;
  if (options.fit_damping) {
    theta(npairs) = options.initial_damping_per_s > 0.0 ? options.initial_damping_per_s
                                                        : initial.damping_per_s;
  }

  auto pairs_for = [&](const Eigen::VectorXd& t) {
    std::vector<PairEstimate> pairs = initial.pairs;
    for (int q = 0; q < npairs; ++q) pairs[q].j_hz = std::abs(t(q));
    return pairs;
  };
  auto damping_for = [&](const Eigen::VectorXd& t) {
    return options.fit_damping ? std::abs(t(npairs)) : initial.damping_per_s;
  };
  auto residuals_for = [&](const Eigen::VectorXd& t) {
    return stack_residuals(dataset, forward_group_trajectories(dataset, pairs_for(t), damping_for(t)));
  };

  Eigen::VectorXd resid = residuals_for(theta);
  double cost = resid.squaredNorm();
  const int nobs = static_cast<int>(resid.size());

  double mu = 1e-3;
  bool converged = false;
  int iterations = 0;
  Eigen::MatrixXd jac(nobs, nparams);
  for (; iterations < options.max_iterations; ++iterations) {
    for (int k = 0; k < nparams; ++k) {
      const double step = std::max(options.fd_step, options.fd_step * std::abs(theta(k)));
      Eigen::VectorXd tp = theta;
      tp(k) += step;
      jac.col(k) = (residuals_for(tp) - resid) / step;
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * resid;
    if (g.cwiseAbs().maxCoeff() < 1e-14) {
      converged = true;
      break;
    }

    bool accepted = false;
    Eigen::VectorXd step;
    while (mu < 1e10) {
      Eigen::MatrixXd damped = jtj;
      for (int k = 0; k < nparams; ++k) {
        damped(k, k) += mu * std::max(jtj(k, k), 1e-12);
      }
      step = -damped.ldlt().solve(g);
      const Eigen::VectorXd candidate = theta + step;
      const Eigen::VectorXd cr = residuals_for(candidate);
      const double ccost = cr.squaredNorm();
      if (ccost < cost) {
        theta = candidate;
        resid = cr;
        cost = ccost;
        mu = std::max(mu / 3.0, 1e-12);
        accepted = true;
        break;
      }
      mu *= 2.0;
    }
    if (!accepted) break;  // damping exhausted: local minimum to working precision
    if (step.cwiseAbs().maxCoeff() < options.step_tolerance) {
      converged = true;
      ++iterations;
      break;
    }
  }

  CouplingEstimate refined;
  refined.method = EstimateMethod::least_squares;
  refined.pairs = pairs_for(theta);
  refined.damping_per_s = damping_for(theta);
  refined.damping_fitted = options.fit_damping;
  refined.diagnostics.iterations = iterations;
  refined.diagnostics.converged = converged || iterations < options.max_iterations;
  refined.diagnostics.residual_norm = std::sqrt(cost);
  refined.diagnostics.observation_count = nobs;

  // covariance-based uncertainties at the optimum
  for (int k = 0; k < nparams; ++k) {
    const double step = std::max(options.fd_step, options.fd_step * std::abs(theta(k)));
    Eigen::VectorXd tp = theta;
    tp(k) += step;
    jac.col(k) = (residuals_for(tp) - resid) / step;
  }
  const double sigma2 = cost / std::max(nobs - nparams, 1);
  const Eigen::MatrixXd cov =
      sigma2 * (jac.transpose() * jac)
                   .ldlt()
                   .solve(Eigen::MatrixXd::Identity(nparams, nparams));
  for (int q = 0; q < npairs; ++q) {
    refined.pairs[q].se_hz = std::sqrt(std::max(cov(q, q), 0.0));
    if (std::abs(theta(q)) < 1e-9) {
      refined.diagnostics.hit_bound = true;
      refined.diagnostics.notes.push_back("coupling for pair index " + std::to_string(q) +
                                          " pinned at the non-negativity bound");
    }
  }
  if (!refined.diagnostics.converged) {
    refined.diagnostics.notes.push_back("iteration cap reached; returning best-so-far parameters");
  }
  return refined;
}

BootstrapReport bootstrap_uncertainty(const BuildUpDataset& dataset,
                                      const CouplingEstimate& estimate, int replicates,
                                      std::uint64_t seed) {
  dataset.validate();
  if (replicates < 10) throw ValidationError("bootstrap needs at least 10 replicates");

  const auto model =
      forward_group_trajectories(dataset, estimate.pairs, estimate.damping_per_s);

  // residual pool per experiment, excluding the pinned m = 0 row
  std::vector<std::vector<double>> pools(dataset.experiments.size());
  int total_points = 0;
  double residual_rms = 0.0;
  for (size_t ei = 0; ei < dataset.experiments.size(); ++ei) {
    const Eigen::MatrixXd diff =
        dataset.group_trajectory(dataset.experiments[ei]) - model[ei];
    for (int m = 1; m < diff.rows(); ++m) {
      for (int g = 0; g < diff.cols(); ++g) {
        pools[ei].push_back(diff(m, g));
        residual_rms += diff(m, g) * diff(m, g);
        ++total_points;
      }
    }
  }
  if (total_points < 10) throw ValidationError("too few trajectory points to bootstrap");
  residual_rms = std::sqrt(residual_rms / total_points);

  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> samples(estimate.pairs.size());
  for (int rep = 0; rep < replicates; ++rep) {
    BuildUpDataset synth = dataset;
    for (size_t ei = 0; ei < synth.experiments.size(); ++ei) {
      auto& e = synth.experiments[ei];
      const auto& pool = pools[ei];
      std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
      Eigen::MatrixXd traj = model[ei];
      for (int m = 1; m < traj.rows(); ++m) {
        for (int g = 0; g < traj.cols(); ++g) traj(m, g) += pool[pick(rng)];
      }
      e.group_values = traj;
      e.site_values.resize(0, 0);
      e.noise_level = std::max(e.noise_level, residual_rms);
    }
    CouplingEstimate rep_est;
    if (estimate.method == EstimateMethod::short_tau_ratio) {
      rep_est = estimate_couplings_shorttau(synth);
    } else {
      RefineOptions opts;
      rep_est = refine_fit(synth, estimate, opts);
    }
    for (size_t q = 0; q < estimate.pairs.size(); ++q) {
      samples[q].push_back(rep_est.pairs[q].j_hz);
    }
  }

  BootstrapReport report;
  report.replicates = replicates;
  report.seed = seed;
  report.method = estimate.method;
  for (size_t q = 0; q < estimate.pairs.size(); ++q) {
    PairEstimate pe = estimate.pairs[q];
    double mean = 0.0;
    for (double v : samples[q]) mean += v;
    mean /= replicates;
    double var = 0.0;
    for (double v : samples[q]) var += (v - mean) * (v - mean);
    var /= std::max(replicates - 1, 1);
    pe.j_hz = mean;
    pe.se_hz = std::sqrt(var);
    report.pairs.push_back(pe);
  }
  return report;
}

}  // namespace zenospin
