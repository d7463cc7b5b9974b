#include "zenospin/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "zenospin/approx.hpp"

namespace zenospin {

namespace {

PolarizationTrajectory run_projected(const SpinSystem& system, const Convention& convention,
                                     const InitialSpec& initial, double tau, int cycles,
                                     const ProjectionSpec& projection) {
  const auto propagator =
      std::make_shared<const SectorPropagator>(build_sector_hamiltonians(system, convention));
  const TransferKernel kernel = transfer_kernel(propagator, tau);
  const PopulationState p0 = initial_population(system, initial.site_polarizations(system.n));
  return evolve_projected(kernel, system, p0, cycles, projection);
}

}  // namespace

SimulateOutput cmd_simulate(const ScenarioConfig& config) {
  config.validate();
  auto [system, convention] = resolve_system(config.system_ref);

  TrajectoryFile file;
  file.mode = config.mode;
  file.system_ref = config.system_ref;
  file.initial = *config.initial;

  if (config.mode == "projected") {
    ProjectionSpec projection;
    projection.epsilon = config.epsilon;
    projection.damping_per_s = config.damping_per_s;
    const InitialSpec initial = config.initial->resolve(system);
    file.trajectory =
        run_projected(system, convention, initial, *config.tau_s, *config.cycles, projection);
  } else {
    std::vector<double> times;
    for (double t = *config.time_start; t <= *config.time_stop + 0.5 * (*config.time_step);
         t += *config.time_step) {
      times.push_back(t);
    }
    const int site = system.site_index(config.initial->op_site);
    const char axis = config.initial->op_axis;
    std::vector<SpinAxisOp> observables;
    for (int i = 0; i < system.n; ++i) observables.emplace_back(i, axis);
    const CoherentTrajectory coh =
        evolve_coherent(system, {site, axis}, times, observables, convention);

    // shape the observable grid like a trajectory so one CSV schema serves both
    auto& t = file.trajectory;
    t.times = coh.times;
    t.values = coh.values;
    t.labels = system.labels;
    t.group_names = system.group_names;
    t.convention = convention;
    t.tau = *config.time_step;
    t.cycles = static_cast<int>(times.size()) - 1;
    t.group_values.resize(t.values.rows(), static_cast<int>(system.groups.size()));
    for (size_t g = 0; g < system.groups.size(); ++g) {
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(t.values.rows());
      for (int s : system.groups[g]) mean += t.values.col(s);
      t.group_values.col(static_cast<int>(g)) = mean / static_cast<double>(system.groups[g].size());
    }
  }

  SimulateOutput out;
  out.csv_path = resolve_output_path(config.out);
  out.file = file;
  write_trajectory_csv(file, out.csv_path);
  return out;
}

SweepOutput cmd_sweep_tau(const ScenarioConfig& base, const std::vector<double>& taus,
                          double total_time_s) {
  if (taus.size() < 2) throw ValidationError("sweep-tau needs at least 2 tau values");
  if (total_time_s <= 0.0) throw ValidationError("sweep-tau needs a positive total time budget");
  if (base.mode != "projected") throw ValidationError("sweep-tau runs projected dynamics only");
  if (!base.initial) throw ValidationError("sweep-tau needs an initial state spec");
  for (double tau : taus) {
    if (tau <= 0.0) throw ValidationError("sweep-tau values must be positive");
  }

  auto [system, convention] = resolve_system(base.system_ref);
  const InitialSpec initial = base.initial->resolve(system);
  const Eigen::VectorXd p0 = initial.site_polarizations(system.n);
  std::vector<int> cold_sites;
  for (int i = 0; i < system.n; ++i) {
    if (p0(i) == 0.0) cold_sites.push_back(i);
  }
  const double total0 = p0.sum();
  if (cold_sites.empty() || total0 <= 0.0) {
    throw ValidationError("sweep-tau needs an initial state with polarized and unpolarized sites");
  }
  const double equilibrium = total0 / system.n;

  ProjectionSpec projection;
  projection.epsilon = base.epsilon;
  projection.damping_per_s = base.damping_per_s;

  SweepOutput out;
  std::ostringstream table;
  table << "tau_s,cycles,transferred_fraction,equipartition_distance,monotonicity_violations\n";
  for (double tau : taus) {
    const int cycles = std::max(1, static_cast<int>(std::lround(total_time_s / tau)));
    const PolarizationTrajectory traj =
        run_projected(system, convention, initial, tau, cycles, projection);

    SweepRow row;
    row.tau_s = tau;
    row.cycles = cycles;
    double incoming = 0.0;
    for (int s : cold_sites) incoming += traj.values(cycles, s);
    row.transferred_fraction = incoming / total0;
    row.equipartition_distance =
        (traj.values.row(cycles).array() - equilibrium).abs().maxCoeff();
    int violations = 0;
    for (int i = 0; i < system.n; ++i) {
      const double direction = traj.values(cycles, i) >= traj.values(0, i) ? 1.0 : -1.0;
      for (int m = 0; m < cycles; ++m) {
        const double step = traj.values(m + 1, i) - traj.values(m, i);
        if (-direction * step > 0.01) ++violations;
      }
    }
    row.monotonicity_violations = violations;
    out.rows.push_back(row);

    table << format_double(row.tau_s) << "," << row.cycles << ","
          << format_double(row.transferred_fraction) << ","
          << format_double(row.equipartition_distance) << "," << row.monotonicity_violations
          << "\n";
  }
  out.table = table.str();

  if (!base.out.empty()) {
    const std::string path = resolve_output_path(base.out);
    std::ostringstream file;
    file << "# zenospin-sweep v1\n";
    file << "# angular_factor " << format_double(convention.angular_factor) << "\n";
    file << "# system " << base.system_ref << "\n";
    file << "# initial " << base.initial->to_string() << "\n";
    file << "# total_time_s " << format_double(total_time_s) << "\n";
    file << out.table;
    std::ofstream ofs(path, std::ios::binary);
    if (!ofs) throw ValidationError("cannot write sweep summary '" + path + "'");
    ofs << file.str();
  }
  return out;
}

FitOutput cmd_fit(const FitConfig& config) {
  const Manifest manifest = read_manifest(config.manifest_path);
  auto [system, convention] = resolve_system(manifest.system_ref);
  const BuildUpDataset dataset = load_dataset(manifest, system, convention);

  FitOutput out;
  out.estimate = estimate_couplings_shorttau(dataset);
  if (config.refine) {
    RefineOptions options;
    options.fit_damping = config.fit_damping;
    out.estimate = refine_fit(dataset, out.estimate, options);
  }
  if (config.bootstrap_replicates > 0) {
    out.bootstrap =
        bootstrap_uncertainty(dataset, out.estimate, config.bootstrap_replicates, config.seed);
  }
  out.report = estimate_report(out.estimate, dataset, system, out.bootstrap);

  if (!config.estimates_path.empty()) {
    write_estimates_csv(out.estimate, dataset, resolve_output_path(config.estimates_path));
  }
  if (!config.report_path.empty()) {
    const std::string path = resolve_output_path(config.report_path);
    std::ofstream ofs(path, std::ios::binary);
    if (!ofs) throw ValidationError("cannot write report '" + path + "'");
    ofs << out.report;
  }
  return out;
}

std::string cmd_predict(const std::string& system_ref, const InitialSpecText& initial) {
  auto [system, convention] = resolve_system(system_ref);
  (void)convention;
  const Eigen::VectorXd p0 = initial.resolve(system).site_polarizations(system.n);
  const EquilibriumPrediction pred = equilibrium_prediction(system, p0);

  std::ostringstream out;
  out << "equipartition asymptote for " << system_ref << ", initial " << initial.to_string()
      << "\n";
  out << "per-site asymptote: " << format_double(pred.per_site) << "\n";
  for (size_t g = 0; g < pred.group_values.size(); ++g) {
    out << "group " << pred.group_names[g] << ": " << format_double(pred.group_values[g]) << "\n";
  }
  return out.str();
}

std::string cmd_preset_list() {
  std::ostringstream out;
  for (const auto& name : preset_names()) {
    const SpinSystem sys = make_preset(name);
    out << name << ": " << sys.n << " spins (";
    for (size_t g = 0; g < sys.group_names.size(); ++g) {
      out << (g ? " " : "") << sys.group_names[g];
    }
    out << ")\n";
  }
  return out.str();
}

}  // namespace zenospin
