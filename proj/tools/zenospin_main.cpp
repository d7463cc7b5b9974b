// zenospin command-line interface: simulate / sweep-tau / fit / predict /
// preset-list over projected spin-network dynamics.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "zenospin/commands.hpp"

namespace {

using zenospin::InitialSpecText;
using zenospin::ScenarioConfig;

struct ScenarioFlags {
  std::string config_path;
  std::string system;
  std::string mode;
  std::string excite, deplete, custom, op;
  double tau = -1.0;
  int cycles = -1;
  double epsilon = -1.0;
  double damping = -1.0;
  std::vector<double> times;
  std::string out;
};

void add_scenario_flags(CLI::App* app, ScenarioFlags& f, bool with_mode) {
  app->add_option("--config", f.config_path, "Scenario config file (flags override it)");
  app->add_option("--system", f.system, "Preset name or spin-system file");
  if (with_mode) app->add_option("--mode", f.mode, "projected or coherent");
  app->add_option("--excite", f.excite, "Comma-separated site labels to polarize");
  app->add_option("--deplete", f.deplete, "Comma-separated site labels to empty");
  app->add_option("--custom", f.custom, "Comma-separated per-site polarizations");
  if (with_mode) {
    app->add_option("--op", f.op, "Coherent initial operator, <site>,<axis>");
    app->add_option("--times", f.times, "Coherent grid: start step stop (s)")->expected(3);
  }
  app->add_option("--tau", f.tau, "Projection cycle time (s)");
  app->add_option("--cycles", f.cycles, "Number of projection cycles M");
  app->add_option("--epsilon", f.epsilon, "Off-diagonal retention per projection, 0 = ideal");
  app->add_option("--damping", f.damping, "Uniform damping rate (1/s)");
  app->add_option("--out", f.out, "Output CSV path");
}

ScenarioConfig build_scenario(const ScenarioFlags& f) {
  ScenarioConfig cfg;
  if (!f.config_path.empty()) cfg = zenospin::read_scenario(f.config_path);
  if (!f.system.empty()) cfg.system_ref = f.system;
  if (!f.mode.empty()) cfg.mode = f.mode;
  int initial_flags = 0;
  for (const auto* s : {&f.excite, &f.deplete, &f.custom, &f.op}) {
    if (!s->empty()) ++initial_flags;
  }
  if (initial_flags > 1) {
    throw zenospin::ValidationError("give at most one of --excite/--deplete/--custom/--op");
  }
  if (!f.excite.empty()) cfg.initial = zenospin::parse_initial_spec("excite:" + f.excite);
  if (!f.deplete.empty()) cfg.initial = zenospin::parse_initial_spec("deplete:" + f.deplete);
  if (!f.custom.empty()) cfg.initial = zenospin::parse_initial_spec("custom:" + f.custom);
  if (!f.op.empty()) cfg.initial = zenospin::parse_initial_spec("op:" + f.op);
  if (f.tau >= 0.0) cfg.tau_s = f.tau;
  if (f.cycles >= 0) cfg.cycles = f.cycles;
  if (f.epsilon >= 0.0) cfg.epsilon = f.epsilon;
  if (f.damping >= 0.0) cfg.damping_per_s = f.damping;
  if (!f.times.empty()) {
    cfg.time_start = f.times[0];
    cfg.time_step = f.times[1];
    cfg.time_stop = f.times[2];
  }
  if (!f.out.empty()) cfg.out = f.out;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"projected spin-network dynamics and coupling extraction"};
  app.require_subcommand(1);

  ScenarioFlags sim_flags;
  CLI::App* sim = app.add_subcommand("simulate", "Run one projected or coherent scenario");
  add_scenario_flags(sim, sim_flags, /*with_mode=*/true);

  ScenarioFlags sweep_flags;
  std::vector<double> sweep_taus;
  double sweep_total_time = 0.0;
  CLI::App* sweep = app.add_subcommand("sweep-tau", "Compare taus at a fixed total time budget");
  add_scenario_flags(sweep, sweep_flags, /*with_mode=*/false);
  sweep->add_option("--tau-list", sweep_taus, "Cycle times to compare (s)")->delimiter(',');
  sweep->add_option("--total-time", sweep_total_time, "Total evolution time budget (s)");

  zenospin::FitConfig fit_config;
  CLI::App* fit = app.add_subcommand("fit", "Extract couplings from trajectory files");
  fit->add_option("--manifest", fit_config.manifest_path, "Experiment manifest file")->required();
  fit->add_flag("--refine", fit_config.refine, "Least-squares refinement after the ratio route");
  fit->add_flag("--fit-damping", fit_config.fit_damping, "Also fit the uniform damping rate");
  fit->add_option("--bootstrap", fit_config.bootstrap_replicates, "Bootstrap replicates (>= 10)");
  fit->add_option("--seed", fit_config.seed, "Bootstrap seed");
  fit->add_option("--report", fit_config.report_path, "Write the text report here");
  fit->add_option("--estimates", fit_config.estimates_path, "Write the estimates CSV here");

  std::string predict_system, predict_excite, predict_deplete, predict_custom;
  CLI::App* predict = app.add_subcommand("predict", "Equipartition asymptote for an initial state");
  predict->add_option("--system", predict_system, "Preset name or spin-system file")->required();
  predict->add_option("--excite", predict_excite, "Comma-separated site labels to polarize");
  predict->add_option("--deplete", predict_deplete, "Comma-separated site labels to empty");
  predict->add_option("--custom", predict_custom, "Comma-separated per-site polarizations");

  app.add_subcommand("preset-list", "List built-in spin systems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (sim->parsed()) {
      const auto out = zenospin::cmd_simulate(build_scenario(sim_flags));
      std::cout << "wrote " << out.csv_path << " and " << out.csv_path << ".meta\n";
    } else if (sweep->parsed()) {
      ScenarioConfig base = build_scenario(sweep_flags);
      base.mode = "projected";
      const auto out = zenospin::cmd_sweep_tau(base, sweep_taus, sweep_total_time);
      std::cout << out.table;
    } else if (fit->parsed()) {
      const auto out = zenospin::cmd_fit(fit_config);
      std::cout << out.report;
      if (!out.estimate.diagnostics.converged) return 3;
    } else if (predict->parsed()) {
      int initial_flags = 0;
      InitialSpecText initial;
      if (!predict_excite.empty()) {
        initial = zenospin::parse_initial_spec("excite:" + predict_excite);
        ++initial_flags;
      }
      if (!predict_deplete.empty()) {
        initial = zenospin::parse_initial_spec("deplete:" + predict_deplete);
        ++initial_flags;
      }
      if (!predict_custom.empty()) {
        initial = zenospin::parse_initial_spec("custom:" + predict_custom);
        ++initial_flags;
      }
      if (initial_flags != 1) {
        throw zenospin::ValidationError("predict needs exactly one of --excite/--deplete/--custom");
      }
      std::cout << zenospin::cmd_predict(predict_system, initial);
    } else {
      std::cout << zenospin::cmd_preset_list();
    }
  } catch (const zenospin::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const zenospin::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
