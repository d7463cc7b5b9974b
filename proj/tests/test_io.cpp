#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "zenospin/commands.hpp"
#include "zenospin/io.hpp"

using namespace zenospin;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out);
  out << text;
}

// Runs the CLI binary through the shell; returns the exit code and captures
// stdout+stderr.
int run_cli(const std::string& args, const std::filesystem::path& dir, std::string* output) {
  const std::string log = (dir / "cli_output.txt").string();
  const std::string command = std::string(ZENOSPIN_CLI_PATH) + " " + args + " > " + log + " 2>&1";
  const int status = std::system(command.c_str());
  if (output) *output = slurp(log);
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

int count_extrema(const Eigen::VectorXd& y) {
  int extrema = 0;
  int last_sign = 0;
  for (int k = 0; k + 1 < y.size(); ++k) {
    const double d = y(k + 1) - y(k);
    const int sign = d > 1e-9 ? 1 : (d < -1e-9 ? -1 : 0);
    if (sign != 0 && last_sign != 0 && sign != last_sign) ++extrema;
    if (sign != 0) last_sign = sign;
  }
  return extrema;
}

}  // namespace

TEST_SUITE_BEGIN("io-cli");

TEST_CASE("format_double round-trips doubles exactly") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const double v = dist(rng) * std::pow(10.0, static_cast<int>(rng() % 13) - 6);
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
  CHECK(format_double(0.4) == "0.4");
  CHECK(format_double(0.0317) == "0.0317");
}

TEST_CASE("spin-system files round trip and reject bad versions") {
  const auto dir = testing::scratch_dir("spinsys");
  const SpinSystem pyr = pyridine_preset();
  const std::string path = (dir / "pyridine.spinsys").string();
  write_spin_system(pyr, Convention{}, path);

  const auto [loaded, convention] = read_spin_system(path);
  CHECK(loaded.labels == pyr.labels);
  CHECK(loaded.group_names == pyr.group_names);
  CHECK((loaded.couplings - pyr.couplings).cwiseAbs().maxCoeff() == 0.0);
  CHECK(convention.angular_factor == kTwoPi);

  spit((dir / "bad.spinsys").string(), "zenospin-spinsys v2\nsite A\n");
  CHECK_THROWS_AS(read_spin_system((dir / "bad.spinsys").string()), ValidationError);
  spit((dir / "junk.spinsys").string(), "zenospin-spinsys v1\nfrequency 3\n");
  CHECK_THROWS_WITH_AS(read_spin_system((dir / "junk.spinsys").string()),
                       doctest::Contains("unknown or malformed"), ValidationError);
}

TEST_CASE("trajectory CSV round trips values, metadata and groups") {
  const auto dir = testing::scratch_dir("traj");
  const SpinSystem pyr = pyridine_preset();
  const BuildUpDataset dataset = testing::simulate_dataset(
      pyr, {InitialSpec::excite({pyr.site_index("2"), pyr.site_index("2'")})}, 0.0317, 15);

  TrajectoryFile file;
  file.mode = "projected";
  file.system_ref = "pyridine";
  file.initial = parse_initial_spec("excite:2,2'");
  file.trajectory.labels = pyr.labels;
  file.trajectory.group_names = pyr.group_names;
  file.trajectory.tau = 0.0317;
  file.trajectory.cycles = 15;
  file.trajectory.values = dataset.experiments[0].site_values;
  file.trajectory.group_values = dataset.experiments[0].group_values;
  for (int m = 0; m <= 15; ++m) file.trajectory.times.push_back(m * 0.0317);

  const std::string path = (dir / "t.csv").string();
  write_trajectory_csv(file, path);
  CHECK(std::filesystem::exists(path + ".meta"));

  const TrajectoryFile loaded = read_trajectory_csv(path);
  CHECK(loaded.mode == "projected");
  CHECK(loaded.system_ref == "pyridine");
  CHECK(loaded.initial.to_string() == "excite:2,2'");
  CHECK(loaded.trajectory.labels == pyr.labels);
  CHECK(loaded.trajectory.group_names == pyr.group_names);
  CHECK(loaded.trajectory.tau == 0.0317);
  CHECK(loaded.trajectory.cycles == 15);
  CHECK((loaded.trajectory.values - file.trajectory.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.trajectory.group_values - file.trajectory.group_values).cwiseAbs().maxCoeff() ==
        0.0);

  // version refusal
  std::string contents = slurp(path);
  contents.replace(contents.find("v1"), 2, "v2");
  spit((dir / "v2.csv").string(), contents);
  CHECK_THROWS_AS(read_trajectory_csv((dir / "v2.csv").string()), ValidationError);
}

TEST_CASE("scenario configs parse, validate and reject unknown keys") {
  const auto dir = testing::scratch_dir("scenario");
  spit((dir / "ok.cfg").string(),
       "zenospin-scenario v1\nsystem pyridine\nmode projected\ninitial excite:2,2'\n"
       "tau_s 0.0317\ncycles 40\nout t.csv\n");
  const ScenarioConfig cfg = read_scenario((dir / "ok.cfg").string());
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.tau_s == 0.0317);
  CHECK(cfg.initial->to_string() == "excite:2,2'");

  spit((dir / "unknown.cfg").string(), "zenospin-scenario v1\nsystem pyridine\nfoo bar\n");
  CHECK_THROWS_WITH_AS(read_scenario((dir / "unknown.cfg").string()),
                       doctest::Contains("unknown or malformed scenario key"), ValidationError);

  // mode-specific validation
  ScenarioConfig missing = cfg;
  missing.tau_s.reset();
  CHECK_THROWS_WITH_AS(missing.validate(), doctest::Contains("tau_s is required"),
                       ValidationError);
  ScenarioConfig coherent = cfg;
  coherent.mode = "coherent";
  CHECK_THROWS_AS(coherent.validate(), ValidationError);  // needs op + times
}

TEST_CASE("cli: projected simulation reaches the figure plateau") {
  const auto dir = testing::scratch_dir("cli_sim");
  const std::string out = (dir / "opt.csv").string();
  std::string text;
  const int code = run_cli("simulate --system pyridine --mode projected --excite \"2,2'\" "
                           "--tau 0.0317 --cycles 40 --out " + out,
                           dir, &text);
  REQUIRE(code == 0);
  const TrajectoryFile traj = read_trajectory_csv(out);
  const Eigen::VectorXd last = traj.trajectory.values.row(40);
  for (int i = 0; i < 5; ++i) {
    CHECK(last(i) > 0.38);
    CHECK(last(i) < 0.42);
  }
}

TEST_CASE("cli: coherent simulation oscillates") {
  const auto dir = testing::scratch_dir("cli_coh");
  const std::string out = (dir / "coh.csv").string();
  const int code = run_cli("simulate --system pyridine --mode coherent --op \"2,x\" "
                           "--times 0 0.0005 0.15 --out " + out,
                           dir, nullptr);
  REQUIRE(code == 0);
  const TrajectoryFile traj = read_trajectory_csv(out);
  CHECK(traj.mode == "coherent");
  const int excited = 2;  // site "2"
  CHECK(count_extrema(traj.trajectory.values.col(excited)) >= 3);
  int total = 0;
  for (int i = 0; i < 5; ++i) total += count_extrema(traj.trajectory.values.col(i));
  CHECK(total >= 10);
}

TEST_CASE("cli: tau = 0 freezes the projected dynamics") {
  const auto dir = testing::scratch_dir("cli_frozen");
  const std::string out = (dir / "frozen.csv").string();
  const int code = run_cli("simulate --system pyridine --mode projected --excite \"2,2'\" "
                           "--tau 0 --cycles 10 --out " + out,
                           dir, nullptr);
  REQUIRE(code == 0);
  const TrajectoryFile traj = read_trajectory_csv(out);
  for (int m = 0; m <= 10; ++m) {
    CHECK((traj.trajectory.values.row(m) - traj.trajectory.values.row(0)).cwiseAbs().maxCoeff() ==
          0.0);
  }
}

TEST_CASE("cli: identical configs produce identical bytes") {
  const auto dir = testing::scratch_dir("cli_det");
  const std::string a = (dir / "a.csv").string();
  const std::string b = (dir / "b.csv").string();
  const std::string args = "simulate --system pyridine --mode projected --deplete \"1,1'\" "
                           "--tau 0.05045 --cycles 40 --epsilon 0.2 --damping 0.1 --out ";
  REQUIRE(run_cli(args + a, dir, nullptr) == 0);
  REQUIRE(run_cli(args + b, dir, nullptr) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a + ".meta") == slurp(b + ".meta"));
}

TEST_CASE("cli: config file plus flag overrides") {
  const auto dir = testing::scratch_dir("cli_cfg");
  spit((dir / "s.cfg").string(),
       "zenospin-scenario v1\nsystem pyridine\nmode projected\ninitial excite:3\n"
       "tau_s 0.002\ncycles 5\nout ignored.csv\n");
  const std::string out = (dir / "run.csv").string();
  const int code =
      run_cli("simulate --config " + (dir / "s.cfg").string() + " --cycles 7 --out " + out, dir,
              nullptr);
  REQUIRE(code == 0);
  const TrajectoryFile traj = read_trajectory_csv(out);
  CHECK(traj.trajectory.cycles == 7);   // flag wins
  CHECK(traj.trajectory.tau == 0.002);  // file value kept
  CHECK(traj.initial.to_string() == "excite:3");
}

TEST_CASE("cli: validation failures exit 2") {
  const auto dir = testing::scratch_dir("cli_err");
  std::string text;
  CHECK(run_cli("simulate --system nosuch --mode projected --excite A --tau 0.01 --cycles 5 "
                "--out " + (dir / "x.csv").string(),
                dir, &text) == 2);
  CHECK(text.find("nosuch") != std::string::npos);
  CHECK(run_cli("simulate --system pyridine --mode projected --tau 0.01 --cycles 5 --out " +
                    (dir / "x.csv").string(),
                dir, nullptr) == 2);  // no initial state
  CHECK(run_cli("simulate --system pyridine --mode projected --excite 1 --deplete 3 --tau 0.01 "
                "--cycles 5 --out " + (dir / "x.csv").string(),
                dir, nullptr) == 2);  // conflicting initials
  CHECK(run_cli("fit --manifest " + (dir / "missing.txt").string(), dir, nullptr) == 2);
}

TEST_CASE("cli: sweep orders the figure regimes and refuses a single tau") {
  const auto dir = testing::scratch_dir("cli_sweep");
  std::string text;
  const int code = run_cli("sweep-tau --system pyridine --excite \"2,2'\" "
                           "--tau-list 0.0317,0.0127,0.00063 --total-time 1.268 --out " +
                               (dir / "sweep.csv").string(),
                           dir, &text);
  REQUIRE(code == 0);
  // parse the three transferred fractions from the summary
  std::vector<double> fractions;
  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::istringstream cells(line);
    std::string cell;
    std::getline(cells, cell, ',');
    std::getline(cells, cell, ',');
    std::getline(cells, cell, ',');
    fractions.push_back(std::stod(cell));
  }
  REQUIRE(fractions.size() == 3);
  CHECK(fractions[0] > fractions[1]);  // optimal > intermediate
  CHECK(fractions[1] > fractions[2]);  // intermediate > Zeno
  CHECK(slurp((dir / "sweep.csv").string()).find("# zenospin-sweep v1") == 0);

  CHECK(run_cli("sweep-tau --system pyridine --excite \"2,2'\" --tau-list 0.0317 "
                "--total-time 1.268",
                dir, nullptr) == 2);
}

TEST_CASE("cli: simulate -> fit round trip recovers the reference couplings") {
  const auto dir = testing::scratch_dir("cli_fit");
  const std::string base = "simulate --system pyridine --mode projected --tau 0.001 --cycles 200 ";
  REQUIRE(run_cli(base + "--excite \"1,1'\" --out " + (dir / "e1.csv").string(), dir, nullptr) ==
          0);
  REQUIRE(run_cli(base + "--excite \"2,2'\" --out " + (dir / "e2.csv").string(), dir, nullptr) ==
          0);
  REQUIRE(run_cli(base + "--excite 3 --out " + (dir / "e3.csv").string(), dir, nullptr) == 0);

  spit((dir / "manifest.txt").string(),
       "zenospin-manifest v1\n"
       "system pyridine\n"
       "experiment file=e1.csv initial=excite:1,1' tau_s=0.001 cycles=200\n"
       "experiment file=e2.csv initial=excite:2,2' tau_s=0.001 cycles=200\n"
       "experiment file=e3.csv initial=excite:3 tau_s=0.001 cycles=200\n");

  std::string text;
  const int code = run_cli("fit --manifest " + (dir / "manifest.txt").string() + " --estimates " +
                               (dir / "est.csv").string() + " --report " +
                               (dir / "report.txt").string(),
                           dir, &text);
  REQUIRE(code == 0);
  CHECK(text.find("reference comparison") != std::string::npos);

  // estimates CSV carries the three effective couplings
  const std::string est = slurp((dir / "est.csv").string());
  CHECK(est.find("# zenospin-estimates v1") == 0);
  std::istringstream lines(est);
  std::string line;
  double j12 = 0.0, j13 = 0.0, j23 = 0.0;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("group_a", 0) == 0) continue;
    std::istringstream cells(line);
    std::string a, b, j;
    std::getline(cells, a, ',');
    std::getline(cells, b, ',');
    std::getline(cells, j, ',');
    if (a == "1+1'" && b == "2+2'") j12 = std::stod(j);
    if (a == "1+1'" && b == "3") j13 = std::stod(j);
    if (a == "2+2'" && b == "3") j23 = std::stod(j);
  }
  CHECK(j12 == doctest::Approx(3.50).epsilon(0.03));
  CHECK(j13 == doctest::Approx(1.86).epsilon(0.03));
  CHECK(j23 == doctest::Approx(7.64).epsilon(0.03));
}

TEST_CASE("cli: manifest validation failures exit 2 with the offending field") {
  const auto dir = testing::scratch_dir("cli_fit_err");
  // empty manifest
  spit((dir / "empty.txt").string(), "zenospin-manifest v1\nsystem pyridine\n");
  std::string text;
  CHECK(run_cli("fit --manifest " + (dir / "empty.txt").string(), dir, &text) == 2);
  CHECK(text.find("no experiments") != std::string::npos);

  // labels from a different system
  REQUIRE(run_cli("simulate --system pair10 --mode projected --excite A --tau 0.001 --cycles 50 "
                  "--out " + (dir / "pair.csv").string(),
                  dir, nullptr) == 0);
  spit((dir / "mismatch.txt").string(),
       "zenospin-manifest v1\nsystem pyridine\n"
       "experiment file=pair.csv initial=excite:A\n");
  CHECK(run_cli("fit --manifest " + (dir / "mismatch.txt").string(), dir, &text) == 2);
  CHECK(text.find("do not match") != std::string::npos);

  // manifest/file disagreement on tau
  REQUIRE(run_cli("simulate --system pyridine --mode projected --excite 3 --tau 0.001 "
                  "--cycles 50 --out " + (dir / "p3.csv").string(),
                  dir, nullptr) == 0);
  spit((dir / "tau.txt").string(),
       "zenospin-manifest v1\nsystem pyridine\n"
       "experiment file=p3.csv initial=excite:3 tau_s=0.002\n");
  CHECK(run_cli("fit --manifest " + (dir / "tau.txt").string(), dir, &text) == 2);
  CHECK(text.find("tau") != std::string::npos);
}

TEST_CASE("cli: predict prints the equipartition values") {
  const auto dir = testing::scratch_dir("cli_predict");
  std::string text;
  REQUIRE(run_cli("predict --system pyridine --excite \"1,1'\"", dir, &text) == 0);
  CHECK(text.find("0.4") != std::string::npos);
  REQUIRE(run_cli("predict --system pyridine --deplete \"1,1'\"", dir, &text) == 0);
  CHECK(text.find("0.6") != std::string::npos);
  REQUIRE(run_cli("predict --system pyridine --custom \"0.5,0.5,0.5,0.5,0.5\"", dir, &text) == 0);
  CHECK(text.find("0.5") != std::string::npos);
}

TEST_CASE("cli: preset-list names the bundled systems") {
  const auto dir = testing::scratch_dir("cli_presets");
  std::string text;
  REQUIRE(run_cli("preset-list", dir, &text) == 0);
  CHECK(text.find("pyridine") != std::string::npos);
  CHECK(text.find("pair10") != std::string::npos);
}

TEST_SUITE_END();
