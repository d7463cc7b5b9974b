#include "zenospin/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace zenospin {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> split_char(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("cannot parse number '" + text + "' for " + what);
  }
}

int parse_int(const std::string& text, const std::string& what) {
  try {
    size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("cannot parse integer '" + text + "' for " + what);
  }
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file '" + path + "'");
  out << text;
  if (!out) throw ValidationError("write failed for '" + path + "'");
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", value);
  if (std::strtod(buf, nullptr) != value) {
    std::snprintf(buf, sizeof(buf), "%.17g", value);
  }
  return buf;
}

// ---------------------------------------------------------------------------
// spin-system files
// ---------------------------------------------------------------------------

void write_spin_system(const SpinSystem& system, const Convention& convention,
                       const std::string& path) {
  validate_spin_system(system);
  std::ostringstream out;
  out << "zenospin-spinsys v1\n";
  out << "angular_factor " << format_double(convention.angular_factor) << "\n";
  for (const auto& l : system.labels) out << "site " << l << "\n";
  for (int i = 0; i < system.n; ++i) {
    for (int j = i + 1; j < system.n; ++j) {
      if (system.couplings(i, j) != 0.0) {
        out << "coupling " << system.labels[i] << " " << system.labels[j] << " "
            << format_double(system.couplings(i, j)) << "\n";
      }
    }
  }
  for (size_t g = 0; g < system.groups.size(); ++g) {
    out << "group " << system.group_names[g];
    for (int s : system.groups[g]) out << " " << system.labels[s];
    out << "\n";
  }
  write_text(path, out.str());
}

std::pair<SpinSystem, Convention> read_spin_system(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != "zenospin-spinsys v1") {
    throw ValidationError("'" + path + "' is not a zenospin-spinsys v1 file");
  }
  Convention convention;
  std::vector<std::string> labels;
  std::vector<CouplingEntry> couplings;
  std::vector<std::vector<std::string>> groups;
  std::vector<std::string> group_names;
  for (size_t k = 1; k < lines.size(); ++k) {
    if (lines[k].empty() || lines[k][0] == '#') continue;
    const auto tok = split_ws(lines[k]);
    if (tok.empty()) continue;
    if (tok[0] == "angular_factor" && tok.size() == 2) {
      convention.angular_factor = parse_double(tok[1], "angular_factor");
    } else if (tok[0] == "site" && tok.size() == 2) {
      labels.push_back(tok[1]);
    } else if (tok[0] == "coupling" && tok.size() == 4) {
      couplings.push_back({tok[1], tok[2], parse_double(tok[3], "coupling")});
    } else if (tok[0] == "group" && tok.size() >= 3) {
      group_names.push_back(tok[1]);
      groups.emplace_back(tok.begin() + 2, tok.end());
    } else {
      throw ValidationError("unknown or malformed line " + std::to_string(k + 1) + " in '" +
                            path + "': " + lines[k]);
    }
  }
  if (convention.angular_factor <= 0.0) throw ValidationError("angular_factor must be positive");
  SpinSystem sys = build_spin_system(labels, couplings, groups, group_names);
  // sites not covered by an explicit group become singleton groups
  if (!groups.empty()) {
    std::vector<bool> covered(sys.n, false);
    for (const auto& g : sys.groups) {
      for (int s : g) covered[s] = true;
    }
    (void)covered;  // build_spin_system already demands a full partition
  }
  return {sys, convention};
}

std::pair<SpinSystem, Convention> resolve_system(const std::string& reference) {
  if (is_preset(reference)) return {make_preset(reference), Convention{}};
  if (std::filesystem::exists(reference)) return read_spin_system(reference);
  throw ValidationError("system '" + reference + "' is neither a preset (" +
                        [] {
                          std::string s;
                          for (const auto& p : preset_names()) s += s.empty() ? p : ", " + p;
                          return s;
                        }() +
                        ") nor an existing file");
}

// ---------------------------------------------------------------------------
// initial-state specs
// ---------------------------------------------------------------------------

InitialSpec InitialSpecText::resolve(const SpinSystem& system) const {
  if (kind == "excite" || kind == "deplete") {
    std::vector<int> idx;
    idx.reserve(sites.size());
    for (const auto& l : sites) idx.push_back(system.site_index(l));
    return kind == "excite" ? InitialSpec::excite(idx) : InitialSpec::deplete(idx);
  }
  if (kind == "custom") {
    Eigen::VectorXd p(static_cast<int>(custom.size()));
    for (size_t i = 0; i < custom.size(); ++i) p(static_cast<int>(i)) = custom[i];
    return InitialSpec::from_vector(p);
  }
  throw ValidationError("initial spec '" + kind + "' has no population representation");
}

std::string InitialSpecText::to_string() const {
  if (kind == "excite" || kind == "deplete") {
    std::string s = kind + ":";
    for (size_t i = 0; i < sites.size(); ++i) s += (i ? "," : "") + sites[i];
    return s;
  }
  if (kind == "custom") {
    std::string s = "custom:";
    for (size_t i = 0; i < custom.size(); ++i) {
      s += (i ? "," : "") + format_double(custom[i]);
    }
    return s;
  }
  if (kind == "op") return "op:" + op_site + "," + op_axis;
  throw ValidationError("empty initial spec");
}

InitialSpecText parse_initial_spec(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw ValidationError("initial spec '" + text + "' must look like kind:args");
  }
  InitialSpecText spec;
  spec.kind = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);
  if (rest.empty()) throw ValidationError("initial spec '" + text + "' has no arguments");
  const auto args = split_char(rest, ',');
  if (spec.kind == "excite" || spec.kind == "deplete") {
    spec.sites = args;
  } else if (spec.kind == "custom") {
    for (const auto& a : args) spec.custom.push_back(parse_double(a, "custom polarization"));
  } else if (spec.kind == "op") {
    if (args.size() != 2 || args[1].size() != 1) {
      throw ValidationError("op spec must be op:<site>,<axis>");
    }
    spec.op_site = args[0];
    spec.op_axis = args[1][0];
  } else {
    throw ValidationError("unknown initial spec kind '" + spec.kind + "'");
  }
  return spec;
}

// ---------------------------------------------------------------------------
// trajectory CSV + sidecar
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kTrajectoryMagic = "# zenospin-trajectory v1";

std::string metadata_block(const TrajectoryFile& f) {
  const auto& t = f.trajectory;
  std::ostringstream out;
  out << "angular_factor " << format_double(t.convention.angular_factor) << "\n";
  out << "mode " << f.mode << "\n";
  out << "system " << f.system_ref << "\n";
  out << "initial " << f.initial.to_string() << "\n";
  if (f.mode == "projected") {
    out << "tau_s " << format_double(t.tau) << "\n";
    out << "cycles " << t.cycles << "\n";
    out << "epsilon " << format_double(t.projection.epsilon) << "\n";
    out << "damping_per_s " << format_double(t.projection.damping_per_s) << "\n";
  } else {
    out << "points " << t.times.size() << "\n";
  }
  return out.str();
}

}  // namespace

void write_trajectory_csv(const TrajectoryFile& file, const std::string& path) {
  const auto& t = file.trajectory;
  std::ostringstream out;
  out << kTrajectoryMagic << "\n";
  std::istringstream meta(metadata_block(file));
  std::string line;
  while (std::getline(meta, line)) out << "# " << line << "\n";

  out << "time_s";
  for (const auto& l : t.labels) out << "," << l;
  for (const auto& g : t.group_names) out << ",g:" << g;
  out << "\n";
  for (size_t m = 0; m < t.times.size(); ++m) {
    out << format_double(t.times[m]);
    for (int i = 0; i < t.values.cols(); ++i) {
      out << "," << format_double(t.values(static_cast<int>(m), i));
    }
    for (int g = 0; g < t.group_values.cols(); ++g) {
      out << "," << format_double(t.group_values(static_cast<int>(m), g));
    }
    out << "\n";
  }
  write_text(path, out.str());

  std::ostringstream side;
  side << "zenospin-meta v1\n" << "kind trajectory\n" << metadata_block(file);
  write_text(path + ".meta", side.str());
}

TrajectoryFile read_trajectory_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != kTrajectoryMagic) {
    throw ValidationError("'" + path + "' is not a zenospin-trajectory v1 CSV");
  }
  TrajectoryFile file;
  auto& t = file.trajectory;
  size_t k = 1;
  bool have_tau = false;
  for (; k < lines.size() && lines[k].rfind("# ", 0) == 0; ++k) {
    const auto tok = split_ws(lines[k].substr(2));
    if (tok.size() < 2) throw ValidationError("malformed metadata line in '" + path + "'");
    const std::string key = tok[0];
    if (key == "angular_factor") {
      t.convention.angular_factor = parse_double(tok[1], key);
    } else if (key == "mode") {
      file.mode = tok[1];
    } else if (key == "system") {
      file.system_ref = tok[1];
    } else if (key == "initial") {
      file.initial = parse_initial_spec(tok[1]);
    } else if (key == "tau_s") {
      t.tau = parse_double(tok[1], key);
      have_tau = true;
    } else if (key == "cycles") {
      t.cycles = parse_int(tok[1], key);
    } else if (key == "epsilon") {
      t.projection.epsilon = parse_double(tok[1], key);
    } else if (key == "damping_per_s") {
      t.projection.damping_per_s = parse_double(tok[1], key);
    } else if (key == "points") {
      // informational for coherent grids
    } else {
      throw ValidationError("unknown metadata key '" + key + "' in '" + path + "'");
    }
  }
  if (k >= lines.size()) throw ValidationError("'" + path + "' has no header row");
  const auto header = split_char(lines[k], ',');
  if (header.empty() || header[0] != "time_s") {
    throw ValidationError("'" + path + "' header must start with time_s");
  }
  for (size_t c = 1; c < header.size(); ++c) {
    if (header[c].rfind("g:", 0) == 0) {
      t.group_names.push_back(header[c].substr(2));
    } else {
      if (!t.group_names.empty()) {
        throw ValidationError("site column after group columns in '" + path + "'");
      }
      t.labels.push_back(header[c]);
    }
  }
  ++k;
  std::vector<std::vector<double>> rows;
  for (; k < lines.size(); ++k) {
    if (lines[k].empty()) continue;
    const auto cells = split_char(lines[k], ',');
    if (cells.size() != header.size()) {
      throw ValidationError("row with wrong column count in '" + path + "'");
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c, "trajectory value"));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError("'" + path + "' has no data rows");

  const int nsites = static_cast<int>(t.labels.size());
  const int ngroups = static_cast<int>(t.group_names.size());
  t.times.resize(rows.size());
  t.values.resize(static_cast<int>(rows.size()), nsites);
  t.group_values.resize(static_cast<int>(rows.size()), ngroups);
  for (size_t m = 0; m < rows.size(); ++m) {
    t.times[m] = rows[m][0];
    for (int i = 0; i < nsites; ++i) t.values(static_cast<int>(m), i) = rows[m][1 + i];
    for (int g = 0; g < ngroups; ++g) {
      t.group_values(static_cast<int>(m), g) = rows[m][1 + nsites + g];
    }
  }
  if (file.mode == "projected") {
    if (!have_tau && rows.size() > 1) t.tau = t.times[1] - t.times[0];
    if (t.cycles == 0) t.cycles = static_cast<int>(rows.size()) - 1;
    if (t.cycles + 1 != static_cast<int>(rows.size())) {
      throw ValidationError("cycle count in metadata disagrees with row count in '" + path + "'");
    }
  }
  return file;
}

// ---------------------------------------------------------------------------
// manifest + dataset loading
// ---------------------------------------------------------------------------

Manifest read_manifest(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != "zenospin-manifest v1") {
    throw ValidationError("'" + path + "' is not a zenospin-manifest v1 file");
  }
  Manifest manifest;
  const auto dir = std::filesystem::path(path).parent_path();
  for (size_t k = 1; k < lines.size(); ++k) {
    if (lines[k].empty() || lines[k][0] == '#') continue;
    const auto tok = split_ws(lines[k]);
    if (tok[0] == "system" && tok.size() == 2) {
      manifest.system_ref = tok[1];
    } else if (tok[0] == "experiment" && tok.size() >= 2) {
      ManifestEntry entry;
      for (size_t a = 1; a < tok.size(); ++a) {
        const auto eq = tok[a].find('=');
        if (eq == std::string::npos) {
          throw ValidationError("experiment attribute '" + tok[a] + "' must be key=value");
        }
        const std::string key = tok[a].substr(0, eq);
        const std::string value = tok[a].substr(eq + 1);
        if (key == "file") {
          const std::filesystem::path p(value);
          entry.file = p.is_absolute() ? p.string() : (dir / p).string();
        } else if (key == "initial") {
          entry.initial = parse_initial_spec(value);
        } else if (key == "tau_s") {
          entry.tau_s = parse_double(value, "tau_s");
        } else if (key == "cycles") {
          entry.cycles = parse_int(value, "cycles");
        } else if (key == "noise") {
          entry.noise_level = parse_double(value, "noise");
        } else {
          throw ValidationError("unknown experiment attribute '" + key + "' in '" + path + "'");
        }
      }
      if (entry.file.empty()) throw ValidationError("experiment line without file= in '" + path + "'");
      if (entry.initial.kind.empty()) {
        throw ValidationError("experiment line without initial= in '" + path + "'");
      }
      manifest.entries.push_back(std::move(entry));
    } else {
      throw ValidationError("unknown or malformed line " + std::to_string(k + 1) + " in '" +
                            path + "': " + lines[k]);
    }
  }
  if (manifest.system_ref.empty()) throw ValidationError("manifest '" + path + "' names no system");
  if (manifest.entries.empty()) throw ValidationError("manifest '" + path + "' lists no experiments");
  return manifest;
}

BuildUpDataset load_dataset(const Manifest& manifest, const SpinSystem& system,
                            const Convention& convention) {
  BuildUpDataset dataset;
  dataset.labels = system.labels;
  dataset.groups = system.groups;
  dataset.group_names = system.group_names;
  dataset.convention = convention;

  for (const auto& entry : manifest.entries) {
    const TrajectoryFile tf = read_trajectory_csv(entry.file);
    if (tf.mode != "projected") {
      throw ValidationError("'" + entry.file + "' is a " + tf.mode +
                            " trajectory; fitting needs projected data");
    }
    if (tf.trajectory.labels != system.labels) {
      std::string got, want;
      for (const auto& l : tf.trajectory.labels) got += l + " ";
      for (const auto& l : system.labels) want += l + " ";
      throw ValidationError("site labels in '" + entry.file + "' [ " + got +
                            "] do not match the system [ " + want + "]");
    }
    if (tf.trajectory.group_names != system.group_names) {
      throw ValidationError("group columns in '" + entry.file + "' do not match the system groups");
    }
    if (std::abs(tf.trajectory.convention.angular_factor - convention.angular_factor) >
        1e-12 * convention.angular_factor) {
      throw ValidationError("convention factor in '" + entry.file + "' (" +
                            format_double(tf.trajectory.convention.angular_factor) +
                            ") does not match the system (" +
                            format_double(convention.angular_factor) + ")");
    }
    if (entry.tau_s && std::abs(*entry.tau_s - tf.trajectory.tau) > 1e-12 * (*entry.tau_s)) {
      throw ValidationError("manifest tau_s disagrees with '" + entry.file + "'");
    }
    if (entry.cycles && *entry.cycles != tf.trajectory.cycles) {
      throw ValidationError("manifest cycles disagrees with '" + entry.file + "'");
    }
    if (entry.initial.to_string() != tf.initial.to_string()) {
      throw ValidationError("manifest initial spec '" + entry.initial.to_string() +
                            "' disagrees with '" + entry.file + "' (" + tf.initial.to_string() + ")");
    }

    Experiment e;
    e.initial = entry.initial.resolve(system);
    e.tau = tf.trajectory.tau;
    e.cycles = tf.trajectory.cycles;
    e.site_values = tf.trajectory.values;
    e.group_values = tf.trajectory.group_values;
    e.noise_level = entry.noise_level;
    e.source = entry.file;
    dataset.experiments.push_back(std::move(e));
  }
  dataset.validate();
  return dataset;
}

// ---------------------------------------------------------------------------
// estimates + report
// ---------------------------------------------------------------------------

void write_estimates_csv(const CouplingEstimate& estimate, const BuildUpDataset& dataset,
                         const std::string& path) {
  std::ostringstream out;
  out << "# zenospin-estimates v1\n";
  out << "# angular_factor " << format_double(dataset.convention.angular_factor) << "\n";
  out << "# method " << method_name(estimate.method) << "\n";
  out << "group_a,group_b,j_hz,se_hz\n";
  for (const auto& p : estimate.pairs) {
    out << dataset.group_names[p.group_a] << "," << dataset.group_names[p.group_b] << ","
        << format_double(p.j_hz) << "," << format_double(p.se_hz) << "\n";
  }
  write_text(path, out.str());
}

std::string estimate_report(const CouplingEstimate& estimate, const BuildUpDataset& dataset,
                            const SpinSystem& system,
                            const std::optional<BootstrapReport>& bootstrap) {
  std::ostringstream out;
  out << "zenospin coupling estimates (" << method_name(estimate.method) << ")\n";
  out << "sites: " << dataset.n_sites() << ", groups: " << dataset.n_groups()
      << ", experiments: " << dataset.experiments.size() << "\n";
  for (size_t ei = 0; ei < dataset.experiments.size(); ++ei) {
    const auto& e = dataset.experiments[ei];
    out << "  experiment " << ei << ": tau_s=" << format_double(e.tau) << " cycles=" << e.cycles;
    if (ei < estimate.diagnostics.windows.size()) {
      out << " window=" << estimate.diagnostics.windows[ei];
    }
    if (!e.source.empty()) out << " (" << e.source << ")";
    out << "\n";
  }
  if (estimate.damping_fitted) {
    out << "fitted damping: " << format_double(estimate.damping_per_s) << " /s\n";
  }
  out << "effective couplings (RMS over member pairs):\n";
  char buf[160];
  for (const auto& p : estimate.pairs) {
    std::snprintf(buf, sizeof(buf), "  %-10s -- %-10s |J| = %9.4f +/- %.4f Hz\n",
                  dataset.group_names[p.group_a].c_str(), dataset.group_names[p.group_b].c_str(),
                  p.j_hz, p.se_hz);
    out << buf;
  }
  if (bootstrap) {
    out << "bootstrap (" << bootstrap->replicates << " replicates, seed " << bootstrap->seed
        << "):\n";
    for (const auto& p : bootstrap->pairs) {
      std::snprintf(buf, sizeof(buf), "  %-10s -- %-10s |J| = %9.4f +/- %.4f Hz\n",
                    dataset.group_names[p.group_a].c_str(), dataset.group_names[p.group_b].c_str(),
                    p.j_hz, p.se_hz);
      out << buf;
    }
  }

  // comparison against the reference couplings when the system carries them
  if (system.couplings.cwiseAbs().maxCoeff() > 0.0) {
    out << "reference comparison (group-pair RMS of the system couplings):\n";
    for (const auto& p : estimate.pairs) {
      double sum = 0.0;
      int count = 0;
      for (int i : system.groups[p.group_a]) {
        for (int j : system.groups[p.group_b]) {
          sum += system.couplings(i, j) * system.couplings(i, j);
          ++count;
        }
      }
      const double ref = std::sqrt(sum / count);
      std::snprintf(buf, sizeof(buf), "  %-10s -- %-10s reference %9.4f Hz, extracted %9.4f Hz (%+.2f%%)\n",
                    dataset.group_names[p.group_a].c_str(),
                    dataset.group_names[p.group_b].c_str(), ref, p.j_hz,
                    ref != 0.0 ? 100.0 * (p.j_hz - ref) / ref : 0.0);
      out << buf;
    }
  }
  if (!estimate.diagnostics.notes.empty()) {
    out << "notes:\n";
    for (const auto& n : estimate.diagnostics.notes) out << "  " << n << "\n";
  }
  std::snprintf(buf, sizeof(buf), "residual norm %.3e over %d observations\n",
                estimate.diagnostics.residual_norm, estimate.diagnostics.observation_count);
  out << buf;
  return out.str();
}

// ---------------------------------------------------------------------------
// scenario configs
// ---------------------------------------------------------------------------

void ScenarioConfig::validate() const {
  if (system_ref.empty()) throw ValidationError("scenario: system is required");
  if (mode != "projected" && mode != "coherent") {
    throw ValidationError("scenario: mode must be projected or coherent, got '" + mode + "'");
  }
  if (!initial) throw ValidationError("scenario: initial state spec is required");
  if (out.empty()) throw ValidationError("scenario: output path is required");
  if (mode == "projected") {
    if (initial->kind == "op") {
      throw ValidationError("scenario: initial kind 'op' is only valid in coherent mode");
    }
    if (!tau_s) throw ValidationError("scenario: tau_s is required in projected mode");
    if (*tau_s < 0.0) throw ValidationError("scenario: tau_s must be >= 0");
    if (!cycles) throw ValidationError("scenario: cycles is required in projected mode");
    if (*cycles < 0) throw ValidationError("scenario: cycles must be >= 0");
    if (epsilon < 0.0 || epsilon > 1.0) throw ValidationError("scenario: epsilon must be in [0, 1]");
    if (damping_per_s < 0.0) throw ValidationError("scenario: damping_per_s must be >= 0");
  } else {
    if (initial->kind != "op") {
      throw ValidationError("scenario: coherent mode needs initial op:<site>,<axis>");
    }
    if (!time_start || !time_step || !time_stop) {
      throw ValidationError("scenario: coherent mode needs times <start> <step> <stop>");
    }
    if (*time_step <= 0.0 || *time_stop < *time_start) {
      throw ValidationError("scenario: malformed coherent time grid");
    }
  }
}

ScenarioConfig read_scenario(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != "zenospin-scenario v1") {
    throw ValidationError("'" + path + "' is not a zenospin-scenario v1 file");
  }
  ScenarioConfig cfg;
  for (size_t k = 1; k < lines.size(); ++k) {
    if (lines[k].empty() || lines[k][0] == '#') continue;
    const auto tok = split_ws(lines[k]);
    const std::string& key = tok[0];
    if (key == "system" && tok.size() == 2) {
      cfg.system_ref = tok[1];
    } else if (key == "mode" && tok.size() == 2) {
      cfg.mode = tok[1];
    } else if (key == "initial" && tok.size() == 2) {
      cfg.initial = parse_initial_spec(tok[1]);
    } else if (key == "tau_s" && tok.size() == 2) {
      cfg.tau_s = parse_double(tok[1], "tau_s");
    } else if (key == "cycles" && tok.size() == 2) {
      cfg.cycles = parse_int(tok[1], "cycles");
    } else if (key == "epsilon" && tok.size() == 2) {
      cfg.epsilon = parse_double(tok[1], "epsilon");
    } else if (key == "damping_per_s" && tok.size() == 2) {
      cfg.damping_per_s = parse_double(tok[1], "damping_per_s");
    } else if (key == "times" && tok.size() == 4) {
      cfg.time_start = parse_double(tok[1], "times start");
      cfg.time_step = parse_double(tok[2], "times step");
      cfg.time_stop = parse_double(tok[3], "times stop");
    } else if (key == "out" && tok.size() == 2) {
      cfg.out = tok[1];
    } else if (key == "seed" && tok.size() == 2) {
      cfg.seed = static_cast<std::uint64_t>(std::stoull(tok[1]));
    } else {
      throw ValidationError("unknown or malformed scenario key at line " + std::to_string(k + 1) +
                            " in '" + path + "': " + lines[k]);
    }
  }
  return cfg;
}

std::string resolve_output_path(const std::string& path) {
  const char* dir = std::getenv("ZENOSPIN_OUT_DIR");
  if (dir && *dir && !std::filesystem::path(path).is_absolute()) {
    return (std::filesystem::path(dir) / path).string();
  }
  return path;
}

}  // namespace zenospin
