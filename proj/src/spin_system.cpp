#include "zenospin/spin_system.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace zenospin {

int SpinSystem::site_index(const std::string& label) const {
  for (int i = 0; i < n; ++i) {
    if (labels[i] == label) return i;
  }
  throw ValidationError("unknown site label '" + label + "'");
}

int SpinSystem::group_of(int site) const {
  for (int g = 0; g < static_cast<int>(groups.size()); ++g) {
    for (int s : groups[g]) {
      if (s == site) return g;
    }
  }
  throw ValidationError("site " + std::to_string(site) + " not in any group");
}

bool SpinSystem::trivial_groups() const {
  return std::all_of(groups.begin(), groups.end(),
                     [](const std::vector<int>& g) { return g.size() == 1; });
}

void validate_spin_system(const SpinSystem& system) {
  const int n = system.n;
  if (n < 1) throw ValidationError("spin system needs at least one site");
  if (n > kMaxSpins) {
    throw ValidationError("spin system has " + std::to_string(n) + " sites; dense product-basis simulation is refused above " +
                          std::to_string(kMaxSpins));
  }
  if (static_cast<int>(system.labels.size()) != n) {
    throw ValidationError("label count does not match site count");
  }
  std::set<std::string> seen;
  for (const auto& l : system.labels) {
    if (l.empty() || l.find_first_of(" \t,") != std::string::npos) {
      throw ValidationError("site label '" + l + "' is empty or contains whitespace/comma");
    }
    if (!seen.insert(l).second) throw ValidationError("duplicate site label '" + l + "'");
  }
  if (system.couplings.rows() != n || system.couplings.cols() != n) {
    throw ValidationError("coupling matrix dimension mismatch");
  }
  for (int i = 0; i < n; ++i) {
    if (system.couplings(i, i) != 0.0) {
      throw ValidationError("self-coupling on site '" + system.labels[i] + "'");
    }
    for (int j = 0; j < n; ++j) {
      const double jij = system.couplings(i, j);
      if (!std::isfinite(jij)) throw ValidationError("non-finite coupling");
      if (jij != system.couplings(j, i)) {
        throw ValidationError("coupling matrix not symmetric at (" + system.labels[i] + "," + system.labels[j] + ")");
      }
    }
  }
  // groups must partition the sites
  std::vector<int> owner(n, -1);
  if (system.groups.size() != system.group_names.size()) {
    throw ValidationError("group name count does not match group count");
  }
  for (size_t g = 0; g < system.groups.size(); ++g) {
    if (system.groups[g].empty()) throw ValidationError("empty equivalence group");
    for (int s : system.groups[g]) {
      if (s < 0 || s >= n) throw ValidationError("group member index out of range");
      if (owner[s] != -1) {
        throw ValidationError("site '" + system.labels[s] + "' appears in more than one equivalence group");
      }
      owner[s] = static_cast<int>(g);
    }
  }
  for (int s = 0; s < n; ++s) {
    if (owner[s] == -1) {
      throw ValidationError("site '" + system.labels[s] + "' missing from the equivalence groups");
    }
  }
  std::set<std::string> gseen;
  for (const auto& gn : system.group_names) {
    if (gn.empty() || gn.find_first_of(" \t,") != std::string::npos) {
      throw ValidationError("group name '" + gn + "' is empty or contains whitespace/comma");
    }
    if (!gseen.insert(gn).second) throw ValidationError("duplicate group name '" + gn + "'");
  }
}

SpinSystem build_spin_system(const std::vector<std::string>& labels,
                             const std::vector<CouplingEntry>& couplings,
                             const std::vector<std::vector<std::string>>& groups,
                             const std::vector<std::string>& group_names) {
  SpinSystem sys;
  sys.n = static_cast<int>(labels.size());
  sys.labels = labels;
  sys.couplings = Eigen::MatrixXd::Zero(sys.n, sys.n);
  if (sys.n < 1) throw ValidationError("spin system needs at least one site");

  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> set_flag(sys.n, sys.n);
  set_flag.setConstant(false);
  for (const auto& entry : couplings) {
    const int a = sys.site_index(entry.site_a);
    const int b = sys.site_index(entry.site_b);
    if (a == b) throw ValidationError("self-coupling entry for site '" + entry.site_a + "'");
    if (set_flag(a, b) && sys.couplings(a, b) != entry.j_hz) {
      throw ValidationError("conflicting couplings for pair (" + entry.site_a + "," + entry.site_b + ")");
    }
    set_flag(a, b) = set_flag(b, a) = true;
    sys.couplings(a, b) = sys.couplings(b, a) = entry.j_hz;
  }

  if (groups.empty()) {
    // default: every site its own group, named after the site
    for (int i = 0; i < sys.n; ++i) {
      sys.groups.push_back({i});
      sys.group_names.push_back(sys.labels[i]);
    }
  } else {
    for (const auto& g : groups) {
      std::vector<int> idx;
      idx.reserve(g.size());
      for (const auto& l : g) idx.push_back(sys.site_index(l));
      sys.groups.push_back(std::move(idx));
    }
    if (group_names.empty()) {
      for (const auto& g : sys.groups) {
        std::string name;
        for (size_t k = 0; k < g.size(); ++k) {
          if (k) name += '+';
          name += sys.labels[g[k]];
        }
        sys.group_names.push_back(name);
      }
    } else {
      sys.group_names = group_names;
    }
  }

  validate_spin_system(sys);
  return sys;
}

SpinSystem pyridine_preset(double j_11p, double j_22p) {
  std::vector<CouplingEntry> entries = {
      {"1", "2", 4.86}, {"1'", "2'", 4.86}, {"1", "2'", 0.98}, {"1'", "2", 0.98},
      {"1", "3", 1.85}, {"1'", "3", 1.85},  {"2", "3", 7.66},  {"2'", "3", 7.66},
  };
  if (j_11p != 0.0) entries.push_back({"1", "1'", j_11p});
  if (j_22p != 0.0) entries.push_back({"2", "2'", j_22p});
  return build_spin_system({"1", "1'", "2", "2'", "3"}, entries,
                           {{"1", "1'"}, {"2", "2'"}, {"3"}});
}

std::vector<std::string> preset_names() { return {"pyridine", "pair10"}; }

bool is_preset(const std::string& name) {
  const auto names = preset_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

SpinSystem make_preset(const std::string& name) {
  if (name == "pyridine") return pyridine_preset();
  if (name == "pair10") {
    return build_spin_system({"A", "B"}, {{"A", "B", 10.0}});
  }
  throw ValidationError("unknown preset '" + name + "'");
}

}  // namespace zenospin
