#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace zenospin {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Input/contract violations (bad labels, malformed files, invalid configs).
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Failures of the numerics themselves (eigensolver breakdown, corrupted H).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Conversion between tabulated couplings (Hz) and the angular coupling in H.
// The default factor 2*pi makes the two-spin transfer frequency 2*pi*J, i.e.
// complete transfer at tau = 1/(2J). Recorded in all output metadata.
struct Convention {
  double angular_factor = kTwoPi;
};

struct CouplingEntry {
  std::string site_a;
  std::string site_b;
  double j_hz = 0.0;
};

// An exchange-coupled network of spin-1/2 sites. Immutable after
// construction; safe to share across threads.
struct SpinSystem {
  int n = 0;
  Eigen::MatrixXd couplings;  // Hz, symmetric, zero diagonal
  std::vector<std::string> labels;
  std::vector<std::vector<int>> groups;  // partition of sites (equivalence)
  std::vector<std::string> group_names;

  int site_index(const std::string& label) const;
  int group_of(int site) const;
  bool trivial_groups() const;  // every group a singleton
};

// Maximum site counts. Full 2^n dense matrices are only sane up to 14 spins;
// the per-sector path stretches to 16. Beyond that we refuse instead of
// thrashing.
inline constexpr int kMaxSpins = 16;
inline constexpr int kMaxSpinsDense = 14;

SpinSystem build_spin_system(const std::vector<std::string>& labels,
                             const std::vector<CouplingEntry>& couplings,
                             const std::vector<std::vector<std::string>>& groups = {},
                             const std::vector<std::string>& group_names = {});

// Validates an already-populated system (symmetry, zero diagonal, group
// partition). Throws ValidationError on violation.
void validate_spin_system(const SpinSystem& system);

// Named presets available to the CLI and tests.
std::vector<std::string> preset_names();
bool is_preset(const std::string& name);
SpinSystem make_preset(const std::string& name);

// Pyridine ring protons {1,1',2,2',3} with the literature couplings
// J(1,2)=J(1',2')=4.86, J(1,2')=J(1',2)=0.98, J(1,3)=J(1',3)=1.85,
// J(2,3)=J(2',3)=7.66 Hz; couplings inside an equivalence pair default to 0.
SpinSystem pyridine_preset(double j_11p = 0.0, double j_22p = 0.0);

}  // namespace zenospin
