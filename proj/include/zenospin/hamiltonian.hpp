#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "zenospin/spin_system.hpp"

namespace zenospin {

// Product-basis convention: basis state b in [0, 2^n); bit i of b is the
// state of spin i, 0 meaning m = +1/2. All file outputs reference this
// ordering.

inline int basis_dim(int n) { return 1 << n; }

// +1 if spin `site` is up in basis state b, -1 otherwise.
inline int spin_sign(int b, int site) { return ((b >> site) & 1) ? -1 : +1; }

// Total magnetization of basis state b in units of 1/2 (i.e. 2*Mz).
inline int mz_twice(int b, int n) { return n - 2 * __builtin_popcount(static_cast<unsigned>(b)); }

// Kronecker-embedded single-spin operator I_{site,axis}; entries +-1/2, +-i/2.
Eigen::MatrixXcd single_spin_operator(const SpinSystem& system, int site, char axis);

// Diagonal of Sum_i I_iz in the product basis (each entry mz_twice/2).
Eigen::VectorXd total_iz_diagonal(int n);

// Full 2^n x 2^n isotropic exchange Hamiltonian,
//   H = angular_factor * Sum_{i<j} J_ij (IxIx + IyIy + IzIz),   [rad/s]
// real symmetric, commutes with Sum_i I_iz. Refuses n > 14.
Eigen::MatrixXd build_hamiltonian(const SpinSystem& system, const Convention& convention = {});

struct Sector {
  int mz_twice = 0;             // 2*Mz of every state in this sector
  std::vector<int> states;      // product-basis indices, ascending
  Eigen::MatrixXd block;        // real symmetric Hamiltonian block, rad/s
};

struct SectorDecomposition {
  int n = 0;
  Convention convention;
  std::vector<Sector> sectors;  // ordered by descending mz (popcount 0..n)

  // Scatter the blocks back into a full 2^n x 2^n matrix (exact).
  Eigen::MatrixXd assemble() const;
};

// Splits a full H into total-Mz blocks. Signals NumericalError if any
// off-block entry is nonzero (a corrupted H).
SectorDecomposition sector_decompose(const SpinSystem& system, const Eigen::MatrixXd& h,
                                     const Convention& convention = {});

// Builds the sector blocks directly from the couplings without materializing
// the full matrix; this is the production path and allows n up to 16.
SectorDecomposition build_sector_hamiltonians(const SpinSystem& system,
                                              const Convention& convention = {});

}  // namespace zenospin
