#include "zenospin/hamiltonian.hpp"

#include <string>

namespace zenospin {

using complexd = std::complex<double>;

Eigen::MatrixXcd single_spin_operator(const SpinSystem& system, int site, char axis) {
  const int n = system.n;
  if (site < 0 || site >= n) {
    throw ValidationError("site index " + std::to_string(site) + " out of range");
  }
  if (n > kMaxSpinsDense) {
    throw ValidationError("full-space operators limited to " + std::to_string(kMaxSpinsDense) + " spins");
  }
  const int dim = basis_dim(n);
  Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(dim, dim);
  for (int b = 0; b < dim; ++b) {
    switch (axis) {
      case 'z':
        op(b, b) = 0.5 * spin_sign(b, site);
        break;
      case 'x':
        op(b ^ (1 << site), b) = 0.5;
        break;
      case 'y': {
        // <flipped| Iy |b> = +i/2 when b has the spin up, -i/2 when down
        const bool up = ((b >> site) & 1) == 0;
        op(b ^ (1 << site), b) = up ? complexd(0.0, 0.5) : complexd(0.0, -0.5);
        break;
      }
      default:
        throw ValidationError(std::string("axis must be x, y or z, got '") + axis + "'");
    }
  }
  return op;
}

Eigen::VectorXd total_iz_diagonal(int n) {
  const int dim = basis_dim(n);
  Eigen::VectorXd d(dim);
  for (int b = 0; b < dim; ++b) d(b) = 0.5 * mz_twice(b, n);
  return d;
}

Eigen::MatrixXd build_hamiltonian(const SpinSystem& system, const Convention& convention) {
  validate_spin_system(system);
  if (convention.angular_factor <= 0.0) throw ValidationError("angular_factor must be positive");
  if (system.n > kMaxSpinsDense) {
    throw ValidationError("full dense Hamiltonian limited to " + std::to_string(kMaxSpinsDense) +
                          " spins; use the sector path");
  }
  const int n = system.n;
  const int dim = basis_dim(n);
  const double f = convention.angular_factor;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int b = 0; b < dim; ++b) {
    double diag = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double jij = system.couplings(i, j);
        if (jij == 0.0) continue;
        diag += jij * (0.25 * spin_sign(b, i) * spin_sign(b, j));
        if (((b >> i) & 1) != ((b >> j) & 1)) {
          const int a = b ^ (1 << i) ^ (1 << j);  // flip-flop partner, same Mz
          if (a > b) {
            const double v = f * 0.5 * jij;
            h(a, b) += v;
            h(b, a) += v;
          }
        }
      }
    }
    h(b, b) = f * diag;
  }
  return h;
}

namespace {

// sector index by popcount; states listed ascending within each sector
std::vector<std::vector<int>> sector_states(int n) {
  std::vector<std::vector<int>> states(n + 1);
  for (int b = 0; b < basis_dim(n); ++b) {
    states[__builtin_popcount(static_cast<unsigned>(b))].push_back(b);
  }
  return states;
}

}  // namespace

Eigen::MatrixXd SectorDecomposition::assemble() const {
  const int dim = basis_dim(n);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& sec : sectors) {
    const int d = static_cast<int>(sec.states.size());
    for (int p = 0; p < d; ++p) {
      for (int q = 0; q < d; ++q) h(sec.states[p], sec.states[q]) = sec.block(p, q);
    }
  }
  return h;
}

SectorDecomposition sector_decompose(const SpinSystem& system, const Eigen::MatrixXd& h,
                                     const Convention& convention) {
  const int n = system.n;
  const int dim = basis_dim(n);
  if (h.rows() != dim || h.cols() != dim) throw ValidationError("Hamiltonian dimension mismatch");

  SectorDecomposition dec;
  dec.n = n;
  dec.convention = convention;
  std::vector<int> sector_of(dim);
  for (int b = 0; b < dim; ++b) sector_of[b] = __builtin_popcount(static_cast<unsigned>(b));
  for (int k = 0; k <= n; ++k) {
    Sector sec;
    sec.mz_twice = n - 2 * k;
    for (int b = 0; b < dim; ++b) {
      if (sector_of[b] == k) sec.states.push_back(b);
    }
    const int d = static_cast<int>(sec.states.size());
    sec.block.resize(d, d);
    for (int p = 0; p < d; ++p) {
      for (int q = 0; q < d; ++q) sec.block(p, q) = h(sec.states[p], sec.states[q]);
    }
    dec.sectors.push_back(std::move(sec));
  }
  // conservation of total Mz must make every off-block entry exactly zero
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      if (sector_of[a] != sector_of[b] && h(a, b) != 0.0) {
        throw NumericalError("Hamiltonian has a nonzero entry between Mz sectors: corrupted H");
      }
    }
  }
  return dec;
}

SectorDecomposition build_sector_hamiltonians(const SpinSystem& system,
                                              const Convention& convention) {
  validate_spin_system(system);
  if (convention.angular_factor <= 0.0) throw ValidationError("angular_factor must be positive");
  const int n = system.n;
  const double f = convention.angular_factor;

  SectorDecomposition dec;
  dec.n = n;
  dec.convention = convention;
  const auto states = sector_states(n);
  for (int k = 0; k <= n; ++k) {
    Sector sec;
    sec.mz_twice = n - 2 * k;
    sec.states = states[k];
    const int d = static_cast<int>(sec.states.size());
    // position of each basis state inside this sector
    std::vector<int> pos(basis_dim(n), -1);
    for (int p = 0; p < d; ++p) pos[sec.states[p]] = p;
    sec.block = Eigen::MatrixXd::Zero(d, d);
    for (int p = 0; p < d; ++p) {
      const int b = sec.states[p];
      double diag = 0.0;
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          const double jij = system.couplings(i, j);
          if (jij == 0.0) continue;
          diag += jij * (0.25 * spin_sign(b, i) * spin_sign(b, j));
          if (((b >> i) & 1) != ((b >> j) & 1)) {
            const int a = b ^ (1 << i) ^ (1 << j);
            if (a > b) {
              const double v = f * 0.5 * jij;
              sec.block(pos[a], p) += v;
              sec.block(p, pos[a]) += v;
            }
          }
        }
      }
      sec.block(p, p) = f * diag;
    }
    dec.sectors.push_back(std::move(sec));
  }
  return dec;
}

}  // namespace zenospin
