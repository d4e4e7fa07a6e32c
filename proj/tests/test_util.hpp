#pragma once

// Shared generators and independent oracles for the test suites. Everything
// here works from first principles (series expansions, explicit Fock-state
// bookkeeping, permanents) so it can cross-check the library without sharing
// its code paths.

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <cstdint>
#include <vector>

#include "photonwalk/correlation.hpp"
#include "photonwalk/evolution.hpp"
#include "photonwalk/lattice.hpp"
#include "photonwalk/rng.hpp"

namespace testutil {

inline std::complex<double> random_complex_gaussian(photonwalk::SplitMix64& g) {
  return {g.next_normal(), g.next_normal()};
}

// Random Hermitian matrix with entries of magnitude up to `scale`.
inline photonwalk::CouplingMatrix random_hermitian(int n, double scale, std::uint64_t seed) {
  photonwalk::SplitMix64 g(seed);
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = g.next_double(-scale, scale);
    for (int j = i + 1; j < n; ++j) {
      m(i, j) = std::complex<double>(g.next_double(-scale, scale), g.next_double(-scale, scale));
      m(j, i) = std::conj(m(i, j));
    }
  }
  photonwalk::CouplingMatrix c;
  c.entries = m;
  return c;
}

// Haar-distributed unitary via QR of a complex Gaussian matrix with the
// R-diagonal phase fix.
inline photonwalk::UnitaryMatrix haar_unitary(int n, std::uint64_t seed) {
  photonwalk::SplitMix64 g(seed);
  Eigen::MatrixXcd z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = random_complex_gaussian(g);
  const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) {
    const std::complex<double> d = r(k, k);
    q.col(k) *= std::abs(d) > 0.0 ? d / std::abs(d) : 1.0;
  }
  photonwalk::UnitaryMatrix u;
  u.entries = q;
  return u;
}

// Plain truncated Taylor series for exp(i c z); independent of the spectral
// route used by the library. Valid for small ||c z||.
inline Eigen::MatrixXcd taylor_exp_iz(const Eigen::MatrixXcd& c, double z, int terms = 30) {
  const int n = static_cast<int>(c.rows());
  const Eigen::MatrixXcd a = std::complex<double>(0.0, 1.0) * c * z;
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd power = Eigen::MatrixXcd::Identity(n, n);
  for (int k = 1; k <= terms; ++k) {
    power = power * a / static_cast<double>(k);
    sum += power;
  }
  return sum;
}

// Permanent of a square complex matrix by direct permutation expansion.
inline std::complex<double> permanent(const Eigen::MatrixXcd& m) {
  const int n = static_cast<int>(m.rows());
  std::vector<int> perm(n);
  for (int k = 0; k < n; ++k) perm[k] = k;
  std::complex<double> total = 0.0;
  do {
    std::complex<double> product = 1.0;
    for (int k = 0; k < n; ++k) product *= m(k, perm[k]);
    total += product;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

// Second-quantized two-photon output distribution: expands a_i^+ a_j^+ |0>
// through U in the unordered Fock basis and squares amplitudes. The
// amplitude of outcome (k, l) is per(U[{k,l},{i,j}]) / sqrt(1 + delta_kl).
inline Eigen::MatrixXd fock_two_photon_distribution(const photonwalk::UnitaryMatrix& u, int i,
                                                    int j) {
  const int n = u.dim();
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [k, l] : photonwalk::two_photon_basis(n)) {
    Eigen::MatrixXcd sub(2, 2);
    sub << u.entries(k, i), u.entries(k, j), u.entries(l, i), u.entries(l, j);
    const double norm_factor = (k == l) ? 2.0 : 1.0;
    const double p = std::norm(permanent(sub)) / norm_factor;
    gamma(k, l) = p;
    gamma(l, k) = p;
  }
  return gamma;
}

// A disordered 3x3 lattice walk at a scale where the output spreads over all
// 45 unordered pairs; the synthetic stand-in for the fabricated chip.
inline photonwalk::UnitaryMatrix disordered_nine_mode(std::uint64_t seed = 7) {
  using namespace photonwalk;
  const auto geometry = LatticeGeometry::make_grid(3, 3, 1.0);
  const CouplingMatrix c = build_coupling_matrix(geometry, 1.0, 0.8, 0.0);
  DisorderSpec spec;
  spec.seed = seed;
  spec.edge_jitter = 0.25;
  spec.segments = 5;
  spec.segment_length_jitter = 0.2;
  return evolve_segments(apply_disorder(c, spec, 3.0));
}

// Distinguishable-photon oracle: product of the two singles distributions,
// marginalized onto unordered pairs.
inline Eigen::MatrixXd product_singles_distribution(const photonwalk::UnitaryMatrix& u, int i,
                                                    int j) {
  const int n = u.dim();
  const Eigen::VectorXd p = u.entries.col(i).cwiseAbs2();
  const Eigen::VectorXd q = u.entries.col(j).cwiseAbs2();
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    for (int l = k; l < n; ++l) {
      const double value = (k == l) ? p(k) * q(k) : p(k) * q(l) + p(l) * q(k);
      gamma(k, l) = value;
      gamma(l, k) = value;
    }
  }
  return gamma;
}

}  // namespace testutil
