#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

namespace photonwalk {

// N x N Hermitian matrix of coupled-mode parameters: propagation constants
// beta_i on the diagonal, coupling strengths C_ij off it. Units rad/length.
struct CouplingMatrix {
  Eigen::MatrixXcd entries;

  int dim() const { return static_cast<int>(entries.rows()); }

  // Largest |C - C^dagger| entry.
  double hermiticity_deviation() const;
  // Throws ValidationError unless Hermitian within `tol` with real diagonal.
  void validate(double tol = 1e-12) const;
};

enum class GeometryKind { chain, grid2d, explicit_positions };

// Waveguide cross-section layout. `spacing` is the reference distance at
// which the coupling equals c0.
struct LatticeGeometry {
  GeometryKind kind = GeometryKind::chain;
  int rows = 1;
  int cols = 1;
  std::vector<Eigen::Vector2d> positions;
  double spacing = 1.0;

  int site_count() const { return static_cast<int>(positions.size()); }

  static LatticeGeometry make_chain(int sites, double spacing);
  static LatticeGeometry make_grid(int rows, int cols, double spacing);
  static LatticeGeometry make_explicit(std::vector<Eigen::Vector2d> positions, double spacing);

  // Throws GeometryError on duplicate positions or inconsistent shape.
  void validate() const;
};

// Multiplicative jitter applied to the couplings over K propagation segments.
// Identical spec (including seed) always yields the identical realization.
struct DisorderSpec {
  std::uint64_t seed = 0;
  double edge_jitter = 0.0;           // relative half-width, in [0, 1)
  int segments = 1;                   // K >= 1
  double segment_length_jitter = 0.0; // relative half-width on Z/K, in [0, 1]
  // Optional extension: additive uniform jitter on the propagation constants,
  // absolute half-width in rad/length. Couplings model disorder by default;
  // this stays 0 unless asked for.
  double diagonal_jitter = 0.0;
};

struct LatticeSegment {
  CouplingMatrix coupling;
  double length = 0.0;
};

// Coupling matrix from geometry with an exponential distance decay:
//   C_ij = c0 * exp(-(d_ij - spacing) / d0)   (i != j, d_ij Euclidean)
//   C_ii = beta
// All sites couple to all others; nothing is truncated to zero.
CouplingMatrix build_coupling_matrix(const LatticeGeometry& geometry, double c0, double d0,
                                     double beta);

// Splits a total propagation length into `spec.segments` pieces; in each, the
// off-diagonal couplings are scaled by independent uniform draws from
// [1 - edge_jitter, 1 + edge_jitter] (same factor on C_ij and C_ji) and the
// piece length is (Z/K) * (1 + segment_length_jitter * u), u uniform in [-1, 1].
std::vector<LatticeSegment> apply_disorder(const CouplingMatrix& c, const DisorderSpec& spec,
                                           double total_length);

// All unordered mode pairs (i, j), i <= j, in lexicographic order.
// Size n(n+1)/2; the i < j pairs index two-detector coincidences and the
// i == j pairs index bunching events. Indices are 0-based.
std::vector<std::pair<int, int>> two_photon_basis(int n_sites);

}  // namespace photonwalk
