#include "photonwalk/lattice.hpp"

#include <cmath>
#include <string>

#include "photonwalk/errors.hpp"
#include "photonwalk/rng.hpp"

namespace photonwalk {

double CouplingMatrix::hermiticity_deviation() const {
  return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
}

void CouplingMatrix::validate(double tol) const {
  if (entries.rows() != entries.cols() || entries.rows() == 0) {
    throw ValidationError("coupling matrix must be square and non-empty");
  }
  if (hermiticity_deviation() >= tol) {
    throw ValidationError("coupling matrix is not Hermitian within tolerance");
  }
  for (int i = 0; i < dim(); ++i) {
    if (std::abs(entries(i, i).imag()) >= tol) {
      throw ValidationError("coupling matrix diagonal must be real");
    }
  }
}

LatticeGeometry LatticeGeometry::make_chain(int sites, double spacing) {
  if (sites < 1) throw GeometryError("chain needs at least one site");
  if (spacing <= 0.0) throw GeometryError("spacing must be positive");
  LatticeGeometry g;
  g.kind = GeometryKind::chain;
  g.rows = 1;
  g.cols = sites;
  g.spacing = spacing;
  g.positions.reserve(sites);
  for (int k = 0; k < sites; ++k) g.positions.emplace_back(k * spacing, 0.0);
  return g;
}

LatticeGeometry LatticeGeometry::make_grid(int rows, int cols, double spacing) {
  if (rows < 1 || cols < 1) throw GeometryError("grid needs positive rows and cols");
  if (spacing <= 0.0) throw GeometryError("spacing must be positive");
  LatticeGeometry g;
  g.kind = GeometryKind::grid2d;
  g.rows = rows;
  g.cols = cols;
  g.spacing = spacing;
  g.positions.reserve(static_cast<std::size_t>(rows) * cols);
  // Row-major site order, so a 3x3 grid numbers its layers top to bottom.
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) g.positions.emplace_back(c * spacing, r * spacing);
  return g;
}

LatticeGeometry LatticeGeometry::make_explicit(std::vector<Eigen::Vector2d> positions,
                                               double spacing) {
  if (positions.empty()) throw GeometryError("explicit geometry needs at least one position");
  if (spacing <= 0.0) throw GeometryError("spacing must be positive");
  LatticeGeometry g;
  g.kind = GeometryKind::explicit_positions;
  g.rows = 1;
  g.cols = static_cast<int>(positions.size());
  g.spacing = spacing;
  g.positions = std::move(positions);
  return g;
}

void LatticeGeometry::validate() const {
  if (positions.empty()) throw GeometryError("geometry has no sites");
  if (spacing <= 0.0) throw GeometryError("spacing must be positive");
  if (kind == GeometryKind::grid2d &&
      static_cast<std::size_t>(rows) * cols != positions.size()) {
    throw GeometryError("grid2d rows*cols does not match the number of positions");
  }
  if (kind == GeometryKind::chain && rows != 1) {
    throw GeometryError("chain geometry must have rows = 1");
  }
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t j = i + 1; j < positions.size(); ++j) {
      if ((positions[i] - positions[j]).norm() == 0.0) {
        throw GeometryError("duplicate waveguide positions at indices " + std::to_string(i + 1) +
                            " and " + std::to_string(j + 1));
      }
    }
  }
}

CouplingMatrix build_coupling_matrix(const LatticeGeometry& geometry, double c0, double d0,
                                     double beta) {
  if (c0 <= 0.0) throw ParameterError("c0 must be positive");
  if (d0 <= 0.0) throw ParameterError("d0 must be positive");
  geometry.validate();

  const int n = geometry.site_count();
  CouplingMatrix c;
  c.entries = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    c.entries(i, i) = beta;
    for (int j = i + 1; j < n; ++j) {
      const double dist = (geometry.positions[i] - geometry.positions[j]).norm();
      const double value = c0 * std::exp(-(dist - geometry.spacing) / d0);
      c.entries(i, j) = value;
      c.entries(j, i) = value;
    }
  }
  return c;
}

std::vector<LatticeSegment> apply_disorder(const CouplingMatrix& c, const DisorderSpec& spec,
                                           double total_length) {
  c.validate();
  if (spec.edge_jitter < 0.0 || spec.edge_jitter >= 1.0) {
    throw ParameterError("edge_jitter must lie in [0, 1); values >= 1 can flip coupling signs");
  }
  if (spec.segments < 1) throw ParameterError("segments must be >= 1");
  if (spec.segment_length_jitter < 0.0 || spec.segment_length_jitter > 1.0) {
    throw ParameterError("segment_length_jitter must lie in [0, 1]");
  }
  if (spec.diagonal_jitter < 0.0) throw ParameterError("diagonal_jitter must be >= 0");
  if (total_length <= 0.0) throw ParameterError("total length must be positive");

  const int n = c.dim();
  const double base_length = total_length / spec.segments;
  std::vector<LatticeSegment> segments;
  segments.reserve(spec.segments);

  for (int k = 0; k < spec.segments; ++k) {
    // One independent stream per segment keeps realizations stable if the
    // segment count of a later sweep changes.
    SplitMix64 g(derive_seed(spec.seed, static_cast<std::uint64_t>(k)));
    LatticeSegment seg;
    seg.coupling.entries = c.entries;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double factor = g.next_double(1.0 - spec.edge_jitter, 1.0 + spec.edge_jitter);
        seg.coupling.entries(i, j) *= factor;
        seg.coupling.entries(j, i) *= factor;
      }
    }
    const double u = g.next_double(-1.0, 1.0);
    seg.length = base_length * (1.0 + spec.segment_length_jitter * u);
    if (seg.length <= 0.0) throw NumericalError("disordered segment length collapsed to zero");
    if (spec.diagonal_jitter > 0.0) {
      for (int i = 0; i < n; ++i) {
        seg.coupling.entries(i, i) += g.next_double(-spec.diagonal_jitter, spec.diagonal_jitter);
      }
    }
    segments.push_back(std::move(seg));
  }
  return segments;
}

std::vector<std::pair<int, int>> two_photon_basis(int n_sites) {
  if (n_sites < 1) throw ParameterError("n_sites must be >= 1");
  std::vector<std::pair<int, int>> basis;
  basis.reserve(static_cast<std::size_t>(n_sites) * (n_sites + 1) / 2);
  for (int i = 0; i < n_sites; ++i)
    for (int j = i; j < n_sites; ++j) basis.emplace_back(i, j);
  return basis;
}

}  // namespace photonwalk
