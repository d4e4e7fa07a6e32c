#include "photonwalk/evolution.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>

#include "photonwalk/errors.hpp"

namespace photonwalk {

namespace {
constexpr double kRelativeHermiticityTol = 1e-9;
}

double UnitaryMatrix::unitarity_deviation() const {
  const int n = dim();
  return (entries.adjoint() * entries - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

void UnitaryMatrix::validate(double tol) const {
  if (entries.rows() != entries.cols() || entries.rows() == 0) {
    throw ValidationError("unitary matrix must be square and non-empty");
  }
  if (unitarity_deviation() >= tol) {
    throw ValidationError("matrix is not unitary within tolerance");
  }
}

UnitaryMatrix evolve_unitary(const CouplingMatrix& c, double z) {
  if (c.entries.rows() != c.entries.cols() || c.entries.rows() == 0) {
    throw ValidationError("coupling matrix must be square and non-empty");
  }
  if (z < 0.0) throw ParameterError("propagation length must be non-negative");

  const double scale = c.entries.cwiseAbs().maxCoeff();
  const double deviation = c.hermiticity_deviation();
  if (deviation > kRelativeHermiticityTol * std::max(scale, 1.0)) {
    throw ValidationError("coupling matrix is not Hermitian within relative tolerance 1e-9");
  }
  const Eigen::MatrixXcd sym = 0.5 * (c.entries + c.entries.adjoint());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigendecomposition of the coupling matrix failed");
  }
  // Real spectrum, so exp(i lambda z) has unit modulus and U is unitary up
  // to eigensolver accuracy.
  const Eigen::VectorXd& lambda = solver.eigenvalues();
  Eigen::VectorXcd phase(lambda.size());
  for (int k = 0; k < lambda.size(); ++k) {
    phase(k) = std::exp(std::complex<double>(0.0, lambda(k) * z));
  }
  UnitaryMatrix u;
  u.entries = solver.eigenvectors() * phase.asDiagonal() * solver.eigenvectors().adjoint();
  return u;
}

UnitaryMatrix evolve_segments(const std::vector<LatticeSegment>& segments) {
  if (segments.empty()) throw ParameterError("segment list must not be empty");
  UnitaryMatrix u = evolve_unitary(segments.front().coupling, segments.front().length);
  for (std::size_t k = 1; k < segments.size(); ++k) {
    if (segments[k].coupling.dim() != u.dim()) {
      throw ValidationError("all segments must share the same dimension");
    }
    u.entries = evolve_unitary(segments[k].coupling, segments[k].length).entries * u.entries;
  }
  return u;
}

}  // namespace photonwalk
