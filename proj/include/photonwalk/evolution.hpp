#pragma once

#include <Eigen/Dense>

#include "photonwalk/lattice.hpp"

namespace photonwalk {

// Evolution operator U(z) = exp(i C z) mapping input mode amplitudes to
// output mode amplitudes; column index = input mode, row index = output mode.
struct UnitaryMatrix {
  Eigen::MatrixXcd entries;

  int dim() const { return static_cast<int>(entries.rows()); }

  // Largest |U^dagger U - I| entry.
  double unitarity_deviation() const;
  void validate(double tol = 1e-10) const;
};

// exp(i c z) through the spectral decomposition of the Hermitian input:
// U = V diag(exp(i lambda_k z)) V^dagger. The input is accepted if its
// relative Hermiticity deviation is below 1e-9, then symmetrized before
// decomposition.
UnitaryMatrix evolve_unitary(const CouplingMatrix& c, double z);

// Ordered product U_K ... U_2 U_1 over piecewise-constant segments, applied
// in propagation order (segments[0] acts first).
UnitaryMatrix evolve_segments(const std::vector<LatticeSegment>& segments);

}  // namespace photonwalk
