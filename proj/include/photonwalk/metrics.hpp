#pragma once

#include <Eigen/Dense>

#include "photonwalk/correlation.hpp"

namespace photonwalk {

// Cauchy-Schwarz witness V_ij = (2/3) sqrt(Gamma_ii Gamma_jj) - Gamma_ij.
// Positive entries cannot be produced by classical light fields; the diagonal
// is not part of the claim and is kept at zero.
struct ViolationMatrix {
  Eigen::MatrixXd values;

  int dim() const { return static_cast<int>(values.rows()); }
};

ViolationMatrix violation_matrix(const CorrelationMatrix& gamma);

// Bhattacharyya-style overlap of two non-negative unordered-pair
// distributions, summed over i <= j:
//   S = (sum sqrt(a_ij b_ij))^2 / (sum a_ij * sum b_ij)
// S is scale invariant, lies in [0, 1], and equals 1 iff a and b are
// proportional.
double similarity(const CorrelationMatrix& a, const CorrelationMatrix& b);

// Maximum HOM dip visibility of an R:(1-R) splitter for perfectly
// indistinguishable photons: 2RT / (R^2 + T^2).
double hom_max_visibility(double reflectivity);

}  // namespace photonwalk
