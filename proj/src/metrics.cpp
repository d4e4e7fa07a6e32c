#include "photonwalk/metrics.hpp"

#include <cmath>

#include "photonwalk/errors.hpp"

namespace photonwalk {

ViolationMatrix violation_matrix(const CorrelationMatrix& gamma) {
  if (gamma.values.rows() != gamma.values.cols() || gamma.values.rows() == 0) {
    throw ValidationError("correlation matrix must be square and non-empty");
  }
  if (gamma.values.minCoeff() < 0.0) {
    throw ValidationError("correlation matrix entries must be non-negative");
  }
  const int n = gamma.dim();
  ViolationMatrix v;
  v.values = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      v.values(i, j) =
          (2.0 / 3.0) * std::sqrt(gamma.values(i, i) * gamma.values(j, j)) - gamma.values(i, j);
    }
  }
  return v;
}

double similarity(const CorrelationMatrix& a, const CorrelationMatrix& b) {
  if (a.dim() != b.dim()) throw ParameterError("similarity needs equally sized matrices");
  if (a.values.minCoeff() < 0.0 || b.values.minCoeff() < 0.0) {
    throw ValidationError("similarity is defined for non-negative matrices");
  }
  double cross = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    for (int j = i; j < a.dim(); ++j) {
      cross += std::sqrt(a.values(i, j) * b.values(i, j));
      sum_a += a.values(i, j);
      sum_b += b.values(i, j);
    }
  }
  if (sum_a <= 0.0 || sum_b <= 0.0) {
    throw ValidationError("similarity needs at least one positive entry in each matrix");
  }
  return (cross * cross) / (sum_a * sum_b);
}

double hom_max_visibility(double reflectivity) {
  if (reflectivity <= 0.0 || reflectivity >= 1.0) {
    throw ParameterError("reflectivity must lie strictly between 0 and 1");
  }
  const double r = reflectivity;
  const double t = 1.0 - r;
  return 2.0 * r * t / (r * r + t * t);
}

}  // namespace photonwalk
