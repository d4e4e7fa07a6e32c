#pragma once

#include <Eigen/Dense>
#include <functional>

namespace photonwalk {

struct LeastSquaresResult {
  Eigen::VectorXd parameters;
  double residual = 0.0;  // sum of squared residuals at the solution
  int iterations = 0;
  bool converged = false;
};

// Residual evaluator: fills r(params) and, when jacobian != nullptr, the
// m x n Jacobian dr/dparams.
using ResidualFn =
    std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&, Eigen::MatrixXd*)>;

// Dense Levenberg-Marquardt with an additive damping on the scaled diagonal.
// Small problems only (tens of parameters); all callers in this library stay
// well under that.
LeastSquaresResult levenberg_marquardt(const ResidualFn& eval, Eigen::VectorXd initial,
                                       int max_iterations = 200);

}  // namespace photonwalk
