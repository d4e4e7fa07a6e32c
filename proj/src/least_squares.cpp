#include "photonwalk/least_squares.hpp"

#include <cmath>

#include "photonwalk/errors.hpp"

namespace photonwalk {

LeastSquaresResult levenberg_marquardt(const ResidualFn& eval, Eigen::VectorXd initial,
                                       int max_iterations) {
  const int n = static_cast<int>(initial.size());
  Eigen::VectorXd params = std::move(initial);
  Eigen::VectorXd residuals;
  Eigen::MatrixXd jacobian;
  eval(params, residuals, &jacobian);
  double cost = residuals.squaredNorm();

  double damping = 1e-3;
  LeastSquaresResult result;
  result.parameters = params;
  result.residual = cost;

  for (int iter = 0; iter < max_iterations; ++iter) {
    result.iterations = iter + 1;
    const Eigen::MatrixXd normal = jacobian.transpose() * jacobian;
    const Eigen::VectorXd gradient = jacobian.transpose() * residuals;
    if (gradient.lpNorm<Eigen::Infinity>() < 1e-12) {
      result.converged = true;
      break;
    }

    Eigen::MatrixXd damped = normal;
    for (int k = 0; k < n; ++k) {
      damped(k, k) += damping * std::max(normal(k, k), 1e-12);
    }
    const Eigen::VectorXd step = damped.ldlt().solve(-gradient);
    if (!step.allFinite()) throw NumericalError("least-squares step is not finite");

    const Eigen::VectorXd candidate = params + step;
    Eigen::VectorXd candidate_residuals;
    eval(candidate, candidate_residuals, nullptr);
    const double candidate_cost = candidate_residuals.squaredNorm();

    if (candidate_cost < cost) {
      const double improvement = cost - candidate_cost;
      params = candidate;
      cost = candidate_cost;
      eval(params, residuals, &jacobian);
      damping = std::max(damping / 3.0, 1e-12);
      result.parameters = params;
      result.residual = cost;
      if (improvement <= 1e-15 * (cost + 1e-300) || step.lpNorm<Eigen::Infinity>() < 1e-13) {
        result.converged = true;
        break;
      }
    } else {
      damping *= 4.0;
      if (damping > 1e12) break;
    }
  }

  result.parameters = params;
  result.residual = cost;
  return result;
}

}  // namespace photonwalk
