#include "photonwalk/correlation.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "photonwalk/errors.hpp"

namespace photonwalk {

namespace {

constexpr double kNegativityTol = 1e-12;

void check_mode(int mode, int dim, const char* what) {
  if (mode < 0 || mode >= dim) {
    throw ParameterError(std::string(what) + " mode index " + std::to_string(mode + 1) +
                         " out of range 1.." + std::to_string(dim));
  }
}

void check_pair_input(const PairInput& pair, int dim) {
  check_mode(pair.mode_i, dim, "input");
  check_mode(pair.mode_j, dim, "input");
  if (pair.mode_i == pair.mode_j) {
    throw ParameterError("two-photon input modes must be distinct");
  }
  if (pair.indistinguishability < 0.0 || pair.indistinguishability > 1.0) {
    throw ParameterError("indistinguishability must lie in [0, 1]");
  }
}

}  // namespace

double CorrelationMatrix::triangle_sum() const {
  double sum = 0.0;
  for (int i = 0; i < dim(); ++i)
    for (int j = i; j < dim(); ++j) sum += values(i, j);
  return sum;
}

void CorrelationMatrix::validate(double norm_tol) const {
  if (values.rows() != values.cols() || values.rows() == 0) {
    throw ValidationError("correlation matrix must be square and non-empty");
  }
  if ((values - values.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ValidationError("correlation matrix must be symmetric");
  }
  if (values.minCoeff() < 0.0) {
    throw ValidationError("correlation matrix entries must be non-negative");
  }
  if (std::abs(triangle_sum() - 1.0) > norm_tol) {
    throw ValidationError("correlation matrix triangle sum deviates from 1 beyond tolerance");
  }
}

SinglesDistribution singles_distribution(const UnitaryMatrix& u, int input_mode) {
  check_mode(input_mode, u.dim(), "input");
  SinglesDistribution s;
  s.input_mode = input_mode;
  s.probabilities = u.entries.col(input_mode).cwiseAbs2();
  return s;
}

CorrelationMatrix pair_correlation_from_columns(const Eigen::VectorXcd& column_i,
                                                const Eigen::VectorXcd& column_j, double mu) {
  if (column_i.size() != column_j.size() || column_i.size() == 0) {
    throw ParameterError("amplitude columns must be non-empty and equal sized");
  }
  if (mu < 0.0 || mu > 1.0) throw ParameterError("indistinguishability must lie in [0, 1]");

  const int n = static_cast<int>(column_i.size());
  CorrelationMatrix gamma;
  gamma.values = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    for (int l = k; l < n; ++l) {
      const std::complex<double> direct = column_i(k) * column_j(l);
      const std::complex<double> exchanged = column_j(k) * column_i(l);
      const double classical = std::norm(direct) + std::norm(exchanged);
      const double interference = 2.0 * std::real(direct * std::conj(exchanged));
      double value = (classical + mu * interference) / (k == l ? 2.0 : 1.0);
      if (value < 0.0) {
        if (value < -kNegativityTol) {
          throw NumericalError("correlation entry negative beyond tolerance");
        }
        value = 0.0;
      }
      gamma.values(k, l) = value;
      gamma.values(l, k) = value;
    }
  }
  return gamma;
}

CorrelationMatrix quantum_correlation(const UnitaryMatrix& u, const PairInput& pair) {
  check_pair_input(pair, u.dim());
  return pair_correlation_from_columns(u.entries.col(pair.mode_i), u.entries.col(pair.mode_j),
                                       1.0);
}

CorrelationMatrix classical_correlation(const UnitaryMatrix& u, const PairInput& pair) {
  check_pair_input(pair, u.dim());
  return pair_correlation_from_columns(u.entries.col(pair.mode_i), u.entries.col(pair.mode_j),
                                       0.0);
}

CorrelationMatrix partial_correlation(const UnitaryMatrix& u, const PairInput& pair) {
  check_pair_input(pair, u.dim());
  return pair_correlation_from_columns(u.entries.col(pair.mode_i), u.entries.col(pair.mode_j),
                                       pair.indistinguishability);
}

std::vector<DipSample> hom_dip_curve(const UnitaryMatrix& u, const PairInput& pair,
                                     std::pair<int, int> output_pair,
                                     const std::vector<double>& delays, double coherence_time) {
  check_pair_input(pair, u.dim());
  check_mode(output_pair.first, u.dim(), "output");
  check_mode(output_pair.second, u.dim(), "output");
  if (coherence_time <= 0.0) throw ParameterError("coherence_time must be positive");

  std::vector<DipSample> curve;
  curve.reserve(delays.size());
  for (double tau : delays) {
    const double ratio = tau / coherence_time;
    PairInput delayed = pair;
    delayed.indistinguishability = pair.indistinguishability * std::exp(-ratio * ratio);
    const CorrelationMatrix gamma = partial_correlation(u, delayed);
    curve.push_back({tau, gamma.values(output_pair.first, output_pair.second)});
  }
  return curve;
}

}  // namespace photonwalk
