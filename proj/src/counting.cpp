#include "photonwalk/counting.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "photonwalk/errors.hpp"
#include "photonwalk/rng.hpp"

namespace photonwalk {

std::int64_t CountRecord::total_counts() const {
  std::int64_t total = 0;
  for (const auto& [pair, count] : pairs) total += count;
  return total;
}

LossVector LossVector::uniform(int dim, double efficiency) {
  LossVector loss;
  loss.efficiencies = Eigen::VectorXd::Constant(dim, efficiency);
  loss.validate(dim);
  return loss;
}

void LossVector::validate(int dim) const {
  if (efficiencies.size() != dim) {
    throw ParameterError("loss vector size does not match the mode count");
  }
  for (int k = 0; k < dim; ++k) {
    if (!(efficiencies(k) > 0.0) || efficiencies(k) > 1.0) {
      throw ParameterError("output efficiencies must lie in (0, 1]");
    }
  }
}

CountRecord sample_counts(const CorrelationMatrix& gamma, std::int64_t n_pairs,
                          const LossVector& loss, double bunching_split, std::uint64_t seed) {
  gamma.validate(1e-6);
  if (n_pairs < 1) throw ParameterError("n_pairs must be >= 1");
  loss.validate(gamma.dim());
  if (bunching_split <= 0.0 || bunching_split >= 1.0) {
    throw ParameterError("bunching_split must lie strictly between 0 and 1");
  }

  const auto basis = two_photon_basis(gamma.dim());
  std::vector<double> cumulative(basis.size());
  double running = 0.0;
  for (std::size_t m = 0; m < basis.size(); ++m) {
    running += gamma.values(basis[m].first, basis[m].second);
    cumulative[m] = running;
  }
  for (double& c : cumulative) c /= running;
  cumulative.back() = 1.0;

  const double split_probability = 2.0 * bunching_split * (1.0 - bunching_split);

  CountRecord record;
  record.total_pairs_emitted = n_pairs;
  record.seed = seed;
  record.dim = gamma.dim();
  for (std::int64_t event = 0; event < n_pairs; ++event) {
    // One stream per event: thinning by loss cannot shift later events, so
    // runs with different loss vectors stay paired under the same seed.
    SplitMix64 g(derive_seed(seed, static_cast<std::uint64_t>(event)));
    const double u = g.next_double();
    // upper_bound: cells of zero probability (equal adjacent cumulatives)
    // can never be selected, including at u exactly 0.
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const auto [i, j] = basis[static_cast<std::size_t>(it - cumulative.begin())];

    const bool first_survives = g.next_double() < loss.efficiencies(i);
    const bool second_survives = g.next_double() < loss.efficiencies(j);
    if (!first_survives || !second_survives) continue;
    if (i == j && g.next_double() >= split_probability) continue;
    ++record.pairs[{i, j}];
  }
  return record;
}

CorrelationEstimate estimate_correlation(const CountRecord& record,
                                         const EstimateOptions& options) {
  if (record.dim < 1) throw ValidationError("count record has no dimension");
  if (record.total_counts() <= 0) throw ValidationError("count record has zero total counts");
  if (options.bunching_split &&
      (*options.bunching_split <= 0.0 || *options.bunching_split >= 1.0)) {
    throw ParameterError("bunching_split must lie strictly between 0 and 1");
  }
  if (options.loss) options.loss->validate(record.dim);

  const int n = record.dim;
  Eigen::MatrixXd corrected = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd raw_sigma = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [pair, count] : record.pairs) {
    const auto [i, j] = pair;
    if (i < 0 || j < i || j >= n) throw ValidationError("count record pair index out of range");
    if (count < 0) throw ValidationError("counts must be non-negative");
    double divisor = 1.0;
    if (i == j && options.bunching_split) {
      const double s = *options.bunching_split;
      divisor *= 2.0 * s * (1.0 - s);
    }
    if (options.loss) {
      divisor *= options.loss->efficiencies(i) * options.loss->efficiencies(j);
    }
    corrected(i, j) = static_cast<double>(count) / divisor;
    raw_sigma(i, j) = std::sqrt(static_cast<double>(count)) / divisor;
  }

  double total = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) total += corrected(i, j);
  if (total <= 0.0) throw ValidationError("corrected counts sum to zero");

  CorrelationEstimate estimate;
  estimate.gamma.values = Eigen::MatrixXd::Zero(n, n);
  estimate.sigma = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      estimate.gamma.values(i, j) = corrected(i, j) / total;
      estimate.gamma.values(j, i) = estimate.gamma.values(i, j);
      estimate.sigma(i, j) = raw_sigma(i, j) / total;
      estimate.sigma(j, i) = estimate.sigma(i, j);
    }
  }
  return estimate;
}

ViolationSignificance violation_significance(const CorrelationMatrix& gamma_hat,
                                             const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != gamma_hat.dim() || sigma.cols() != gamma_hat.dim()) {
    throw ParameterError("sigma dimensions must match the correlation estimate");
  }
  if (sigma.minCoeff() < 0.0) throw ParameterError("sigma entries must be non-negative");

  const ViolationMatrix v = violation_matrix(gamma_hat);
  const int n = gamma_hat.dim();
  ViolationSignificance result;
  result.value = v.values;
  result.significance = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double gii = gamma_hat.values(i, i);
      const double gjj = gamma_hat.values(j, j);
      double sigma_v = 0.0;
      if (gii > 0.0 && gjj > 0.0) {
        const double di = (1.0 / 3.0) * std::sqrt(gjj / gii) * sigma(i, i);
        const double dj = (1.0 / 3.0) * std::sqrt(gii / gjj) * sigma(j, j);
        sigma_v = std::sqrt(di * di + dj * dj + sigma(i, j) * sigma(i, j));
      } else {
        sigma_v = sigma(i, j);
      }
      result.significance(i, j) = sigma_v > 0.0 ? v.values(i, j) / sigma_v : 0.0;
    }
  }
  return result;
}

}  // namespace photonwalk
