#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>

#include "photonwalk/correlation.hpp"
#include "photonwalk/metrics.hpp"

namespace photonwalk {

// Coincidence counts per unordered output pair. The sum of the counts is at
// most total_pairs_emitted: photons lost at the output and bunched pairs that
// fail to split at the detection fiber splitter are discarded.
struct CountRecord {
  std::map<std::pair<int, int>, std::int64_t> pairs;  // key (i, j) with i <= j
  std::int64_t total_pairs_emitted = 0;
  std::uint64_t seed = 0;
  int dim = 0;

  std::int64_t total_counts() const;
};

// Per-mode output coupling efficiency in (0, 1].
struct LossVector {
  Eigen::VectorXd efficiencies;

  static LossVector uniform(int dim, double efficiency);
  void validate(int dim) const;
};

// Draws n_pairs two-photon events from the unordered distribution Gamma.
// Each photon of an event landing on output k survives independently with
// probability efficiencies[k]; events with a lost photon are discarded
// (post-selection keeps only two-detector coincidences). A surviving bunched
// event (i == j) is recorded only when the two photons split at the detection
// fiber splitter, i.e. with probability 2 * s * (1 - s) for splitting ratio
// s : (1 - s). Deterministic under (inputs, seed).
CountRecord sample_counts(const CorrelationMatrix& gamma, std::int64_t n_pairs,
                          const LossVector& loss, double bunching_split, std::uint64_t seed);

struct EstimateOptions {
  // When set, bunched counts are divided by the splitter detection factor
  // 2 * s * (1 - s) before normalization.
  std::optional<double> bunching_split;
  // When set, every count is divided by the product of its two output
  // efficiencies before normalization.
  std::optional<LossVector> loss;
};

struct CorrelationEstimate {
  CorrelationMatrix gamma;
  // First-order Poisson uncertainty per cell: sigma = sqrt(count) scaled by
  // the same correction and normalization as the point estimate. Count
  // covariances introduced by the normalization are ignored.
  Eigen::MatrixXd sigma;
};

CorrelationEstimate estimate_correlation(const CountRecord& record,
                                         const EstimateOptions& options);

struct ViolationSignificance {
  Eigen::MatrixXd value;         // V from the point estimates
  Eigen::MatrixXd significance;  // V / sigma_V, 0 where sigma_V is 0
};

// Propagates the cell uncertainties through the violation witness:
//   dV/dGamma_ii = (1/3) sqrt(Gamma_jj / Gamma_ii), dV/dGamma_ij = -1,
// with sigma_V = sigma_ij when either diagonal estimate is zero.
ViolationSignificance violation_significance(const CorrelationMatrix& gamma_hat,
                                             const Eigen::MatrixXd& sigma);

}  // namespace photonwalk
