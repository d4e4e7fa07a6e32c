#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "photonwalk/counting.hpp"
#include "photonwalk/errors.hpp"
#include "photonwalk/metrics.hpp"
#include "test_util.hpp"

using namespace photonwalk;

namespace {

CorrelationMatrix delta_gamma(int n, int i, int j) {
  CorrelationMatrix gamma;
  gamma.values = Eigen::MatrixXd::Zero(n, n);
  gamma.values(i, j) = 1.0;
  gamma.values(j, i) = 1.0;
  return gamma;
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  return xs.size() % 2 == 1 ? xs[xs.size() / 2]
                            : 0.5 * (xs[xs.size() / 2 - 1] + xs[xs.size() / 2]);
}

}  // namespace

TEST_CASE("a point distribution sends every event to its cell") {
  const CorrelationMatrix gamma = delta_gamma(4, 0, 1);
  const CountRecord record = sample_counts(gamma, 5000, LossVector::uniform(4, 1.0), 0.5, 3);
  REQUIRE(record.pairs.size() == 1);
  CHECK(record.pairs.at({0, 1}) == 5000);
  CHECK(record.total_pairs_emitted == 5000);
}

TEST_CASE("lossless counts follow the distribution within 5 sigma") {
  CorrelationMatrix gamma;
  gamma.values = Eigen::MatrixXd::Zero(3, 3);
  gamma.values(0, 1) = gamma.values(1, 0) = 0.5;
  gamma.values(0, 2) = gamma.values(2, 0) = 0.3;
  gamma.values(1, 2) = gamma.values(2, 1) = 0.2;

  const std::int64_t n_pairs = 1000000;
  const CountRecord record = sample_counts(gamma, n_pairs, LossVector::uniform(3, 1.0), 0.5, 11);
  CHECK(record.total_counts() == n_pairs);  // zero diagonal, no loss: nothing discarded
  for (const auto& [pair, count] : record.pairs) {
    const double p = gamma.values(pair.first, pair.second);
    const double expected = static_cast<double>(n_pairs) * p;
    const double sigma = std::sqrt(expected * (1.0 - p));
    CHECK(std::abs(static_cast<double>(count) - expected) < 5.0 * sigma);
  }
}

TEST_CASE("bunched events survive the detection splitter half the time") {
  const CorrelationMatrix gamma = delta_gamma(2, 0, 0);
  const std::int64_t n_pairs = 200000;
  const CountRecord record = sample_counts(gamma, n_pairs, LossVector::uniform(2, 1.0), 0.5, 5);
  const double recorded = static_cast<double>(record.pairs.at({0, 0}));
  const double expected = 0.5 * static_cast<double>(n_pairs);
  CHECK(std::abs(recorded - expected) < 5.0 * std::sqrt(expected * 0.5));
}

TEST_CASE("sampling is deterministic in the seed") {
  const UnitaryMatrix u = testutil::disordered_nine_mode();
  const CorrelationMatrix gamma = quantum_correlation(u, {0, 8, 1.0});
  const LossVector loss = LossVector::uniform(9, 0.8);
  const CountRecord a = sample_counts(gamma, 20000, loss, 0.5, 123);
  const CountRecord b = sample_counts(gamma, 20000, loss, 0.5, 123);
  CHECK(a.pairs == b.pairs);
  const CountRecord c = sample_counts(gamma, 20000, loss, 0.5, 124);
  CHECK(a.pairs != c.pairs);
}

TEST_CASE("sample_counts validates its inputs") {
  CorrelationMatrix unnormalized;
  unnormalized.values = Eigen::MatrixXd::Constant(2, 2, 1.0);
  CHECK_THROWS_AS(sample_counts(unnormalized, 10, LossVector::uniform(2, 1.0), 0.5, 0),
                  ValidationError);
  const CorrelationMatrix gamma = delta_gamma(2, 0, 1);
  CHECK_THROWS_AS(sample_counts(gamma, 0, LossVector::uniform(2, 1.0), 0.5, 0), ParameterError);
  CHECK_THROWS_AS(sample_counts(gamma, 10, LossVector::uniform(2, 1.5), 0.5, 0), ParameterError);
  CHECK_THROWS_AS(sample_counts(gamma, 10, LossVector::uniform(2, 1.0), 1.0, 0), ParameterError);
}

TEST_CASE("a single-cell record estimates to a point distribution") {
  CountRecord record;
  record.dim = 3;
  record.total_pairs_emitted = 100;
  record.pairs[{0, 1}] = 100;
  const CorrelationEstimate estimate = estimate_correlation(record, {});
  CHECK(estimate.gamma.values(0, 1) == doctest::Approx(1.0));
  CHECK(estimate.sigma(0, 1) == doctest::Approx(0.1));  // sqrt(100)/100

  CountRecord empty;
  empty.dim = 3;
  CHECK_THROWS_AS(estimate_correlation(empty, {}), ValidationError);
}

TEST_CASE("sample-then-estimate round trip converges on the true distribution") {
  const UnitaryMatrix u = testutil::disordered_nine_mode();
  const CorrelationMatrix gamma = quantum_correlation(u, {0, 8, 1.0});
  const CountRecord record =
      sample_counts(gamma, 10000000, LossVector::uniform(9, 1.0), 0.5, 21);
  EstimateOptions options;
  options.bunching_split = 0.5;
  const CorrelationEstimate estimate = estimate_correlation(record, options);
  CHECK(similarity(estimate.gamma, gamma) >= 0.999);
  CHECK(std::abs(estimate.gamma.triangle_sum() - 1.0) < 1e-12);
}

TEST_CASE("estimator similarity improves monotonically over count decades") {
  const UnitaryMatrix u = testutil::disordered_nine_mode();
  const CorrelationMatrix gamma = quantum_correlation(u, {0, 8, 1.0});
  const LossVector loss = LossVector::uniform(9, 1.0);
  EstimateOptions options;
  options.bunching_split = 0.5;

  std::vector<double> medians;
  for (const std::int64_t n_pairs : {1000LL, 10000LL, 100000LL, 1000000LL, 10000000LL}) {
    std::vector<double> values;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const CountRecord record = sample_counts(gamma, n_pairs, loss, 0.5, 1000 + seed);
      values.push_back(similarity(estimate_correlation(record, options).gamma, gamma));
    }
    medians.push_back(median(values));
  }
  for (std::size_t k = 1; k < medians.size(); ++k) CHECK(medians[k] > medians[k - 1]);
  CHECK(medians.back() >= 0.999);
}

TEST_CASE("loss correction brings the estimate closer to the truth") {
  const UnitaryMatrix u = testutil::disordered_nine_mode();
  const CorrelationMatrix gamma = quantum_correlation(u, {0, 8, 1.0});
  LossVector loss = LossVector::uniform(9, 1.0);
  loss.efficiencies(0) = 0.4;
  loss.efficiencies(3) = 0.6;

  int corrected_wins = 0;
  double corrected_total = 0.0, uncorrected_total = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CountRecord record = sample_counts(gamma, 200000, loss, 0.5, 3000 + seed);
    EstimateOptions plain;
    plain.bunching_split = 0.5;
    EstimateOptions with_loss = plain;
    with_loss.loss = loss;
    const double uncorrected = similarity(estimate_correlation(record, plain).gamma, gamma);
    const double corrected = similarity(estimate_correlation(record, with_loss).gamma, gamma);
    corrected_total += corrected;
    uncorrected_total += uncorrected;
    if (corrected > uncorrected) ++corrected_wins;
  }
  CHECK(corrected_wins >= 16);
  CHECK(corrected_total > uncorrected_total);
}

TEST_CASE("violation significance is zero where the witness vanishes") {
  CorrelationMatrix gamma;
  gamma.values = Eigen::MatrixXd::Zero(2, 2);
  gamma.values(0, 0) = gamma.values(1, 1) = 3.0 / 8.0;
  gamma.values(0, 1) = gamma.values(1, 0) = 1.0 / 4.0;  // exactly V = 0
  const Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(2, 2, 0.01);
  const ViolationSignificance sig = violation_significance(gamma, sigma);
  CHECK(sig.value(0, 1) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(sig.significance(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("balanced-coupler bunching is significant at ten thousand pairs") {
  CouplingMatrix c;
  c.entries = Eigen::MatrixXcd::Zero(2, 2);
  c.entries(0, 1) = c.entries(1, 0) = 1.0;
  const UnitaryMatrix u = evolve_unitary(c, std::numbers::pi / 4.0);
  const CorrelationMatrix gamma = quantum_correlation(u, {0, 1, 1.0});

  EstimateOptions options;
  options.bunching_split = 0.5;
  std::vector<double> significances;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const CountRecord record = sample_counts(gamma, 10000, LossVector::uniform(2, 1.0), 0.5,
                                             5000 + seed);
    const CorrelationEstimate estimate = estimate_correlation(record, options);
    const ViolationSignificance sig = violation_significance(estimate.gamma, estimate.sigma);
    significances.push_back(sig.significance(0, 1));
  }
  CHECK(median(significances) > 10.0);
}

TEST_CASE("significance grows like the square root of the pair count") {
  const UnitaryMatrix u = testutil::disordered_nine_mode();
  const CorrelationMatrix gamma = quantum_correlation(u, {0, 8, 1.0});
  EstimateOptions options;
  options.bunching_split = 0.5;

  auto median_max_significance = [&](std::int64_t n_pairs) {
    std::vector<double> maxima;
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
      const CountRecord record =
          sample_counts(gamma, n_pairs, LossVector::uniform(9, 1.0), 0.5, 7000 + seed);
      const CorrelationEstimate estimate = estimate_correlation(record, options);
      const ViolationSignificance sig = violation_significance(estimate.gamma, estimate.sigma);
      double best = 0.0;
      for (int i = 0; i < 9; ++i)
        for (int j = i + 1; j < 9; ++j) best = std::max(best, sig.significance(i, j));
      maxima.push_back(best);
    }
    return median(maxima);
  };

  const double at_1e4 = median_max_significance(10000);
  const double at_1e6 = median_max_significance(1000000);
  const double ratio = at_1e6 / at_1e4;
  CHECK(ratio > 8.0);
  CHECK(ratio < 12.0);
}

TEST_CASE("a true null cell rarely shows 3 sigma significance") {
  CorrelationMatrix gamma;
  gamma.values = Eigen::MatrixXd::Zero(2, 2);
  gamma.values(0, 0) = gamma.values(1, 1) = 3.0 / 8.0;
  gamma.values(0, 1) = gamma.values(1, 0) = 1.0 / 4.0;  // V = 0 exactly

  EstimateOptions options;
  options.bunching_split = 0.5;
  int exceedances = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const CountRecord record =
        sample_counts(gamma, 10000, LossVector::uniform(2, 1.0), 0.5, 90000 + seed);
    const CorrelationEstimate estimate = estimate_correlation(record, options);
    const ViolationSignificance sig = violation_significance(estimate.gamma, estimate.sigma);
    if (std::abs(sig.significance(0, 1)) > 3.0) ++exceedances;
  }
  CHECK(exceedances < 50);  // < 5% of 1000 seeds
}
