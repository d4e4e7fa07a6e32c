#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "photonwalk/errors.hpp"
#include "photonwalk/evolution.hpp"
#include "photonwalk/metrics.hpp"
#include "photonwalk/tomography.hpp"
#include "test_util.hpp"

using namespace photonwalk;

namespace {

UnitaryMatrix balanced_coupler() {
  CouplingMatrix c;
  c.entries = Eigen::MatrixXcd::Zero(2, 2);
  c.entries(0, 1) = 1.0;
  c.entries(1, 0) = 1.0;
  return evolve_unitary(c, std::numbers::pi / 4.0);
}

std::vector<SinglesDistribution> singles_for(const UnitaryMatrix& u,
                                             const std::vector<int>& modes) {
  std::vector<SinglesDistribution> singles;
  for (int mode : modes) singles.push_back(singles_distribution(u, mode));
  return singles;
}

std::vector<VisibilityRecord> visibilities_for(const UnitaryMatrix& u,
                                               const std::vector<ScanSpec>& plan) {
  std::vector<VisibilityRecord> records;
  for (const ScanSpec& scan : plan) {
    records.push_back(simulate_visibility(u, scan.input_pair, scan.output_pair));
  }
  return records;
}

double circular_distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), 2.0 * std::numbers::pi);
  return std::min(d, 2.0 * std::numbers::pi - d);
}

}  // namespace

TEST_CASE("visibility formula on the canonical circuits") {
  CHECK(simulate_visibility(balanced_coupler(), {0, 1}, {0, 1}).visibility ==
        doctest::Approx(1.0).epsilon(1e-12));

  UnitaryMatrix identity;
  identity.entries = Eigen::MatrixXcd::Identity(3, 3);
  CHECK(simulate_visibility(identity, {0, 1}, {0, 1}).visibility == 0.0);

  CHECK_THROWS_AS(simulate_visibility(balanced_coupler(), {0, 1}, {1, 1}), ParameterError);
  CHECK_THROWS_AS(simulate_visibility(balanced_coupler(), {0, 0}, {0, 1}), ParameterError);
}

TEST_CASE("visibility equals the relative dip of the correlation functions") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const UnitaryMatrix u = testutil::haar_unitary(6, 600 + seed);
    const PairInput pair{1, 4, 1.0};
    const CorrelationMatrix quantum = quantum_correlation(u, pair);
    const CorrelationMatrix classical = classical_correlation(u, pair);
    for (int k = 0; k < 6; ++k) {
      for (int l = k + 1; l < 6; ++l) {
        const double c = classical.values(k, l);
        if (c < 1e-12) continue;
        const double expected = (c - quantum.values(k, l)) / c;
        CHECK(simulate_visibility(u, {1, 4}, {k, l}).visibility ==
              doctest::Approx(expected).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("visibility is invariant under swapping inputs or outputs") {
  const UnitaryMatrix u = testutil::haar_unitary(5, 99);
  const double reference = simulate_visibility(u, {0, 3}, {1, 4}).visibility;
  CHECK(simulate_visibility(u, {3, 0}, {1, 4}).visibility == reference);
  CHECK(simulate_visibility(u, {0, 3}, {4, 1}).visibility == reference);
}

TEST_CASE("scan plans have the advertised sizes") {
  const auto preset = plan_scans({0, 7, 8}, 9, ScanPlanMode::minimal);
  CHECK(preset.size() == 24);
  int per_first_pair = 0;
  for (const ScanSpec& scan : preset) {
    if (scan.input_pair == std::make_pair(0, 7)) ++per_first_pair;
  }
  CHECK(per_first_pair == 8);

  CHECK(plan_scans({0, 1}, 2, ScanPlanMode::minimal).size() == 1);
  CHECK(plan_scans({0, 1}, 2, ScanPlanMode::full).size() == 1);
  CHECK(plan_scans({0, 7, 8}, 9, ScanPlanMode::full).size() == 108);
  CHECK(plan_scans({0, 7, 8}, 9, ScanPlanMode::star_path).size() == 45);
  CHECK_THROWS_AS(plan_scans({3}, 9, ScanPlanMode::full), ParameterError);
  CHECK_THROWS_AS(plan_scans({3, 3}, 9, ScanPlanMode::full), ParameterError);
}

TEST_CASE("noiseless reconstruction recovers a Haar submatrix up to gauge") {
  const std::vector<int> modes{0, 7, 8};
  const UnitaryMatrix u = testutil::haar_unitary(9, 424242);
  const auto plan = plan_scans(modes, 9, ScanPlanMode::full);
  const SubmatrixEstimate estimate =
      reconstruct_submatrix(singles_for(u, modes), visibilities_for(u, plan));

  Eigen::MatrixXcd truth(9, 3);
  for (int c = 0; c < 3; ++c) truth.col(c) = u.entries.col(modes[c]);
  const SubmatrixEstimate reference = canonical_gauge(truth, modes);

  CHECK(estimate.residual < 1e-15);
  CHECK(estimate.consistent);
  CHECK((estimate.moduli - reference.moduli).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((estimate.amplitudes() - reference.amplitudes()).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("the sparse preset plan is enough for noiseless recovery") {
  const std::vector<int> modes{0, 7, 8};
  const UnitaryMatrix u = testutil::haar_unitary(9, 31337);
  const auto plan = plan_scans(modes, 9, ScanPlanMode::minimal);
  const SubmatrixEstimate estimate =
      reconstruct_submatrix(singles_for(u, modes), visibilities_for(u, plan));

  Eigen::MatrixXcd truth(9, 3);
  for (int c = 0; c < 3; ++c) truth.col(c) = u.entries.col(modes[c]);
  const SubmatrixEstimate reference = canonical_gauge(truth, modes);
  CHECK(estimate.residual < 1e-15);
  CHECK((estimate.amplitudes() - reference.amplitudes()).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("balanced coupler phases come out as the 0 / pi pattern") {
  const UnitaryMatrix u = balanced_coupler();
  const std::vector<int> modes{0, 1};
  const auto plan = plan_scans(modes, 2, ScanPlanMode::minimal);
  const SubmatrixEstimate estimate =
      reconstruct_submatrix(singles_for(u, modes), visibilities_for(u, plan));
  CHECK(estimate.moduli(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(estimate.phases(0, 0) == 0.0);
  CHECK(estimate.phases(1, 0) == 0.0);
  CHECK(estimate.phases(0, 1) == 0.0);
  CHECK(circular_distance(estimate.phases(1, 1), std::numbers::pi) < 1e-9);
}

TEST_CASE("different solver seeds agree after gauge fixing") {
  const std::vector<int> modes{0, 4, 6};
  const UnitaryMatrix u = testutil::haar_unitary(7, 555);
  const auto singles = singles_for(u, modes);
  const auto vis = visibilities_for(u, plan_scans(modes, 7, ScanPlanMode::star_path));
  ReconstructionOptions a, b;
  a.seed = 1;
  b.seed = 987654321;
  const SubmatrixEstimate first = reconstruct_submatrix(singles, vis, a);
  const SubmatrixEstimate second = reconstruct_submatrix(singles, vis, b);
  CHECK((first.amplitudes() - second.amplitudes()).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("reconstructed moduli columns stay normalized") {
  const std::vector<int> modes{0, 7, 8};
  const UnitaryMatrix u = testutil::haar_unitary(9, 2024);
  const SubmatrixEstimate estimate = reconstruct_submatrix(
      singles_for(u, modes), visibilities_for(u, plan_scans(modes, 9, ScanPlanMode::minimal)));
  for (int c = 0; c < 3; ++c) {
    CHECK(estimate.moduli.col(c).squaredNorm() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("noisy visibilities still predict the correlation well") {
  const std::vector<int> modes{0, 7, 8};
  const UnitaryMatrix u = testutil::haar_unitary(9, 888);
  const auto plan = plan_scans(modes, 9, ScanPlanMode::star_path);
  const PairInput pair{0, 8, 1.0};
  const CorrelationMatrix truth = quantum_correlation(u, pair);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto vis = visibilities_for(u, plan);
    SplitMix64 g(10101 + seed);
    for (VisibilityRecord& record : vis) {
      record.visibility = std::clamp(record.visibility + 0.01 * g.next_normal(), -1.0, 1.0);
      record.uncertainty = 0.01;
    }
    const SubmatrixEstimate estimate = reconstruct_submatrix(singles_for(u, modes), vis);
    const CorrelationMatrix predicted = predict_correlation(estimate, pair);
    CHECK(similarity(predicted, truth) >= 0.99);
  }
}

TEST_CASE("a missing input pair leaves phases unconstrained and is reported") {
  const std::vector<int> modes{0, 7, 8};
  const UnitaryMatrix u = testutil::haar_unitary(9, 777);
  // Scans only between modes 0 and 7: column 8 phases stay free.
  std::vector<VisibilityRecord> vis;
  for (int l = 1; l < 9; ++l) vis.push_back(simulate_visibility(u, {0, 7}, {0, l}));
  try {
    reconstruct_submatrix(singles_for(u, modes), vis);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string message = e.what();
    CHECK(message.find("unconstrained") != std::string::npos);
    CHECK(message.find("input 9") != std::string::npos);
  }
}

TEST_CASE("an inconsistent data set is flagged, not silently accepted") {
  const std::vector<int> modes{0, 4, 6};
  const UnitaryMatrix u = testutil::haar_unitary(7, 1234);
  auto vis = visibilities_for(u, plan_scans(modes, 7, ScanPlanMode::star_path));
  SplitMix64 g(5);
  for (VisibilityRecord& record : vis) {
    record.visibility = std::clamp(record.visibility + 0.4 * g.next_normal(), -1.0, 1.0);
  }
  const SubmatrixEstimate estimate = reconstruct_submatrix(singles_for(u, modes), vis);
  CHECK_FALSE(estimate.consistent);
}

TEST_CASE("prediction from the exact submatrix matches the correlation module") {
  const std::vector<int> modes{0, 3, 5};
  const UnitaryMatrix u = testutil::haar_unitary(6, 6);
  Eigen::MatrixXcd truth(6, 3);
  for (int c = 0; c < 3; ++c) truth.col(c) = u.entries.col(modes[c]);
  const SubmatrixEstimate exact = canonical_gauge(truth, modes);

  for (const double mu : {0.0, 0.5, 1.0}) {
    const PairInput pair{0, 5, mu};
    const CorrelationMatrix predicted = predict_correlation(exact, pair);
    const CorrelationMatrix direct = partial_correlation(u, pair);
    CHECK((predicted.values - direct.values).cwiseAbs().maxCoeff() < 1e-9);
  }
  CHECK_THROWS_AS(predict_correlation(exact, PairInput{0, 1, 1.0}), ParameterError);
}

TEST_CASE("a deliberately wrong phase degrades the prediction") {
  const std::vector<int> modes{0, 7, 8};
  const UnitaryMatrix u = testutil::haar_unitary(9, 11);
  Eigen::MatrixXcd truth(9, 3);
  for (int c = 0; c < 3; ++c) truth.col(c) = u.entries.col(modes[c]);
  const SubmatrixEstimate exact = canonical_gauge(truth, modes);
  const PairInput pair{0, 8, 1.0};
  const CorrelationMatrix reference = partial_correlation(u, pair);
  const double baseline = similarity(predict_correlation(exact, pair), reference);

  SubmatrixEstimate corrupted = exact;
  corrupted.phases(4, 2) += std::numbers::pi;
  const double degraded = similarity(predict_correlation(corrupted, pair), reference);
  CHECK(baseline > degraded);
  CHECK(baseline == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("gaussian dip fit recovers floor, width and visibility") {
  const UnitaryMatrix u = balanced_coupler();
  const PairInput pair{0, 1, 0.9};
  std::vector<double> delays;
  for (int s = -20; s <= 20; ++s) delays.push_back(0.2 * s);
  const auto curve = hom_dip_curve(u, pair, {0, 1}, delays, 1.3);
  const DipFit fit = fit_hom_dip(curve);
  CHECK(fit.floor == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(fit.visibility == doctest::Approx(0.9).epsilon(1e-6));
  CHECK(fit.center == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(fit.width == doctest::Approx(1.3).epsilon(1e-6));
  CHECK_THROWS_AS(fit_hom_dip({{0.0, 1.0}, {1.0, 2.0}}), ParameterError);
}

TEST_CASE("dip fits reproduce the visibility formula on random circuits") {
  const UnitaryMatrix u = testutil::haar_unitary(5, 5150);
  const PairInput pair{0, 4, 1.0};
  std::vector<double> delays;
  for (int s = -25; s <= 25; ++s) delays.push_back(0.3 * s);
  for (int k = 0; k < 5; ++k) {
    for (int l = k + 1; l < 5; ++l) {
      const auto curve = hom_dip_curve(u, pair, {k, l}, delays, 1.0);
      if (classical_correlation(u, pair).values(k, l) < 1e-6) continue;
      const DipFit fit = fit_hom_dip(curve);
      const double expected = simulate_visibility(u, {0, 4}, {k, l}).visibility;
      CHECK(fit.visibility == doctest::Approx(expected).epsilon(1e-5));
    }
  }
}
