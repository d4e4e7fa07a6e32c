#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "photonwalk/evolution.hpp"

namespace photonwalk {

// |U_{k,input}|^2 over the output modes k; sums to one for unitary U.
struct SinglesDistribution {
  int input_mode = 0;
  Eigen::VectorXd probabilities;
};

// Two photons injected into distinct modes. `indistinguishability` is the
// scalar wavepacket overlap mu: 1 = identical photons, 0 = fully
// distinguishable.
struct PairInput {
  int mode_i = 0;
  int mode_j = 0;
  double indistinguishability = 1.0;
};

// Unordered two-photon output distribution Gamma. Stored dense and symmetric;
// the probability of the unordered outcome {i, j} is values(i, j), so the
// i <= j triangle sums to one.
struct CorrelationMatrix {
  Eigen::MatrixXd values;

  int dim() const { return static_cast<int>(values.rows()); }
  double triangle_sum() const;
  // Symmetric, non-negative, triangle normalized within `norm_tol`.
  void validate(double norm_tol = 1e-9) const;
};

SinglesDistribution singles_distribution(const UnitaryMatrix& u, int input_mode);

// Gamma_{kl} = |U_ki U_lj + U_kj U_li|^2 / (1 + delta_kl): two-photon
// interference of indistinguishable photons. The delta factor removes the
// sqrt(2) bunching normalization so the unordered distribution sums to one.
CorrelationMatrix quantum_correlation(const UnitaryMatrix& u, const PairInput& pair);

// Gamma'_{kl} = (|U_ki U_lj|^2 + |U_kj U_li|^2) / (1 + delta_kl): the same
// detection statistics for fully distinguishable photons.
CorrelationMatrix classical_correlation(const UnitaryMatrix& u, const PairInput& pair);

// Linear interpolation between the two: Gamma(mu) = Gamma' + mu * Delta with
// Delta the interference cross term, so mu = 1 gives quantum_correlation and
// mu = 0 gives classical_correlation.
CorrelationMatrix partial_correlation(const UnitaryMatrix& u, const PairInput& pair);

// Same computation from two explicit mode-amplitude columns. This is what
// reconstruction-based predictions use, where only a column submatrix of U
// is available.
CorrelationMatrix pair_correlation_from_columns(const Eigen::VectorXcd& column_i,
                                                const Eigen::VectorXcd& column_j, double mu);

struct DipSample {
  double delay = 0.0;
  double coincidence = 0.0;
};

// Coincidence probability at `output_pair` versus temporal delay. The overlap
// decays as mu(tau) = mu0 * exp(-(tau / coherence_time)^2), so the curve is
// symmetric in tau and approaches the distinguishable floor as |tau| grows.
std::vector<DipSample> hom_dip_curve(const UnitaryMatrix& u, const PairInput& pair,
                                     std::pair<int, int> output_pair,
                                     const std::vector<double>& delays, double coherence_time);

}  // namespace photonwalk
