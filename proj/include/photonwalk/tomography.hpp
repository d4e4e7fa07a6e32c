#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "photonwalk/correlation.hpp"

namespace photonwalk {

// One HOM-dip scan: photons into input_pair, coincidences watched at
// output_pair, dip visibility (classical - quantum) / classical.
struct VisibilityRecord {
  std::pair<int, int> input_pair;
  std::pair<int, int> output_pair;
  double visibility = 0.0;
  double uncertainty = 0.0;  // one sigma; 0 means unweighted
};

// Visibility of the dip at output pair (k, l), k != l, for inputs (i, j):
// with A = |U_ki||U_lj|, B = |U_kj||U_li| and
// Delta = arg U_ki + arg U_lj - arg U_kj - arg U_li,
//   visibility = -2 A B cos(Delta) / (A^2 + B^2),
// defined as 0 when both interfering paths vanish.
VisibilityRecord simulate_visibility(const UnitaryMatrix& u, std::pair<int, int> input_pair,
                                     std::pair<int, int> output_pair);

enum class ScanPlanMode {
  // Sparse preset: output star (0, l) for input pairs containing the first
  // input mode, output path (l, l+1) for the remaining pairs. 24 scans for
  // 3 input modes on 9 outputs.
  minimal,
  // Star plus spanning path per input pair; every unknown phase appears in
  // at least two constraints.
  star_path,
  // Every output pair per input pair.
  full,
};

struct ScanSpec {
  std::pair<int, int> input_pair;
  std::pair<int, int> output_pair;
};

std::vector<ScanSpec> plan_scans(const std::vector<int>& input_modes, int n_outputs,
                                 ScanPlanMode mode);

// Column submatrix of the evolution operator restricted to the injected
// modes. Gauge convention: the phases of the first row and of the first
// column are zero; among the two conjugate-equivalent solutions the
// lexicographically smaller phase vector is returned.
struct SubmatrixEstimate {
  std::vector<int> input_modes;  // ascending; column c holds mode input_modes[c]
  Eigen::MatrixXd moduli;        // N x M, non-negative
  Eigen::MatrixXd phases;        // N x M, wrapped to (-pi, pi]
  double residual = 0.0;         // unweighted sum of squared visibility misfits
  bool consistent = true;        // false when the misfit RMS exceeds the flag threshold
  std::vector<std::pair<int, int>> unconstrained;  // (output row, input mode) phases fixed to 0

  Eigen::MatrixXcd amplitudes() const;  // moduli .* exp(i phases)
};

struct ReconstructionOptions {
  int random_restarts = 32;
  int branch_seeds = 16;  // polished branch-enumeration seeds
  int beam_width = 64;    // beam kept while enumerating cosine branches
  std::uint64_t seed = 0x5EEDF00DULL;
  double inconsistency_rms = 0.05;  // visibility units
};

// Moduli from the singles distributions (one per input mode), phases by
// multi-start nonlinear least squares on the visibility model: branch
// -enumerated seeds over the cosine sign choices on a spanning set of
// constraints plus random restarts, each polished by Levenberg-Marquardt.
// Throws ValidationError when the constraint graph leaves phases
// undetermined, naming them.
SubmatrixEstimate reconstruct_submatrix(const std::vector<SinglesDistribution>& singles,
                                        const std::vector<VisibilityRecord>& visibilities,
                                        const ReconstructionOptions& options = {});

// Two-photon correlation predicted by a reconstructed submatrix for a pair
// injected into two of its columns; renormalized over unordered pairs.
CorrelationMatrix predict_correlation(const SubmatrixEstimate& estimate, const PairInput& pair);

// Gauge-fixes an explicit column submatrix into the estimate convention
// (unit-phase first row and first column, conjugation branch chosen
// lexicographically). Used to compare reconstructions against known truth.
SubmatrixEstimate canonical_gauge(const Eigen::MatrixXcd& submatrix,
                                  const std::vector<int>& input_modes);

// Least-squares Gaussian dip fit f(tau) = floor - depth * exp(-((tau - center)/width)^2)
// for extracting a scalar visibility from a sampled delay scan.
struct DipFit {
  double floor = 0.0;
  double depth = 0.0;
  double center = 0.0;
  double width = 0.0;
  double visibility = 0.0;  // depth / floor
  double residual = 0.0;
};

DipFit fit_hom_dip(const std::vector<DipSample>& curve);

}  // namespace photonwalk
