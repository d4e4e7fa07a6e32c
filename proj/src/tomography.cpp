#include "photonwalk/tomography.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <tuple>

#include "photonwalk/errors.hpp"
#include "photonwalk/least_squares.hpp"
#include "photonwalk/rng.hpp"

namespace photonwalk {

namespace {

constexpr double kZeroModulus = 1e-8;
constexpr double kTinyAmplitude = 1e-12;

double wrap_phase(double phi) {
  phi = std::fmod(phi, 2.0 * std::numbers::pi);
  if (phi <= -std::numbers::pi) phi += 2.0 * std::numbers::pi;
  if (phi > std::numbers::pi) phi -= 2.0 * std::numbers::pi;
  return phi;
}

std::pair<int, int> sorted_pair(std::pair<int, int> p) {
  if (p.first > p.second) std::swap(p.first, p.second);
  return p;
}

void check_output_range(std::pair<int, int> p, int n, const char* what) {
  if (p.first < 0 || p.first >= n || p.second < 0 || p.second >= n) {
    throw ParameterError(std::string(what) + " pair index out of range 1.." + std::to_string(n));
  }
}

// Wraps every entry of -phases; picks the lexicographically smaller of the
// two conjugate-equivalent phase matrices (row-major order).
Eigen::MatrixXd conjugation_canonical(Eigen::MatrixXd phases) {
  for (int k = 0; k < phases.rows(); ++k)
    for (int c = 0; c < phases.cols(); ++c) phases(k, c) = wrap_phase(phases(k, c));
  Eigen::MatrixXd negated = phases;
  for (int k = 0; k < phases.rows(); ++k)
    for (int c = 0; c < phases.cols(); ++c) negated(k, c) = wrap_phase(-phases(k, c));
  for (int k = 0; k < phases.rows(); ++k) {
    for (int c = 0; c < phases.cols(); ++c) {
      const double diff = phases(k, c) - negated(k, c);
      if (std::abs(diff) > 1e-9) return diff < 0.0 ? phases : negated;
    }
  }
  return phases;
}

// One visibility turned into a cosine constraint on the unknown phases:
// model = -amplitude * cos(sum_t sign_t * phi_t).
struct PhaseTerm {
  int unknown = -1;
  double sign = 1.0;
};

struct Constraint {
  std::vector<PhaseTerm> terms;
  double amplitude = 0.0;
  double target = 0.0;
  double weight = 1.0;
};

double constraint_model(const Constraint& c, const std::vector<double>& phi) {
  double delta = 0.0;
  for (const PhaseTerm& t : c.terms) delta += t.sign * phi[t.unknown];
  return -c.amplitude * std::cos(delta);
}

}  // namespace

VisibilityRecord simulate_visibility(const UnitaryMatrix& u, std::pair<int, int> input_pair,
                                     std::pair<int, int> output_pair) {
  const int n = u.dim();
  check_output_range(input_pair, n, "input");
  check_output_range(output_pair, n, "output");
  if (input_pair.first == input_pair.second) {
    throw ParameterError("visibility needs two distinct input modes");
  }
  if (output_pair.first == output_pair.second) {
    throw ParameterError("dip scans use distinct output pairs; bunched outputs are rejected");
  }
  const auto [i, j] = sorted_pair(input_pair);
  const auto [k, l] = sorted_pair(output_pair);

  const std::complex<double> direct = u.entries(k, i) * u.entries(l, j);
  const std::complex<double> exchanged = u.entries(k, j) * u.entries(l, i);
  const double a = std::abs(direct);
  const double b = std::abs(exchanged);
  VisibilityRecord record;
  record.input_pair = {i, j};
  record.output_pair = {k, l};
  const double denom = a * a + b * b;
  record.visibility =
      denom > 0.0 ? -2.0 * std::real(direct * std::conj(exchanged)) / denom : 0.0;
  return record;
}

std::vector<ScanSpec> plan_scans(const std::vector<int>& input_modes, int n_outputs,
                                 ScanPlanMode mode) {
  if (input_modes.size() < 2) throw ParameterError("a scan plan needs at least two input modes");
  std::vector<int> modes = input_modes;
  std::sort(modes.begin(), modes.end());
  if (std::adjacent_find(modes.begin(), modes.end()) != modes.end()) {
    throw ParameterError("input modes must be distinct");
  }
  if (modes.front() < 0 || modes.back() >= n_outputs) {
    throw ParameterError("input modes out of range");
  }

  std::vector<ScanSpec> plan;
  for (std::size_t a = 0; a < modes.size(); ++a) {
    for (std::size_t b = a + 1; b < modes.size(); ++b) {
      const std::pair<int, int> inputs{modes[a], modes[b]};
      switch (mode) {
        case ScanPlanMode::minimal:
          if (a == 0) {
            for (int l = 1; l < n_outputs; ++l) plan.push_back({inputs, {0, l}});
          } else {
            for (int l = 0; l + 1 < n_outputs; ++l) plan.push_back({inputs, {l, l + 1}});
          }
          break;
        case ScanPlanMode::star_path:
          for (int l = 1; l < n_outputs; ++l) plan.push_back({inputs, {0, l}});
          for (int l = 1; l + 1 < n_outputs; ++l) plan.push_back({inputs, {l, l + 1}});
          break;
        case ScanPlanMode::full:
          for (int k = 0; k < n_outputs; ++k)
            for (int l = k + 1; l < n_outputs; ++l) plan.push_back({inputs, {k, l}});
          break;
      }
    }
  }
  return plan;
}

Eigen::MatrixXcd SubmatrixEstimate::amplitudes() const {
  Eigen::MatrixXcd w(moduli.rows(), moduli.cols());
  for (int k = 0; k < moduli.rows(); ++k) {
    for (int c = 0; c < moduli.cols(); ++c) {
      w(k, c) = std::polar(moduli(k, c), phases(k, c));
    }
  }
  return w;
}

SubmatrixEstimate canonical_gauge(const Eigen::MatrixXcd& submatrix,
                                  const std::vector<int>& input_modes) {
  if (submatrix.cols() != static_cast<Eigen::Index>(input_modes.size()) ||
      submatrix.rows() == 0) {
    throw ParameterError("submatrix shape does not match the input mode list");
  }
  const int n = static_cast<int>(submatrix.rows());
  const int m = static_cast<int>(submatrix.cols());

  Eigen::MatrixXcd w = submatrix;
  for (int k = 0; k < n; ++k) {
    if (std::abs(w(k, 0)) >= kZeroModulus) {
      w.row(k) *= std::polar(1.0, -std::arg(w(k, 0)));
    }
  }
  for (int c = 0; c < m; ++c) {
    if (std::abs(w(0, c)) >= kZeroModulus) {
      w.col(c) *= std::polar(1.0, -std::arg(w(0, c)));
    }
  }

  SubmatrixEstimate estimate;
  estimate.input_modes = input_modes;
  estimate.moduli = w.cwiseAbs();
  estimate.phases = Eigen::MatrixXd::Zero(n, m);
  for (int k = 0; k < n; ++k) {
    for (int c = 0; c < m; ++c) {
      if (estimate.moduli(k, c) < kZeroModulus) {
        if (k > 0 && c > 0) estimate.unconstrained.emplace_back(k, input_modes[c]);
        continue;
      }
      if (k == 0 || c == 0) continue;  // gauge rows stay exactly zero
      estimate.phases(k, c) = wrap_phase(std::arg(w(k, c)));
    }
  }
  estimate.phases = conjugation_canonical(estimate.phases);
  return estimate;
}

SubmatrixEstimate reconstruct_submatrix(const std::vector<SinglesDistribution>& singles,
                                        const std::vector<VisibilityRecord>& visibilities,
                                        const ReconstructionOptions& options) {
  if (singles.empty()) throw ValidationError("reconstruction needs singles distributions");
  const int n = static_cast<int>(singles.front().probabilities.size());
  if (n == 0) throw ValidationError("singles distributions are empty");

  std::vector<SinglesDistribution> columns = singles;
  std::sort(columns.begin(), columns.end(),
            [](const SinglesDistribution& a, const SinglesDistribution& b) {
              return a.input_mode < b.input_mode;
            });
  std::vector<int> modes;
  for (const auto& s : columns) {
    if (static_cast<int>(s.probabilities.size()) != n) {
      throw ValidationError("singles distributions must share one mode count");
    }
    if (std::abs(s.probabilities.sum() - 1.0) > 1e-6) {
      throw ValidationError("singles distribution for input mode " +
                            std::to_string(s.input_mode + 1) + " is not normalized");
    }
    if (!modes.empty() && modes.back() == s.input_mode) {
      throw ValidationError("duplicate singles distribution for one input mode");
    }
    modes.push_back(s.input_mode);
  }
  const int m = static_cast<int>(modes.size());

  Eigen::MatrixXd moduli(n, m);
  for (int c = 0; c < m; ++c) {
    for (int k = 0; k < n; ++k) {
      moduli(k, c) = std::sqrt(std::max(columns[c].probabilities(k), 0.0));
    }
  }

  // Unknown phases: everything outside the gauge row/column whose modulus is
  // large enough to carry one.
  std::vector<std::pair<int, int>> flagged;
  Eigen::MatrixXi unknown_index = Eigen::MatrixXi::Constant(n, m, -1);
  std::vector<std::pair<int, int>> unknown_cells;
  for (int k = 1; k < n; ++k) {
    for (int c = 1; c < m; ++c) {
      if (moduli(k, c) < kZeroModulus) {
        flagged.emplace_back(k, modes[c]);
        continue;
      }
      unknown_index(k, c) = static_cast<int>(unknown_cells.size());
      unknown_cells.emplace_back(k, c);
    }
  }
  const int n_unknowns = static_cast<int>(unknown_cells.size());

  auto column_of_mode = [&](int mode) {
    const auto it = std::lower_bound(modes.begin(), modes.end(), mode);
    if (it == modes.end() || *it != mode) {
      throw ValidationError("visibility references input mode " + std::to_string(mode + 1) +
                            " with no singles distribution");
    }
    return static_cast<int>(it - modes.begin());
  };

  std::vector<Constraint> constraints;
  constraints.reserve(visibilities.size());
  for (const VisibilityRecord& record : visibilities) {
    const auto [i, j] = sorted_pair(record.input_pair);
    const auto [k, l] = sorted_pair(record.output_pair);
    if (i == j) throw ValidationError("visibility input modes must be distinct");
    if (k == l) throw ValidationError("visibility output modes must be distinct");
    if (k < 0 || l >= n) throw ValidationError("visibility output index out of range");
    if (std::abs(record.visibility) > 1.0 + 1e-6) {
      throw ValidationError("visibility magnitude exceeds 1");
    }
    const int ci = column_of_mode(i);
    const int cj = column_of_mode(j);

    const double a = moduli(k, ci) * moduli(l, cj);
    const double b = moduli(k, cj) * moduli(l, ci);
    Constraint constraint;
    constraint.target = std::clamp(record.visibility, -1.0, 1.0);
    constraint.weight = record.uncertainty > 0.0 ? 1.0 / record.uncertainty : 1.0;
    const double denom = a * a + b * b;
    constraint.amplitude = denom > kTinyAmplitude ? 2.0 * a * b / denom : 0.0;
    if (constraint.amplitude > kTinyAmplitude) {
      const std::array<std::tuple<int, int, double>, 4> raw{
          std::tuple<int, int, double>{k, ci, 1.0},
          {l, cj, 1.0},
          {k, cj, -1.0},
          {l, ci, -1.0}};
      for (const auto& [row, col, sign] : raw) {
        const int id = unknown_index(row, col);
        if (id >= 0) constraint.terms.push_back({id, sign});
      }
    }
    constraints.push_back(std::move(constraint));
  }

  // Local identifiability: the signed-coefficient matrix over the unknowns
  // must have full column rank, otherwise some phases can drift freely.
  if (n_unknowns > 0) {
    std::vector<const Constraint*> informative;
    for (const Constraint& c : constraints)
      if (!c.terms.empty()) informative.push_back(&c);
    auto report_unconstrained = [&](const std::vector<int>& ids) {
      std::string msg = "underdetermined phase retrieval; unconstrained phases:";
      for (int id : ids) {
        msg += " (output " + std::to_string(unknown_cells[id].first + 1) + ", input " +
               std::to_string(modes[unknown_cells[id].second] + 1) + ")";
      }
      throw ValidationError(msg);
    };
    if (informative.empty()) {
      std::vector<int> all(n_unknowns);
      for (int u = 0; u < n_unknowns; ++u) all[u] = u;
      report_unconstrained(all);
    }
    Eigen::MatrixXd coeff = Eigen::MatrixXd::Zero(static_cast<int>(informative.size()),
                                                  n_unknowns);
    for (std::size_t r = 0; r < informative.size(); ++r) {
      for (const PhaseTerm& t : informative[r]->terms) {
        coeff(static_cast<int>(r), t.unknown) += t.sign;
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(coeff);
    lu.setThreshold(1e-9);
    if (lu.rank() < n_unknowns) {
      const Eigen::MatrixXd kernel = lu.kernel();
      std::vector<int> loose;
      for (int u = 0; u < n_unknowns; ++u) {
        if (kernel.row(u).cwiseAbs().maxCoeff() > 1e-6) loose.push_back(u);
      }
      if (loose.empty()) loose.push_back(0);
      report_unconstrained(loose);
    }
  }

  // Branch-enumerated seeds: walk the constraints by decreasing interference
  // amplitude; each constraint with one still-free phase splits the beam on
  // the two acos branches of its target.
  std::vector<std::vector<double>> seeds;
  seeds.emplace_back(n_unknowns, 0.0);
  if (n_unknowns > 0) {
    std::vector<char> assigned(n_unknowns, 0);
    std::vector<char> used(constraints.size(), 0);
    struct BeamEntry {
      std::vector<double> phi;
      double score = 0.0;
    };
    std::vector<BeamEntry> beam{BeamEntry{std::vector<double>(n_unknowns, 0.0), 0.0}};

    auto free_count_of = [&](const Constraint& c) {
      int free_count = 0;
      for (const PhaseTerm& t : c.terms)
        if (!assigned[t.unknown]) ++free_count;
      return free_count;
    };

    auto rescore = [&](BeamEntry& entry) {
      entry.score = 0.0;
      for (const Constraint& c : constraints) {
        if (c.terms.empty()) continue;
        bool ready = true;
        for (const PhaseTerm& t : c.terms) {
          if (!assigned[t.unknown]) {
            ready = false;
            break;
          }
        }
        if (!ready) continue;
        const double r = c.weight * (constraint_model(c, entry.phi) - c.target);
        entry.score += r * r;
      }
    };

    while (true) {
      // Branch next on the single-free-unknown constraint whose assignment
      // completes the most other constraints: the beam gets scoring feedback
      // as soon as possible, before pruning can discard the true branch.
      int pick = -1;
      int pick_unlocked = -1;
      double pick_amplitude = -1.0;
      for (std::size_t idx = 0; idx < constraints.size(); ++idx) {
        const Constraint& c = constraints[idx];
        if (used[idx] || c.terms.empty() || free_count_of(c) != 1) continue;
        int u = -1;
        for (const PhaseTerm& t : c.terms)
          if (!assigned[t.unknown]) u = t.unknown;
        int unlocked = 0;
        for (std::size_t other = 0; other < constraints.size(); ++other) {
          if (other == idx || used[other] || constraints[other].terms.empty()) continue;
          bool completes = true;
          bool touches = false;
          for (const PhaseTerm& t : constraints[other].terms) {
            if (t.unknown == u) touches = true;
            if (!assigned[t.unknown] && t.unknown != u) completes = false;
          }
          if (touches && completes) ++unlocked;
        }
        if (unlocked > pick_unlocked ||
            (unlocked == pick_unlocked && c.amplitude > pick_amplitude)) {
          pick = static_cast<int>(idx);
          pick_unlocked = unlocked;
          pick_amplitude = c.amplitude;
        }
      }
      if (pick < 0) break;

      const Constraint& c = constraints[pick];
      int free_term = -1;
      for (std::size_t t = 0; t < c.terms.size(); ++t) {
        if (!assigned[c.terms[t].unknown]) free_term = static_cast<int>(t);
      }
      const double x = std::clamp(-c.target / c.amplitude, -1.0, 1.0);
      const double delta = std::acos(x);
      const int u = c.terms[free_term].unknown;
      const double su = c.terms[free_term].sign;

      std::vector<BeamEntry> next;
      next.reserve(beam.size() * 2);
      for (const BeamEntry& entry : beam) {
        double rest = 0.0;
        for (std::size_t t = 0; t < c.terms.size(); ++t) {
          if (static_cast<int>(t) == free_term) continue;
          rest += c.terms[t].sign * entry.phi[c.terms[t].unknown];
        }
        for (const double branch : {delta, -delta}) {
          BeamEntry child = entry;
          child.phi[u] = wrap_phase(su * (branch - rest));
          next.push_back(std::move(child));
        }
      }
      assigned[u] = 1;
      used[pick] = 1;
      for (BeamEntry& entry : next) rescore(entry);
      std::stable_sort(next.begin(), next.end(), [](const BeamEntry& a, const BeamEntry& b) {
        if (a.score != b.score) return a.score < b.score;
        return a.phi < b.phi;
      });
      if (static_cast<int>(next.size()) > options.beam_width) {
        next.resize(options.beam_width);
      }
      beam = std::move(next);
    }
    const int keep = std::min<int>(options.branch_seeds, static_cast<int>(beam.size()));
    for (int s = 0; s < keep; ++s) seeds.push_back(beam[s].phi);
  }
  for (int r = 0; r < options.random_restarts && n_unknowns > 0; ++r) {
    SplitMix64 g(derive_seed(options.seed, static_cast<std::uint64_t>(r)));
    std::vector<double> phi(n_unknowns);
    for (double& p : phi) p = g.next_double(-std::numbers::pi, std::numbers::pi);
    seeds.push_back(std::move(phi));
  }

  const ResidualFn eval = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r,
                              Eigen::MatrixXd* jac) {
    r.resize(static_cast<Eigen::Index>(constraints.size()));
    if (jac) jac->setZero(static_cast<Eigen::Index>(constraints.size()), n_unknowns);
    for (std::size_t idx = 0; idx < constraints.size(); ++idx) {
      const Constraint& c = constraints[idx];
      double delta = 0.0;
      for (const PhaseTerm& t : c.terms) delta += t.sign * p(t.unknown);
      r(static_cast<Eigen::Index>(idx)) = c.weight * (-c.amplitude * std::cos(delta) - c.target);
      if (jac) {
        for (const PhaseTerm& t : c.terms) {
          (*jac)(static_cast<Eigen::Index>(idx), t.unknown) +=
              c.weight * c.amplitude * std::sin(delta) * t.sign;
        }
      }
    }
  };

  Eigen::VectorXd best_phi = Eigen::VectorXd::Zero(n_unknowns);
  double best_weighted = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd best_phases;
  auto phases_of = [&](const Eigen::VectorXd& phi) {
    Eigen::MatrixXd phases = Eigen::MatrixXd::Zero(n, m);
    for (int u = 0; u < n_unknowns; ++u) {
      phases(unknown_cells[u].first, unknown_cells[u].second) = wrap_phase(phi(u));
    }
    return conjugation_canonical(phases);
  };
  auto lex_less = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    for (int k = 0; k < a.rows(); ++k) {
      for (int c = 0; c < a.cols(); ++c) {
        const double diff = a(k, c) - b(k, c);
        if (std::abs(diff) > 1e-9) return diff < 0.0;
      }
    }
    return false;
  };

  for (const std::vector<double>& seed : seeds) {
    Eigen::VectorXd initial = Eigen::Map<const Eigen::VectorXd>(
        seed.data(), static_cast<Eigen::Index>(seed.size()));
    LeastSquaresResult fit{initial, 0.0, 0, true};
    if (n_unknowns > 0) {
      fit = levenberg_marquardt(eval, std::move(initial), 300);
    } else {
      Eigen::VectorXd r;
      eval(fit.parameters, r, nullptr);
      fit.residual = r.squaredNorm();
    }
    // Strictly lower residual wins; exact ties (the conjugate pair, or two
    // branch seeds hitting the same optimum) fall to the lexicographic rule.
    const Eigen::MatrixXd candidate_phases = phases_of(fit.parameters);
    if (fit.residual < best_weighted ||
        (fit.residual == best_weighted && best_phases.size() > 0 &&
         lex_less(candidate_phases, best_phases))) {
      best_weighted = fit.residual;
      best_phi = fit.parameters;
      best_phases = candidate_phases;
    }
  }

  SubmatrixEstimate estimate;
  estimate.input_modes = modes;
  estimate.moduli = moduli;
  estimate.phases = best_phases.size() > 0 ? best_phases : Eigen::MatrixXd::Zero(n, m);
  estimate.unconstrained = flagged;

  // Report the unweighted misfit of the returned matrix against the data.
  double residual = 0.0;
  {
    std::vector<double> phi(n_unknowns);
    for (int u = 0; u < n_unknowns; ++u) {
      phi[u] = estimate.phases(unknown_cells[u].first, unknown_cells[u].second);
    }
    for (const Constraint& c : constraints) {
      const double r = constraint_model(c, phi) - c.target;
      residual += r * r;
    }
  }
  estimate.residual = residual;

  // Consistency: with stated uncertainties the weighted misfit is a chi
  // square with about one dof per scan; without them fall back to an rms
  // threshold in visibility units.
  if (constraints.empty()) {
    estimate.consistent = true;
  } else if (std::all_of(visibilities.begin(), visibilities.end(),
                         [](const VisibilityRecord& record) { return record.uncertainty > 0.0; })) {
    const double m = static_cast<double>(constraints.size());
    estimate.consistent = best_weighted <= m + 5.0 * std::sqrt(2.0 * m);
  } else {
    estimate.consistent =
        std::sqrt(residual / static_cast<double>(constraints.size())) <=
        options.inconsistency_rms;
  }
  return estimate;
}

CorrelationMatrix predict_correlation(const SubmatrixEstimate& estimate, const PairInput& pair) {
  auto find_column = [&](int mode) {
    const auto it =
        std::find(estimate.input_modes.begin(), estimate.input_modes.end(), mode);
    if (it == estimate.input_modes.end()) {
      throw ParameterError("input mode " + std::to_string(mode + 1) +
                           " is not covered by the estimate");
    }
    return static_cast<int>(it - estimate.input_modes.begin());
  };
  if (pair.mode_i == pair.mode_j) throw ParameterError("two-photon input modes must be distinct");
  const int ci = find_column(pair.mode_i);
  const int cj = find_column(pair.mode_j);
  const Eigen::MatrixXcd w = estimate.amplitudes();
  CorrelationMatrix gamma =
      pair_correlation_from_columns(w.col(ci), w.col(cj), pair.indistinguishability);
  const double sum = gamma.triangle_sum();
  if (sum <= 0.0) throw NumericalError("predicted correlation has no probability mass");
  gamma.values /= sum;
  return gamma;
}

DipFit fit_hom_dip(const std::vector<DipSample>& curve) {
  if (curve.size() < 4) throw ParameterError("dip fit needs at least four samples");

  double vmin = curve.front().coincidence, vmax = curve.front().coincidence;
  double dmin = curve.front().delay, dmax = curve.front().delay;
  double argmin = curve.front().delay, argmax = curve.front().delay;
  for (const DipSample& s : curve) {
    if (s.coincidence < vmin) {
      vmin = s.coincidence;
      argmin = s.delay;
    }
    if (s.coincidence > vmax) {
      vmax = s.coincidence;
      argmax = s.delay;
    }
    dmin = std::min(dmin, s.delay);
    dmax = std::max(dmax, s.delay);
  }
  if (dmax <= dmin) throw ParameterError("dip fit needs a spread of delays");

  // A coincidence peak (quantum above classical) is a dip of negative depth;
  // seed the fit from whichever extremum stands out from the scan edges.
  const double edge = 0.5 * (curve.front().coincidence + curve.back().coincidence);
  const bool peaked = (vmax - edge) > (edge - vmin);
  const double depth_guess = peaked ? -(vmax - edge) : (edge - vmin);
  const double center_guess = peaked ? argmax : argmin;

  const ResidualFn eval = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r,
                              Eigen::MatrixXd* jac) {
    const double floor = p(0), depth = p(1), center = p(2);
    const double width = std::copysign(std::max(std::abs(p(3)), 1e-9), p(3) == 0.0 ? 1.0 : p(3));
    r.resize(static_cast<Eigen::Index>(curve.size()));
    if (jac) jac->setZero(static_cast<Eigen::Index>(curve.size()), 4);
    for (std::size_t s = 0; s < curve.size(); ++s) {
      const double q = (curve[s].delay - center) / width;
      const double e = std::exp(-q * q);
      r(static_cast<Eigen::Index>(s)) = floor - depth * e - curve[s].coincidence;
      if (jac) {
        (*jac)(static_cast<Eigen::Index>(s), 0) = 1.0;
        (*jac)(static_cast<Eigen::Index>(s), 1) = -e;
        (*jac)(static_cast<Eigen::Index>(s), 2) = -depth * e * 2.0 * q / width;
        (*jac)(static_cast<Eigen::Index>(s), 3) = -depth * e * 2.0 * q * q / width;
      }
    }
  };

  Eigen::VectorXd initial(4);
  initial << edge, depth_guess, center_guess, std::max((dmax - dmin) / 4.0, 1e-6);
  const LeastSquaresResult fit = levenberg_marquardt(eval, initial, 400);

  DipFit result;
  result.floor = fit.parameters(0);
  result.depth = fit.parameters(1);
  result.center = fit.parameters(2);
  result.width = std::abs(fit.parameters(3));
  result.visibility = result.floor != 0.0 ? result.depth / result.floor : 0.0;
  result.residual = fit.residual;
  return result;
}

}  // namespace photonwalk
