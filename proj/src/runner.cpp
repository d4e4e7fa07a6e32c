#include "photonwalk/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "photonwalk/counting.hpp"
#include "photonwalk/errors.hpp"
#include "photonwalk/evolution.hpp"
#include "photonwalk/io.hpp"
#include "photonwalk/metrics.hpp"
#include "photonwalk/rng.hpp"

namespace photonwalk {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

UnitaryMatrix lattice_unitary(const ExperimentConfig& config,
                              std::optional<std::uint64_t> disorder_seed = std::nullopt) {
  const CouplingMatrix coupling =
      build_coupling_matrix(config.lattice.geometry, config.lattice.c0, config.lattice.d0,
                            config.lattice.beta);
  std::vector<LatticeSegment> segments;
  if (config.disorder) {
    DisorderSpec spec = *config.disorder;
    if (disorder_seed) spec.seed = *disorder_seed;
    segments = apply_disorder(coupling, spec, config.lattice.length);
  } else {
    segments.push_back({coupling, config.lattice.length});
  }
  return evolve_segments(segments);
}

LossVector detection_loss(const DetectionConfig& detection, int dim) {
  if (detection.efficiencies.empty()) {
    return LossVector::uniform(dim, detection.uniform_efficiency);
  }
  LossVector loss;
  loss.efficiencies = Eigen::Map<const Eigen::VectorXd>(
      detection.efficiencies.data(), static_cast<Eigen::Index>(detection.efficiencies.size()));
  loss.validate(dim);
  return loss;
}

PairInput source_pair(const SourceConfig& source) {
  PairInput pair;
  pair.mode_i = source.input_modes.at(0);
  pair.mode_j = source.input_modes.at(1);
  pair.indistinguishability = source.indistinguishability;
  return pair;
}

Eigen::MatrixXd fig5_filter(Eigen::MatrixXd values, bool enabled) {
  if (enabled) values = values.cwiseMax(0.0);
  return values;
}

double max_off_diagonal(const Eigen::MatrixXd& m) {
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i + 1; j < m.cols(); ++j) best = std::max(best, m(i, j));
  return best;
}

struct Aggregate {
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;
};

Aggregate aggregate(std::vector<double> xs) {
  Aggregate a;
  if (xs.empty()) return a;
  if (std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs.front(); })) {
    a.mean = a.median = xs.front();
    return a;  // identical values: exactly zero spread
  }
  const double n = static_cast<double>(xs.size());
  for (double x : xs) a.mean += x;
  a.mean /= n;
  std::sort(xs.begin(), xs.end());
  a.median = xs.size() % 2 == 1 ? xs[xs.size() / 2]
                                : 0.5 * (xs[xs.size() / 2 - 1] + xs[xs.size() / 2]);
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - a.mean) * (x - a.mean);
    a.stddev = std::sqrt(ss / (n - 1.0));
  }
  return a;
}

json to_json(const Aggregate& a) {
  return json{{"mean", a.mean}, {"median", a.median}, {"std", a.stddev}};
}

void write_summary(const fs::path& outdir, const json& summary) {
  std::ofstream out(outdir / "summary.json", std::ios::binary);
  if (!out) throw IoError("cannot write " + (outdir / "summary.json").string());
  out << summary.dump(2) << '\n';
}

std::string format_short(double value) {
  std::ostringstream stream;
  stream.precision(6);
  stream << value;
  return stream.str();
}

double triangle_ipr(const CorrelationMatrix& gamma) {
  double ipr = 0.0;
  for (int i = 0; i < gamma.dim(); ++i)
    for (int j = i; j < gamma.dim(); ++j) ipr += gamma.values(i, j) * gamma.values(i, j);
  return ipr;
}

// ---- tasks ----------------------------------------------------------------

std::string run_unitary(const ExperimentConfig& config, const fs::path& outdir) {
  const UnitaryMatrix u = lattice_unitary(config);
  io::write_matrix_csv(outdir / "unitary_real.csv", u.entries.real(), false);
  io::write_matrix_csv(outdir / "unitary_imag.csv", u.entries.imag(), false);
  const double deviation = u.unitarity_deviation();
  write_summary(outdir, json{{"task", "unitary"},
                             {"modes", u.dim()},
                             {"unitarity_deviation", deviation}});
  return "unitary: N=" + std::to_string(u.dim()) +
         ", max |U^H U - I| = " + io::format_double(deviation);
}

std::string run_singles(const ExperimentConfig& config, const fs::path& outdir) {
  const UnitaryMatrix u = lattice_unitary(config);
  std::vector<int> inputs = config.task.singles_inputs;
  if (inputs.empty()) {
    inputs.resize(u.dim());
    for (int k = 0; k < u.dim(); ++k) inputs[k] = k;
  }
  json files = json::array();
  for (int mode : inputs) {
    const SinglesDistribution singles = singles_distribution(u, mode);
    const std::string name = "singles_input_" + std::to_string(mode + 1) + ".csv";
    io::write_singles_csv(outdir / name, singles);
    files.push_back({{"input", mode + 1}, {"file", name}, {"sum", singles.probabilities.sum()}});
  }
  write_summary(outdir, json{{"task", "singles"}, {"distributions", files}});
  return "singles: wrote " + std::to_string(inputs.size()) + " distributions over " +
         std::to_string(u.dim()) + " outputs";
}

std::string run_corr(const ExperimentConfig& config, const fs::path& outdir) {
  const UnitaryMatrix u = lattice_unitary(config);
  const PairInput pair = source_pair(*config.source);
  const CorrelationMatrix quantum = quantum_correlation(u, pair);
  const CorrelationMatrix classical = classical_correlation(u, pair);
  io::write_matrix_csv(outdir / "gamma_quantum.csv", quantum.values, true);
  io::write_matrix_csv(outdir / "gamma_classical.csv", classical.values, true);
  const double mu = pair.indistinguishability;
  if (mu > 0.0 && mu < 1.0) {
    io::write_matrix_csv(outdir / "gamma_partial.csv", partial_correlation(u, pair).values,
                         true);
  }
  const double s = similarity(quantum, classical);
  write_summary(outdir, json{{"task", "corr"},
                             {"input_modes", {pair.mode_i + 1, pair.mode_j + 1}},
                             {"indistinguishability", mu},
                             {"similarity_quantum_classical", s}});
  return "corr: inputs (" + std::to_string(pair.mode_i + 1) + "," +
         std::to_string(pair.mode_j + 1) + "), S(quantum, classical) = " + format_short(s);
}

std::string run_violation(const ExperimentConfig& config, const fs::path& outdir, bool fig5) {
  const UnitaryMatrix u = lattice_unitary(config);
  const PairInput pair = source_pair(*config.source);
  const CorrelationMatrix gamma = partial_correlation(u, pair);
  const ViolationMatrix v = violation_matrix(gamma);
  io::write_matrix_csv(outdir / "violation.csv", fig5_filter(v.values, fig5), true);

  json summary{{"task", "violation"},
               {"fig5_compatible", fig5},
               {"max_violation_exact", max_off_diagonal(v.values)}};
  std::string line = "violation: max V = " + format_short(max_off_diagonal(v.values));

  if (config.detection) {
    const LossVector loss = detection_loss(*config.detection, u.dim());
    const CountRecord record = sample_counts(gamma, config.detection->n_pairs, loss,
                                             config.detection->bunching_split,
                                             config.detection->seed);
    io::write_counts_csv(outdir / "counts.csv", record);
    io::write_counts_json(outdir / "counts.json", record);
    EstimateOptions options;
    if (config.task.correct_bunching) options.bunching_split = config.detection->bunching_split;
    if (config.task.correct_loss) options.loss = loss;
    const CorrelationEstimate estimate = estimate_correlation(record, options);
    io::write_matrix_csv(outdir / "gamma_estimate.csv", estimate.gamma.values, true);
    io::write_matrix_csv(outdir / "gamma_sigma.csv", estimate.sigma, true);
    const ViolationSignificance sig = violation_significance(estimate.gamma, estimate.sigma);
    io::write_matrix_csv(outdir / "violation_estimate.csv", fig5_filter(sig.value, fig5), true);
    io::write_matrix_csv(outdir / "violation_significance.csv",
                         fig5_filter(sig.significance, fig5), true);
    summary["n_pairs"] = config.detection->n_pairs;
    summary["recorded_counts"] = record.total_counts();
    summary["max_violation_estimate"] = max_off_diagonal(sig.value);
    summary["max_significance"] = max_off_diagonal(sig.significance);
    line += ", max V/sigma = " + format_short(max_off_diagonal(sig.significance)) + " (" +
            std::to_string(config.detection->n_pairs) + " pairs)";
  }
  write_summary(outdir, summary);
  return line;
}

std::string run_similarity(const ExperimentConfig& config, const fs::path& outdir) {
  const UnitaryMatrix u = lattice_unitary(config);
  const PairInput pair = source_pair(*config.source);
  const CorrelationMatrix gamma = partial_correlation(u, pair);
  const LossVector loss = detection_loss(*config.detection, u.dim());
  const CountRecord record = sample_counts(gamma, config.detection->n_pairs, loss,
                                           config.detection->bunching_split,
                                           config.detection->seed);
  EstimateOptions options;
  if (config.task.correct_bunching) options.bunching_split = config.detection->bunching_split;
  if (config.task.correct_loss) options.loss = loss;
  const CorrelationEstimate estimate = estimate_correlation(record, options);
  const double s = similarity(estimate.gamma, gamma);

  io::write_matrix_csv(outdir / "gamma_exact.csv", gamma.values, true);
  io::write_matrix_csv(outdir / "gamma_estimate.csv", estimate.gamma.values, true);
  io::write_counts_csv(outdir / "counts.csv", record);
  io::write_counts_json(outdir / "counts.json", record);
  write_summary(outdir, json{{"task", "similarity"},
                             {"similarity", s},
                             {"n_pairs", config.detection->n_pairs},
                             {"recorded_counts", record.total_counts()}});
  return "similarity: S(estimate, exact) = " + format_short(s) + " (" +
         std::to_string(config.detection->n_pairs) + " pairs, " +
         std::to_string(record.total_counts()) + " recorded)";
}

std::string run_hom_scan(const ExperimentConfig& config, const fs::path& outdir) {
  const UnitaryMatrix u = lattice_unitary(config);
  const PairInput pair = source_pair(*config.source);
  const auto output_pair = *config.task.output_pair;
  const std::vector<DipSample> curve =
      hom_dip_curve(u, pair, output_pair, config.task.delays, config.source->coherence_time);
  io::write_dip_csv(outdir / "hom_scan.csv", curve);

  json summary{{"task", "hom-scan"},
               {"output_pair", {output_pair.first + 1, output_pair.second + 1}},
               {"samples", curve.size()}};
  std::string line = "hom-scan: " + std::to_string(curve.size()) + " delays at outputs (" +
                     std::to_string(output_pair.first + 1) + "," +
                     std::to_string(output_pair.second + 1) + ")";
  if (curve.size() >= 4) {
    const DipFit fit = fit_hom_dip(curve);
    summary["fit"] = json{{"floor", fit.floor},     {"depth", fit.depth},
                          {"center", fit.center},   {"width", fit.width},
                          {"visibility", fit.visibility}, {"residual", fit.residual}};
    line += ", fitted visibility = " + format_short(fit.visibility);
  }
  write_summary(outdir, summary);
  return line;
}

std::string run_ensemble(const ExperimentConfig& config, const fs::path& outdir) {
  const int realizations = config.task.n_realizations;
  const PairInput pair = source_pair(*config.source);

  std::vector<double> similarities, significances, iprs;
  std::ofstream table(outdir / "realizations.csv", std::ios::binary);
  if (!table) throw IoError("cannot write " + (outdir / "realizations.csv").string());
  table << "realization,similarity,max_significance,ipr\n";

  for (int r = 0; r < realizations; ++r) {
    // Realization r shifts the disorder seed; the detection seed stays fixed
    // so a zero-jitter ensemble is exactly reproducible across realizations.
    const std::uint64_t seed = config.disorder->seed + static_cast<std::uint64_t>(r);
    const UnitaryMatrix u = lattice_unitary(config, seed);
    const CorrelationMatrix gamma = partial_correlation(u, pair);
    const LossVector loss = detection_loss(*config.detection, u.dim());
    const CountRecord record = sample_counts(gamma, config.detection->n_pairs, loss,
                                             config.detection->bunching_split,
                                             config.detection->seed);
    EstimateOptions options;
    if (config.task.correct_bunching) options.bunching_split = config.detection->bunching_split;
    if (config.task.correct_loss) options.loss = loss;
    const CorrelationEstimate estimate = estimate_correlation(record, options);
    const ViolationSignificance sig = violation_significance(estimate.gamma, estimate.sigma);

    const double s = similarity(estimate.gamma, gamma);
    const double max_sig = max_off_diagonal(sig.significance);
    const double ipr = triangle_ipr(gamma);
    similarities.push_back(s);
    significances.push_back(max_sig);
    iprs.push_back(ipr);
    table << (r + 1) << ',' << io::format_double(s) << ',' << io::format_double(max_sig) << ','
          << io::format_double(ipr) << '\n';
  }
  table.close();

  write_summary(outdir, json{{"task", "ensemble"},
                             {"n_realizations", realizations},
                             {"similarity", to_json(aggregate(similarities))},
                             {"max_significance", to_json(aggregate(significances))},
                             {"ipr", to_json(aggregate(iprs))}});
  return "ensemble: " + std::to_string(realizations) +
         " realizations, median S = " + format_short(aggregate(similarities).median) +
         ", median max V/sigma = " + format_short(aggregate(significances).median);
}

// Adds Poisson count noise to a dip scan. The dip bottom is a fresh count of
// `events` expected pairs; the dip floor is the distinguishable rate of
// Eq.-8 form, which the protocol already knows from the singles data, so it
// carries the singles' noise rather than fresh shot noise.
VisibilityRecord noisy_visibility(const UnitaryMatrix& u,
                                  const std::vector<SinglesDistribution>& singles,
                                  const std::vector<int>& modes, const ScanSpec& scan,
                                  std::int64_t events, SplitMix64& g) {
  const auto [i, j] = scan.input_pair;
  const auto [k, l] = scan.output_pair;
  const double p_quantum =
      pair_correlation_from_columns(u.entries.col(i), u.entries.col(j), 1.0).values(k, l);

  const auto column_of = [&](int mode) {
    return static_cast<std::size_t>(std::find(modes.begin(), modes.end(), mode) - modes.begin());
  };
  const Eigen::VectorXd& p = singles[column_of(i)].probabilities;
  const Eigen::VectorXd& q = singles[column_of(j)].probabilities;
  const double floor = p(k) * q(l) + p(l) * q(k);

  VisibilityRecord record;
  record.input_pair = scan.input_pair;
  record.output_pair = scan.output_pair;
  const double dip_count = static_cast<double>(
      sample_poisson(g, static_cast<double>(events) * p_quantum));
  const double floor_count = static_cast<double>(events) * floor;
  if (floor_count > 0.0) {
    record.visibility = std::clamp((floor_count - dip_count) / floor_count, -1.0, 1.0);
    record.uncertainty = std::max(std::sqrt(dip_count), 1.0) / floor_count;
  } else {
    record.visibility = 0.0;
    record.uncertainty = 1.0;
  }
  return record;
}

std::string run_tomography(const ExperimentConfig& config, const fs::path& outdir) {
  const bool ingest = !config.task.visibilities_csv.empty();

  std::vector<SinglesDistribution> singles;
  std::vector<VisibilityRecord> visibilities;
  std::size_t scan_count = 0;
  UnitaryMatrix u;

  if (ingest) {
    const auto is_json = [](const fs::path& p) { return p.extension() == ".json"; };
    const fs::path vis_path = config.task.visibilities_csv;
    visibilities = is_json(vis_path) ? io::read_visibilities_json(vis_path)
                                     : io::read_visibilities_csv(vis_path);
    for (const std::string& path : config.task.singles_csv) {
      singles.push_back(is_json(path) ? io::read_singles_json(path)
                                      : io::read_singles_csv(path));
    }
    scan_count = visibilities.size();
  } else {
    u = lattice_unitary(config);
    const std::vector<int>& modes = config.source->input_modes;
    const std::vector<ScanSpec> plan = plan_scans(modes, u.dim(), config.task.plan);
    scan_count = plan.size();

    const std::uint64_t singles_root = derive_seed(config.task.noise_seed, 1);
    for (int mode : modes) {
      SinglesDistribution s = singles_distribution(u, mode);
      if (config.task.singles_events > 0) {
        SplitMix64 g(derive_seed(singles_root, static_cast<std::uint64_t>(mode)));
        Eigen::VectorXd counts = Eigen::VectorXd::Zero(u.dim());
        for (std::int64_t e = 0; e < config.task.singles_events; ++e) {
          const double draw = g.next_double();
          double cumulative = 0.0;
          int cell = u.dim() - 1;
          for (int k = 0; k < u.dim(); ++k) {
            cumulative += s.probabilities(k);
            if (draw < cumulative) {
              cell = k;
              break;
            }
          }
          counts(cell) += 1.0;
        }
        s.probabilities = counts / counts.sum();
      }
      singles.push_back(s);
      io::write_singles_csv(outdir / ("singles_input_" + std::to_string(mode + 1) + ".csv"), s);
    }

    const std::uint64_t scan_root = derive_seed(config.task.noise_seed, 0);
    for (std::size_t idx = 0; idx < plan.size(); ++idx) {
      if (config.task.events_per_scan > 0) {
        SplitMix64 g(derive_seed(scan_root, idx));
        visibilities.push_back(noisy_visibility(u, singles, modes, plan[idx],
                                                config.task.events_per_scan, g));
      } else {
        visibilities.push_back(
            simulate_visibility(u, plan[idx].input_pair, plan[idx].output_pair));
      }
    }
    io::write_visibilities_csv(outdir / "visibilities.csv", visibilities);
    io::write_visibilities_json(outdir / "visibilities.json", visibilities);
  }

  ReconstructionOptions options;
  options.random_restarts = config.task.restarts;
  const SubmatrixEstimate estimate = reconstruct_submatrix(singles, visibilities, options);
  io::write_estimate_json(outdir / "estimate.json", estimate);

  json summary{{"task", "tomography"},
               {"scans", scan_count},
               {"residual", estimate.residual},
               {"consistent", estimate.consistent}};
  std::string line = "tomography: " + std::to_string(scan_count) +
                     " scans, residual = " + io::format_double(estimate.residual);

  if (!ingest) {
    PairInput pair;
    pair.mode_i = config.source->input_modes.front();
    pair.mode_j = config.source->input_modes.back();
    pair.indistinguishability = config.source->indistinguishability;
    const CorrelationMatrix predicted = predict_correlation(estimate, pair);
    CorrelationMatrix truth = partial_correlation(u, pair);
    io::write_matrix_csv(outdir / "gamma_predicted.csv", predicted.values, true);
    io::write_matrix_csv(outdir / "gamma_truth.csv", truth.values, true);
    const double s = similarity(predicted, truth);
    summary["similarity_predicted_truth"] = s;
    summary["predict_pair"] = {pair.mode_i + 1, pair.mode_j + 1};
    line += ", S(predicted, truth) = " + format_short(s);
  }
  write_summary(outdir, summary);
  return line;
}

json error_report(const std::string& type, const std::string& message, int exit_code) {
  return json{{"error", {{"type", type}, {"message", message}}}, {"exit_code", exit_code}};
}

int report_and_code(const std::exception& e) {
  std::string type = "internal";
  int code = 1;
  if (dynamic_cast<const ConfigError*>(&e)) {
    type = "config";
    code = 2;
  } else if (dynamic_cast<const IoError*>(&e)) {
    type = "io";
    code = 4;
  } else if (dynamic_cast<const ParameterError*>(&e)) {
    type = "parameter";
    code = 3;
  } else if (dynamic_cast<const GeometryError*>(&e)) {
    type = "geometry";
    code = 3;
  } else if (dynamic_cast<const ValidationError*>(&e)) {
    type = "validation";
    code = 3;
  } else if (dynamic_cast<const NumericalError*>(&e)) {
    type = "numerical";
    code = 3;
  }
  std::cerr << error_report(type, e.what(), code).dump() << std::endl;
  return code;
}

}  // namespace

std::string execute_config(const ExperimentConfig& config, const fs::path& outdir,
                           bool fig5_compatible) {
  const std::string& name = config.task.name;
  if (name == "unitary") return run_unitary(config, outdir);
  if (name == "singles") return run_singles(config, outdir);
  if (name == "corr") return run_corr(config, outdir);
  if (name == "violation") return run_violation(config, outdir, fig5_compatible);
  if (name == "similarity") return run_similarity(config, outdir);
  if (name == "hom-scan") return run_hom_scan(config, outdir);
  if (name == "ensemble") return run_ensemble(config, outdir);
  if (name == "tomography") return run_tomography(config, outdir);
  throw ConfigError("unknown task name '" + name + "'");
}

int run_config_file(const fs::path& path, const RunOptions& options) {
  try {
    const ExperimentConfig config = load_config(path);
    fs::path outdir = config.output_dir;
    if (const char* env = std::getenv("PHOTONWALK_OUT"); env && *env) outdir = env;
    if (!options.output_dir_override.empty()) outdir = options.output_dir_override;
    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec) throw IoError("cannot create output directory " + outdir.string());
    const bool fig5 = options.fig5_compatible || config.task.fig5_compatible;
    std::cout << execute_config(config, outdir, fig5) << std::endl;
    return 0;
  } catch (const std::exception& e) {
    return report_and_code(e);
  }
}

int validate_config_file(const fs::path& path) {
  try {
    const ExperimentConfig config = load_config(path);
    std::cout << "valid: task '" << config.task.name << "' on "
              << config.lattice.geometry.site_count() << " modes" << std::endl;
    return 0;
  } catch (const std::exception& e) {
    return report_and_code(e);
  }
}

}  // namespace photonwalk
