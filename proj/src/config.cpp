#include "photonwalk/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "photonwalk/errors.hpp"

namespace photonwalk {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double require_positive(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + " is missing '" + key + "'");
  if (!j.at(key).is_number()) throw ConfigError(where + "." + key + " must be a number");
  const double v = j.at(key).get<double>();
  if (!(v > 0.0)) throw ConfigError(where + "." + key + " must be positive");
  return v;
}

double get_number(const json& j, const std::string& key, const std::string& where,
                  std::optional<double> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(where + " is missing '" + key + "'");
  }
  if (!j.at(key).is_number()) throw ConfigError(where + "." + key + " must be a number");
  return j.at(key).get<double>();
}

int mode_index(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(where + " must be an integer mode index");
  const int port = j.get<int>();
  if (port < 1) throw ConfigError(where + " must be a 1-based mode index");
  return port - 1;
}

LatticeGeometry parse_geometry(const json& j) {
  check_keys(j, {"kind", "rows", "cols", "sites", "positions", "spacing"}, "lattice.geometry");
  if (!j.contains("kind") || !j.at("kind").is_string()) {
    throw ConfigError("lattice.geometry needs a string 'kind'");
  }
  const std::string kind = j.at("kind").get<std::string>();
  const double spacing = require_positive(j, "spacing", "lattice.geometry");
  try {
    if (kind == "chain") {
      if (!j.contains("sites")) throw ConfigError("chain geometry needs 'sites'");
      return LatticeGeometry::make_chain(j.at("sites").get<int>(), spacing);
    }
    if (kind == "grid2d") {
      if (!j.contains("rows") || !j.contains("cols")) {
        throw ConfigError("grid2d geometry needs 'rows' and 'cols'");
      }
      return LatticeGeometry::make_grid(j.at("rows").get<int>(), j.at("cols").get<int>(),
                                        spacing);
    }
    if (kind == "explicit") {
      if (!j.contains("positions") || !j.at("positions").is_array()) {
        throw ConfigError("explicit geometry needs a 'positions' array");
      }
      std::vector<Eigen::Vector2d> positions;
      for (const auto& p : j.at("positions")) {
        if (!p.is_array() || p.size() != 2) {
          throw ConfigError("each position must be a [x, y] pair");
        }
        positions.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
      }
      return LatticeGeometry::make_explicit(std::move(positions), spacing);
    }
  } catch (const GeometryError& e) {
    throw ConfigError(std::string("invalid lattice.geometry: ") + e.what());
  }
  throw ConfigError("lattice.geometry.kind must be chain, grid2d or explicit");
}

LatticeConfig parse_lattice(const json& j) {
  check_keys(j, {"geometry", "c0", "d0", "beta", "length"}, "lattice");
  if (!j.contains("geometry")) throw ConfigError("lattice is missing 'geometry'");
  LatticeConfig lattice;
  lattice.geometry = parse_geometry(j.at("geometry"));
  lattice.c0 = require_positive(j, "c0", "lattice");
  lattice.d0 = require_positive(j, "d0", "lattice");
  lattice.beta = get_number(j, "beta", "lattice", 0.0);
  lattice.length = require_positive(j, "length", "lattice");
  return lattice;
}

DisorderSpec parse_disorder(const json& j) {
  check_keys(j, {"seed", "edge_jitter", "segments", "segment_length_jitter", "diagonal_jitter"},
             "disorder");
  DisorderSpec spec;
  if (!j.contains("seed") || !j.at("seed").is_number_integer()) {
    throw ConfigError("disorder needs an integer 'seed'");
  }
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.edge_jitter = get_number(j, "edge_jitter", "disorder", 0.0);
  if (spec.edge_jitter < 0.0 || spec.edge_jitter >= 1.0) {
    throw ConfigError("disorder.edge_jitter must lie in [0, 1)");
  }
  spec.segments = static_cast<int>(get_number(j, "segments", "disorder", 1.0));
  if (spec.segments < 1) throw ConfigError("disorder.segments must be >= 1");
  spec.segment_length_jitter = get_number(j, "segment_length_jitter", "disorder", 0.0);
  if (spec.segment_length_jitter < 0.0 || spec.segment_length_jitter > 1.0) {
    throw ConfigError("disorder.segment_length_jitter must lie in [0, 1]");
  }
  spec.diagonal_jitter = get_number(j, "diagonal_jitter", "disorder", 0.0);
  if (spec.diagonal_jitter < 0.0) throw ConfigError("disorder.diagonal_jitter must be >= 0");
  return spec;
}

SourceConfig parse_source(const json& j) {
  check_keys(j, {"input_modes", "indistinguishability", "coherence_time"}, "source");
  SourceConfig source;
  if (!j.contains("input_modes") || !j.at("input_modes").is_array() ||
      j.at("input_modes").size() < 2) {
    throw ConfigError("source.input_modes must list at least two 1-based modes");
  }
  for (const auto& mode : j.at("input_modes")) {
    source.input_modes.push_back(mode_index(mode, "source.input_modes entry"));
  }
  source.indistinguishability = get_number(j, "indistinguishability", "source", 1.0);
  if (source.indistinguishability < 0.0 || source.indistinguishability > 1.0) {
    throw ConfigError("source.indistinguishability must lie in [0, 1]");
  }
  source.coherence_time = get_number(j, "coherence_time", "source", 1.0);
  if (!(source.coherence_time > 0.0)) {
    throw ConfigError("source.coherence_time must be positive");
  }
  return source;
}

DetectionConfig parse_detection(const json& j) {
  check_keys(j, {"n_pairs", "efficiencies", "bunching_split", "seed"}, "detection");
  DetectionConfig detection;
  detection.n_pairs = static_cast<std::int64_t>(get_number(j, "n_pairs", "detection"));
  if (detection.n_pairs < 1) throw ConfigError("detection.n_pairs must be >= 1");
  if (j.contains("efficiencies")) {
    const json& eff = j.at("efficiencies");
    if (eff.is_number()) {
      detection.uniform_efficiency = eff.get<double>();
      if (!(detection.uniform_efficiency > 0.0) || detection.uniform_efficiency > 1.0) {
        throw ConfigError("detection.efficiencies must lie in (0, 1]");
      }
    } else if (eff.is_array()) {
      for (const auto& e : eff) {
        const double v = e.get<double>();
        if (!(v > 0.0) || v > 1.0) throw ConfigError("detection.efficiencies must lie in (0, 1]");
        detection.efficiencies.push_back(v);
      }
    } else {
      throw ConfigError("detection.efficiencies must be a number or an array");
    }
  }
  detection.bunching_split = get_number(j, "bunching_split", "detection", 0.5);
  if (detection.bunching_split <= 0.0 || detection.bunching_split >= 1.0) {
    throw ConfigError("detection.bunching_split must lie strictly between 0 and 1");
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_integer()) throw ConfigError("detection.seed must be an integer");
    detection.seed = j.at("seed").get<std::uint64_t>();
  }
  return detection;
}

TaskConfig parse_task(const json& j) {
  check_keys(j,
             {"name", "inputs", "output_pair", "delays", "fig5_compatible", "correct_bunching",
              "correct_loss", "n_realizations", "plan", "events_per_scan", "singles_events",
              "restarts", "noise_seed", "visibilities_csv", "singles_csv"},
             "task");
  if (!j.contains("name") || !j.at("name").is_string()) {
    throw ConfigError("task needs a string 'name'");
  }
  TaskConfig task;
  task.name = j.at("name").get<std::string>();
  static const std::set<std::string> known{"unitary",    "singles",  "corr",
                                           "violation",  "similarity", "hom-scan",
                                           "ensemble",   "tomography"};
  if (!known.count(task.name)) throw ConfigError("unknown task name '" + task.name + "'");

  if (j.contains("inputs")) {
    const json& inputs = j.at("inputs");
    if (inputs.is_string()) {
      if (inputs.get<std::string>() != "all") {
        throw ConfigError("task.inputs must be \"all\" or an array of modes");
      }
    } else if (inputs.is_array()) {
      for (const auto& mode : inputs) {
        task.singles_inputs.push_back(mode_index(mode, "task.inputs entry"));
      }
    } else {
      throw ConfigError("task.inputs must be \"all\" or an array of modes");
    }
  }
  if (j.contains("output_pair")) {
    const json& p = j.at("output_pair");
    if (!p.is_array() || p.size() != 2) throw ConfigError("task.output_pair must be [k, l]");
    task.output_pair = std::pair<int, int>{mode_index(p.at(0), "task.output_pair"),
                                           mode_index(p.at(1), "task.output_pair")};
  }
  if (j.contains("delays")) {
    const json& d = j.at("delays");
    if (d.is_array()) {
      for (const auto& tau : d) task.delays.push_back(tau.get<double>());
    } else if (d.is_object()) {
      check_keys(d, {"min", "max", "count"}, "task.delays");
      const double lo = get_number(d, "min", "task.delays");
      const double hi = get_number(d, "max", "task.delays");
      const int count = static_cast<int>(get_number(d, "count", "task.delays"));
      if (count < 2 || hi <= lo) throw ConfigError("task.delays needs count >= 2 and max > min");
      for (int s = 0; s < count; ++s) {
        task.delays.push_back(lo + (hi - lo) * s / (count - 1));
      }
    } else {
      throw ConfigError("task.delays must be an array or {min, max, count}");
    }
  }
  if (j.contains("fig5_compatible")) task.fig5_compatible = j.at("fig5_compatible").get<bool>();
  if (j.contains("correct_bunching")) task.correct_bunching = j.at("correct_bunching").get<bool>();
  if (j.contains("correct_loss")) task.correct_loss = j.at("correct_loss").get<bool>();
  if (j.contains("n_realizations")) {
    task.n_realizations = j.at("n_realizations").get<int>();
    if (task.n_realizations < 1) throw ConfigError("task.n_realizations must be >= 1");
  }
  if (j.contains("plan")) {
    const std::string plan = j.at("plan").get<std::string>();
    if (plan == "minimal") {
      task.plan = ScanPlanMode::minimal;
    } else if (plan == "star_path") {
      task.plan = ScanPlanMode::star_path;
    } else if (plan == "full") {
      task.plan = ScanPlanMode::full;
    } else {
      throw ConfigError("task.plan must be minimal, star_path or full");
    }
  }
  if (j.contains("events_per_scan")) {
    task.events_per_scan = j.at("events_per_scan").get<std::int64_t>();
    if (task.events_per_scan < 0) throw ConfigError("task.events_per_scan must be >= 0");
  }
  if (j.contains("singles_events")) {
    task.singles_events = j.at("singles_events").get<std::int64_t>();
    if (task.singles_events < 0) throw ConfigError("task.singles_events must be >= 0");
  }
  if (j.contains("restarts")) {
    task.restarts = j.at("restarts").get<int>();
    if (task.restarts < 1) throw ConfigError("task.restarts must be >= 1");
  }
  if (j.contains("noise_seed")) task.noise_seed = j.at("noise_seed").get<std::uint64_t>();
  if (j.contains("visibilities_csv")) {
    task.visibilities_csv = j.at("visibilities_csv").get<std::string>();
  }
  if (j.contains("singles_csv")) {
    for (const auto& p : j.at("singles_csv")) task.singles_csv.push_back(p.get<std::string>());
  }
  return task;
}

ExperimentConfig parse_validated(const json& j) {
  check_keys(j, {"lattice", "disorder", "source", "detection", "task", "output_dir"}, "config");
  if (!j.contains("lattice")) throw ConfigError("config is missing 'lattice'");
  if (!j.contains("task")) throw ConfigError("config is missing 'task'");

  ExperimentConfig config;
  config.lattice = parse_lattice(j.at("lattice"));
  if (j.contains("disorder")) config.disorder = parse_disorder(j.at("disorder"));
  if (j.contains("source")) config.source = parse_source(j.at("source"));
  if (j.contains("detection")) config.detection = parse_detection(j.at("detection"));
  config.task = parse_task(j.at("task"));
  if (j.contains("output_dir")) config.output_dir = j.at("output_dir").get<std::string>();

  const int n = config.lattice.geometry.site_count();
  if (config.source) {
    for (int mode : config.source->input_modes) {
      if (mode >= n) throw ConfigError("source.input_modes exceed the lattice size");
    }
  }
  if (config.detection && !config.detection->efficiencies.empty() &&
      static_cast<int>(config.detection->efficiencies.size()) != n) {
    throw ConfigError("detection.efficiencies array must have one entry per mode");
  }
  for (int mode : config.task.singles_inputs) {
    if (mode >= n) throw ConfigError("task.inputs exceed the lattice size");
  }
  if (config.task.output_pair &&
      (config.task.output_pair->first >= n || config.task.output_pair->second >= n)) {
    throw ConfigError("task.output_pair exceeds the lattice size");
  }

  const std::string& name = config.task.name;
  auto require_source = [&](std::size_t exact_modes) {
    if (!config.source) throw ConfigError("task '" + name + "' needs a source section");
    if (exact_modes > 0 && config.source->input_modes.size() != exact_modes) {
      throw ConfigError("task '" + name + "' needs exactly " + std::to_string(exact_modes) +
                        " source.input_modes");
    }
  };
  if (name == "corr" || name == "hom-scan" || name == "similarity" || name == "violation" ||
      name == "ensemble") {
    require_source(2);
  }
  if (name == "tomography" && config.task.visibilities_csv.empty()) require_source(0);
  if (name == "tomography" && !config.task.visibilities_csv.empty() &&
      config.task.singles_csv.empty()) {
    throw ConfigError("tomography ingestion needs task.singles_csv files");
  }
  if ((name == "similarity" || name == "ensemble") && !config.detection) {
    throw ConfigError("task '" + name + "' needs a detection section");
  }
  if (name == "ensemble" && !config.disorder) {
    throw ConfigError("ensemble task needs a disorder section");
  }
  if (name == "hom-scan") {
    if (!config.task.output_pair) throw ConfigError("hom-scan task needs task.output_pair");
    if (config.task.delays.empty()) throw ConfigError("hom-scan task needs task.delays");
  }
  return config;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    return parse_validated(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config schema error: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace photonwalk
