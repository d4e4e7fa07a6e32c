#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "photonwalk/lattice.hpp"
#include "photonwalk/tomography.hpp"

namespace photonwalk {

struct LatticeConfig {
  LatticeGeometry geometry;
  double c0 = 1.0;
  double d0 = 1.0;
  double beta = 0.0;
  double length = 1.0;
};

struct SourceConfig {
  std::vector<int> input_modes;  // 0-based after parsing
  double indistinguishability = 1.0;
  double coherence_time = 1.0;
};

struct DetectionConfig {
  std::int64_t n_pairs = 1;
  double uniform_efficiency = 1.0;
  std::vector<double> efficiencies;  // per mode; empty means uniform
  double bunching_split = 0.5;
  std::uint64_t seed = 0;
};

struct TaskConfig {
  std::string name;                // unitary | singles | corr | violation |
                                   // similarity | hom-scan | ensemble | tomography
  std::vector<int> singles_inputs; // empty = all modes
  std::optional<std::pair<int, int>> output_pair;
  std::vector<double> delays;
  bool fig5_compatible = false;
  bool correct_bunching = true;
  bool correct_loss = true;
  int n_realizations = 1;
  ScanPlanMode plan = ScanPlanMode::minimal;
  std::int64_t events_per_scan = 0;  // 0 = noiseless visibilities
  std::int64_t singles_events = 0;   // 0 = exact singles
  int restarts = 32;
  std::uint64_t noise_seed = 0;
  std::string visibilities_csv;      // when set, ingest instead of simulating
  std::vector<std::string> singles_csv;
};

// Parsed and schema-validated experiment description. Unknown keys anywhere
// in the document are rejected.
struct ExperimentConfig {
  LatticeConfig lattice;
  std::optional<DisorderSpec> disorder;
  std::optional<SourceConfig> source;
  std::optional<DetectionConfig> detection;
  TaskConfig task;
  std::string output_dir = ".";
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace photonwalk
