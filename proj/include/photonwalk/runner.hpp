#pragma once

#include <filesystem>
#include <string>

#include "photonwalk/config.hpp"

namespace photonwalk {

struct RunOptions {
  std::string output_dir_override;  // --out, beats PHOTONWALK_OUT, beats config
  bool fig5_compatible = false;     // ORed with the task flag
};

// Runs the configured task, writing its output files and summary.json under
// `outdir`. Returns the one-line summary for stdout. Throws on failure.
std::string execute_config(const ExperimentConfig& config, const std::filesystem::path& outdir,
                           bool fig5_compatible);

// CLI entry points: map errors to exit codes (2 schema, 3 numerical/domain,
// 4 I/O) and print a one-line JSON error report to stderr on failure.
int run_config_file(const std::filesystem::path& path, const RunOptions& options = {});
int validate_config_file(const std::filesystem::path& path);

}  // namespace photonwalk
