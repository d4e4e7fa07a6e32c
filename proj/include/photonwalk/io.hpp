#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "photonwalk/counting.hpp"
#include "photonwalk/correlation.hpp"
#include "photonwalk/tomography.hpp"

// Stable file formats shared by the CLI and the ingestion paths. All CSV
// files are UTF-8 with LF line endings, a header row, 1-based mode indices
// and 17-significant-digit floats, so re-reading a file reproduces the
// in-memory doubles bit for bit.
namespace photonwalk::io {

std::string format_double(double value);

// Matrix CSV, header "i,j,value". triangle_only serializes i <= j rows;
// readers mirror them back into a symmetric matrix when `mirror` is set.
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& matrix,
                      bool triangle_only);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path, bool mirror);

// Singles CSV, header "input,output,probability".
void write_singles_csv(const std::filesystem::path& path, const SinglesDistribution& singles);
SinglesDistribution read_singles_csv(const std::filesystem::path& path);
void write_singles_json(const std::filesystem::path& path, const SinglesDistribution& singles);
SinglesDistribution read_singles_json(const std::filesystem::path& path);

// Coincidence-count CSV, header "i,j,count", plus a JSON twin that also
// carries the metadata fields.
void write_counts_csv(const std::filesystem::path& path, const CountRecord& record);
CountRecord read_counts_csv(const std::filesystem::path& path);
void write_counts_json(const std::filesystem::path& path, const CountRecord& record);
CountRecord read_counts_json(const std::filesystem::path& path);

// Visibility CSV, header "scan,in_i,in_j,out_k,out_l,visibility,uncertainty".
void write_visibilities_csv(const std::filesystem::path& path,
                            const std::vector<VisibilityRecord>& records);
std::vector<VisibilityRecord> read_visibilities_csv(const std::filesystem::path& path);
void write_visibilities_json(const std::filesystem::path& path,
                             const std::vector<VisibilityRecord>& records);
std::vector<VisibilityRecord> read_visibilities_json(const std::filesystem::path& path);

// Delay-scan CSV, header "delay,coincidence".
void write_dip_csv(const std::filesystem::path& path, const std::vector<DipSample>& curve);

// Reconstructed submatrix with its gauge declaration.
void write_estimate_json(const std::filesystem::path& path, const SubmatrixEstimate& estimate);
SubmatrixEstimate read_estimate_json(const std::filesystem::path& path);

}  // namespace photonwalk::io
