#include "photonwalk/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "photonwalk/errors.hpp"

namespace photonwalk::io {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return in;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

void expect_header(std::ifstream& in, const std::string& expected,
                   const std::filesystem::path& path) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty file: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected) {
    throw IoError("unexpected header in " + path.string() + ": got '" + line + "', expected '" +
                  expected + "'");
  }
}

double parse_double(const std::string& s, const std::filesystem::path& path) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError("bad numeric field '" + s + "' in " + path.string());
  }
}

long long parse_int(const std::string& s, const std::filesystem::path& path) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError("bad integer field '" + s + "' in " + path.string());
  }
}

json load_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

void dump_json(const std::filesystem::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& matrix,
                      bool triangle_only) {
  auto out = open_out(path);
  out << "i,j,value\n";
  for (int i = 0; i < matrix.rows(); ++i) {
    for (int j = triangle_only ? i : 0; j < matrix.cols(); ++j) {
      out << (i + 1) << ',' << (j + 1) << ',' << format_double(matrix(i, j)) << '\n';
    }
  }
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path, bool mirror) {
  auto in = open_in(path);
  expect_header(in, "i,j,value", path);
  std::vector<std::tuple<int, int, double>> cells;
  int dim = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) throw IoError("malformed row in " + path.string());
    const int i = static_cast<int>(parse_int(fields[0], path)) - 1;
    const int j = static_cast<int>(parse_int(fields[1], path)) - 1;
    if (i < 0 || j < 0) throw IoError("indices must be 1-based in " + path.string());
    cells.emplace_back(i, j, parse_double(fields[2], path));
    dim = std::max({dim, i + 1, j + 1});
  }
  if (dim == 0) throw IoError("no data rows in " + path.string());
  Eigen::MatrixXd matrix = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& [i, j, v] : cells) {
    matrix(i, j) = v;
    if (mirror) matrix(j, i) = v;
  }
  return matrix;
}

void write_singles_csv(const std::filesystem::path& path, const SinglesDistribution& singles) {
  auto out = open_out(path);
  out << "input,output,probability\n";
  for (int k = 0; k < singles.probabilities.size(); ++k) {
    out << (singles.input_mode + 1) << ',' << (k + 1) << ','
        << format_double(singles.probabilities(k)) << '\n';
  }
}

SinglesDistribution read_singles_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  expect_header(in, "input,output,probability", path);
  std::vector<std::pair<int, double>> rows;
  int input = -1;
  int dim = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) throw IoError("malformed row in " + path.string());
    const int this_input = static_cast<int>(parse_int(fields[0], path)) - 1;
    const int output = static_cast<int>(parse_int(fields[1], path)) - 1;
    if (input >= 0 && this_input != input) {
      throw IoError("singles file mixes input modes: " + path.string());
    }
    input = this_input;
    if (output < 0) throw IoError("indices must be 1-based in " + path.string());
    rows.emplace_back(output, parse_double(fields[2], path));
    dim = std::max(dim, output + 1);
  }
  if (rows.empty()) throw IoError("no data rows in " + path.string());
  SinglesDistribution singles;
  singles.input_mode = input;
  singles.probabilities = Eigen::VectorXd::Zero(dim);
  for (const auto& [output, p] : rows) singles.probabilities(output) = p;
  return singles;
}

void write_singles_json(const std::filesystem::path& path, const SinglesDistribution& singles) {
  json j;
  j["input"] = singles.input_mode + 1;
  j["probabilities"] = std::vector<double>(
      singles.probabilities.data(), singles.probabilities.data() + singles.probabilities.size());
  dump_json(path, j);
}

SinglesDistribution read_singles_json(const std::filesystem::path& path) {
  const json j = load_json(path);
  try {
    SinglesDistribution singles;
    singles.input_mode = j.at("input").get<int>() - 1;
    const auto p = j.at("probabilities").get<std::vector<double>>();
    singles.probabilities =
        Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size()));
    return singles;
  } catch (const json::exception& e) {
    throw IoError("bad singles JSON " + path.string() + ": " + e.what());
  }
}

void write_counts_csv(const std::filesystem::path& path, const CountRecord& record) {
  auto out = open_out(path);
  out << "i,j,count\n";
  for (const auto& [pair, count] : record.pairs) {
    out << (pair.first + 1) << ',' << (pair.second + 1) << ',' << count << '\n';
  }
}

CountRecord read_counts_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  expect_header(in, "i,j,count", path);
  CountRecord record;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) throw IoError("malformed row in " + path.string());
    const int i = static_cast<int>(parse_int(fields[0], path)) - 1;
    const int j = static_cast<int>(parse_int(fields[1], path)) - 1;
    if (i < 0 || j < i) throw IoError("count rows must satisfy 1 <= i <= j in " + path.string());
    record.pairs[{i, j}] = parse_int(fields[2], path);
    record.dim = std::max(record.dim, j + 1);
  }
  record.total_pairs_emitted = record.total_counts();
  return record;
}

void write_counts_json(const std::filesystem::path& path, const CountRecord& record) {
  json j;
  j["modes"] = record.dim;
  j["total_pairs_emitted"] = record.total_pairs_emitted;
  j["seed"] = record.seed;
  json counts = json::array();
  for (const auto& [pair, count] : record.pairs) {
    counts.push_back({{"i", pair.first + 1}, {"j", pair.second + 1}, {"count", count}});
  }
  j["counts"] = std::move(counts);
  dump_json(path, j);
}

CountRecord read_counts_json(const std::filesystem::path& path) {
  const json j = load_json(path);
  try {
    CountRecord record;
    record.dim = j.at("modes").get<int>();
    record.total_pairs_emitted = j.at("total_pairs_emitted").get<std::int64_t>();
    record.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& cell : j.at("counts")) {
      const int i = cell.at("i").get<int>() - 1;
      const int jdx = cell.at("j").get<int>() - 1;
      record.pairs[{i, jdx}] = cell.at("count").get<std::int64_t>();
    }
    return record;
  } catch (const json::exception& e) {
    throw IoError("bad counts JSON " + path.string() + ": " + e.what());
  }
}

void write_visibilities_csv(const std::filesystem::path& path,
                            const std::vector<VisibilityRecord>& records) {
  auto out = open_out(path);
  out << "scan,in_i,in_j,out_k,out_l,visibility,uncertainty\n";
  for (std::size_t s = 0; s < records.size(); ++s) {
    const VisibilityRecord& r = records[s];
    out << (s + 1) << ',' << (r.input_pair.first + 1) << ',' << (r.input_pair.second + 1) << ','
        << (r.output_pair.first + 1) << ',' << (r.output_pair.second + 1) << ','
        << format_double(r.visibility) << ',' << format_double(r.uncertainty) << '\n';
  }
}

std::vector<VisibilityRecord> read_visibilities_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  expect_header(in, "scan,in_i,in_j,out_k,out_l,visibility,uncertainty", path);
  std::vector<VisibilityRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 7) throw IoError("malformed row in " + path.string());
    VisibilityRecord r;
    r.input_pair = {static_cast<int>(parse_int(fields[1], path)) - 1,
                    static_cast<int>(parse_int(fields[2], path)) - 1};
    r.output_pair = {static_cast<int>(parse_int(fields[3], path)) - 1,
                     static_cast<int>(parse_int(fields[4], path)) - 1};
    r.visibility = parse_double(fields[5], path);
    r.uncertainty = parse_double(fields[6], path);
    records.push_back(r);
  }
  return records;
}

void write_visibilities_json(const std::filesystem::path& path,
                             const std::vector<VisibilityRecord>& records) {
  json rows = json::array();
  for (std::size_t s = 0; s < records.size(); ++s) {
    const VisibilityRecord& r = records[s];
    rows.push_back({{"scan", s + 1},
                    {"in", {r.input_pair.first + 1, r.input_pair.second + 1}},
                    {"out", {r.output_pair.first + 1, r.output_pair.second + 1}},
                    {"visibility", r.visibility},
                    {"uncertainty", r.uncertainty}});
  }
  dump_json(path, json{{"visibilities", std::move(rows)}});
}

std::vector<VisibilityRecord> read_visibilities_json(const std::filesystem::path& path) {
  const json j = load_json(path);
  try {
    std::vector<VisibilityRecord> records;
    for (const auto& row : j.at("visibilities")) {
      VisibilityRecord r;
      r.input_pair = {row.at("in").at(0).get<int>() - 1, row.at("in").at(1).get<int>() - 1};
      r.output_pair = {row.at("out").at(0).get<int>() - 1, row.at("out").at(1).get<int>() - 1};
      r.visibility = row.at("visibility").get<double>();
      r.uncertainty = row.at("uncertainty").get<double>();
      records.push_back(r);
    }
    return records;
  } catch (const json::exception& e) {
    throw IoError("bad visibilities JSON " + path.string() + ": " + e.what());
  }
}

void write_dip_csv(const std::filesystem::path& path, const std::vector<DipSample>& curve) {
  auto out = open_out(path);
  out << "delay,coincidence\n";
  for (const DipSample& s : curve) {
    out << format_double(s.delay) << ',' << format_double(s.coincidence) << '\n';
  }
}

void write_estimate_json(const std::filesystem::path& path, const SubmatrixEstimate& estimate) {
  json j;
  j["gauge"] = "first-row-first-column-zero";
  j["conjugation"] = "lexicographic-minimal-phases";
  json modes = json::array();
  for (int mode : estimate.input_modes) modes.push_back(mode + 1);
  j["input_modes"] = std::move(modes);
  j["outputs"] = estimate.moduli.rows();
  auto matrix_to_json = [](const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (int k = 0; k < m.rows(); ++k) {
      json row = json::array();
      for (int c = 0; c < m.cols(); ++c) row.push_back(m(k, c));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  j["moduli"] = matrix_to_json(estimate.moduli);
  j["phases"] = matrix_to_json(estimate.phases);
  j["residual"] = estimate.residual;
  j["consistent"] = estimate.consistent;
  json loose = json::array();
  for (const auto& [output, input] : estimate.unconstrained) {
    loose.push_back({{"output", output + 1}, {"input", input + 1}});
  }
  j["unconstrained_phases"] = std::move(loose);
  dump_json(path, j);
}

SubmatrixEstimate read_estimate_json(const std::filesystem::path& path) {
  const json j = load_json(path);
  try {
    SubmatrixEstimate estimate;
    for (const auto& mode : j.at("input_modes")) {
      estimate.input_modes.push_back(mode.get<int>() - 1);
    }
    const auto rows = j.at("moduli");
    const int n = static_cast<int>(rows.size());
    const int m = n > 0 ? static_cast<int>(rows.at(0).size()) : 0;
    estimate.moduli.resize(n, m);
    estimate.phases.resize(n, m);
    for (int k = 0; k < n; ++k) {
      for (int c = 0; c < m; ++c) {
        estimate.moduli(k, c) = j.at("moduli").at(k).at(c).get<double>();
        estimate.phases(k, c) = j.at("phases").at(k).at(c).get<double>();
      }
    }
    estimate.residual = j.at("residual").get<double>();
    estimate.consistent = j.at("consistent").get<bool>();
    for (const auto& cell : j.at("unconstrained_phases")) {
      estimate.unconstrained.emplace_back(cell.at("output").get<int>() - 1,
                                          cell.at("input").get<int>() - 1);
    }
    return estimate;
  } catch (const json::exception& e) {
    throw IoError("bad estimate JSON " + path.string() + ": " + e.what());
  }
}

}  // namespace photonwalk::io
