#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "steinthin/samplers.hpp"
#include "steinthin/types.hpp"

namespace steinthin {

struct CsvOptions {
  bool header = false;
  char delimiter = ',';
};

/// Numeric table, one point per row. Throws std::runtime_error on IO or
/// parse failure with the offending line number.
PointMatrix read_points_csv(const std::filesystem::path& path, CsvOptions opts = {});
/// Values are written with 17 significant digits so they read back exactly.
void write_points_csv(const std::filesystem::path& path, const PointMatrix& points,
                      CsvOptions opts = {});

nlohmann::json meta_to_json(const SampleMeta& meta, Eigen::Index n, Eigen::Index d);
SampleMeta meta_from_json(const nlohmann::json& j);

/// `<stem>.meta.json` next to the CSV.
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

void write_sample_set(const std::filesystem::path& csv, const SampleSet& s, CsvOptions opts = {});
/// Reads the points and, if present, the sidecar metadata.
SampleSet read_sample_set(const std::filesystem::path& csv, CsvOptions opts = {});

/// Writes to a temporary sibling and renames into place, so a failed run
/// never leaves a truncated artifact behind.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string format_double(double v);

}  // namespace steinthin
