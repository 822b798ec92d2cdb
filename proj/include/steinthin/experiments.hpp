#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "steinthin/config.hpp"
#include "steinthin/report.hpp"

namespace steinthin {

struct ExperimentOutput {
  /// Resolved config, library version and summary statistics.
  nlohmann::json report;
  /// Long-format rows: method,d,m,eps,seed,metric,value.
  std::string metrics_csv;
  /// Weight sweeps only: lambda,w,ksd2_mean,ksd2_sd,is_argmin.
  std::optional<std::string> sweep_csv;
};

struct RunOverrides {
  std::optional<std::string> dataset_path;
};

/// Runs every repeat of the configured pipeline. Repeat r uses seed
/// cfg.seed + r; results do not depend on cfg.threads.
ExperimentOutput run_experiment(const ExperimentConfig& cfg, const RunOverrides& overrides = {});

/// Writes report.json, metrics.csv and (for sweeps) sweep.csv into out_dir.
/// Files already written are removed again if a later write fails.
void write_experiment_output(const std::filesystem::path& out_dir, const ExperimentOutput& out);

/// Per-(method, m, eps, metric) mean, sd and median of the rows, plus flat
/// "<method>_<metric>_mean" style keys when only one (m, eps) pair exists.
nlohmann::json summarize_rows(const std::vector<MetricRow>& rows);

}  // namespace steinthin
