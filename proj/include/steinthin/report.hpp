#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace steinthin {

/// One long-format record: plotting tools group on every column but value.
struct MetricRow {
  std::string method;
  long d = 0;
  long m = 0;
  double eps = 0.0;  // MALA step size; 0 for exact sampling
  std::uint64_t seed = 0;
  std::string metric;
  double value = 0.0;
};

/// Named scalar metrics plus the long-format rows they summarize.
struct MetricReport {
  nlohmann::json summary = nlohmann::json::object();
  std::vector<MetricRow> rows;
};

/// Header "method,d,m,eps,seed,metric,value" followed by one line per row.
std::string rows_to_csv(const std::vector<MetricRow>& rows);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation; 0 for a single value
};
MeanSd mean_sd(const std::vector<double>& values);

double median(std::vector<double> values);

}  // namespace steinthin
