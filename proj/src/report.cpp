#include "steinthin/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "steinthin/sample_io.hpp"

namespace steinthin {

std::string rows_to_csv(const std::vector<MetricRow>& rows) {
  std::ostringstream os;
  os << "method,d,m,eps,seed,metric,value\n";
  for (const auto& r : rows) {
    os << r.method << ',' << r.d << ',' << r.m << ',' << format_double(r.eps) << ',' << r.seed << ','
       << r.metric << ',' << format_double(r.value) << '\n';
  }
  return os.str();
}

MeanSd mean_sd(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("mean_sd: no values");
  MeanSd out;
  double s = 0.0;
  for (double v : values) s += v;
  out.mean = s / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median: no values");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace steinthin
