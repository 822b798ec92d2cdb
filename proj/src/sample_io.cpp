#include "steinthin/sample_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace steinthin {

namespace fs = std::filesystem;

namespace {

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_cell(std::string_view cell, const fs::path& path, std::size_t line_no) {
  cell = trim(cell);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": not a number: '" +
                             std::string(cell) + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

PointMatrix read_points_csv(const fs::path& path, CsvOptions opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<double> values;
  Eigen::Index cols = -1;
  Eigen::Index rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (opts.header && line_no == 1) continue;
    const auto cells = split(line, opts.delimiter);
    if (cols < 0) cols = static_cast<Eigen::Index>(cells.size());
    if (static_cast<Eigen::Index>(cells.size()) != cols) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(cols) + " columns, found " + std::to_string(cells.size()));
    }
    for (const auto cell : cells) values.push_back(parse_cell(cell, path, line_no));
    ++rows;
  }
  if (rows == 0) throw std::runtime_error(path.string() + ": no data rows");
  PointMatrix out(rows, cols);
  std::copy(values.begin(), values.end(), out.data());
  return out;
}

void write_points_csv(const fs::path& path, const PointMatrix& points, CsvOptions opts) {
  std::ostringstream os;
  if (opts.header) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      if (j > 0) os << opts.delimiter;
      os << 'x' << j + 1;
    }
    os << '\n';
  }
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      if (j > 0) os << opts.delimiter;
      os << format_double(points(i, j));
    }
    os << '\n';
  }
  write_file_atomic(path, os.str());
}

nlohmann::json meta_to_json(const SampleMeta& meta, Eigen::Index n, Eigen::Index d) {
  return {{"sampler", meta.sampler},   {"seed", meta.seed},
          {"step_size", meta.step_size}, {"acceptance_rate", meta.acceptance_rate},
          {"n", n},                      {"dim", d}};
}

SampleMeta meta_from_json(const nlohmann::json& j) {
  SampleMeta m;
  m.sampler = j.at("sampler").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.step_size = j.value("step_size", 0.0);
  m.acceptance_rate = j.value("acceptance_rate", 1.0);
  return m;
}

fs::path sidecar_path(const fs::path& csv) {
  fs::path p = csv;
  p.replace_extension(".meta.json");
  return p;
}

void write_sample_set(const fs::path& csv, const SampleSet& s, CsvOptions opts) {
  write_points_csv(csv, s.points, opts);
  write_file_atomic(sidecar_path(csv), meta_to_json(s.meta, s.size(), s.dim()).dump(2) + "\n");
}

SampleSet read_sample_set(const fs::path& csv, CsvOptions opts) {
  SampleSet s;
  s.points = read_points_csv(csv, opts);
  const fs::path side = sidecar_path(csv);
  if (fs::exists(side)) {
    std::ifstream in(side);
    s.meta = meta_from_json(nlohmann::json::parse(in));
  } else {
    s.meta.sampler = "unknown";
  }
  return s;
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw std::runtime_error("write failed for " + path.string());
    }
  }
  fs::rename(tmp, path);
}

}  // namespace steinthin
