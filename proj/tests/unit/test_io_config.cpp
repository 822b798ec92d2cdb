#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "steinthin/config.hpp"
#include "steinthin/experiments.hpp"
#include "steinthin/report.hpp"
#include "steinthin/sample_io.hpp"

using namespace steinthin;
using nlohmann::json;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

json minimal_thinning() {
  return json::parse(R"({
    "kind": "thinning",
    "target": {"type": "example_mixture", "d": 2, "mu": 3.0, "sigma": 1.0, "w": 0.2},
    "sampler": {"type": "exact", "n": 200},
    "thinning": {"methods": ["st", "rst"], "m": 20, "lambda": "1/m"},
    "evaluation": {"metrics": ["ksd", "mode_proportions"]},
    "repeats": 2,
    "seed": 4
  })");
}

}  // namespace

TEST(PointsCsv, RoundTripIsBitExact) {
  std::mt19937_64 rng(71);
  PointMatrix p = steinthin::testing::random_points(rng, 50, 3, 1e3);
  p(0, 0) = 1e-300;
  p(1, 1) = -0.1;
  const auto dir = temp_dir("steinthin_csv");
  for (const bool header : {false, true}) {
    const auto path = dir / (header ? "h.csv" : "n.csv");
    write_points_csv(path, p, CsvOptions{header, ','});
    const PointMatrix back = read_points_csv(path, CsvOptions{header, ','});
    EXPECT_EQ(back, p);
  }
  std::filesystem::remove_all(dir);
}

TEST(PointsCsv, ReportsOffendingLine) {
  const auto dir = temp_dir("steinthin_csv_bad");
  const auto path = dir / "bad.csv";
  std::ofstream(path) << "1,2\n3,x\n";
  try {
    read_points_csv(path);
    FAIL() << "expected a parse error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
  std::ofstream(path) << "1,2\n3\n";
  EXPECT_THROW(read_points_csv(path), std::runtime_error);
  EXPECT_THROW(read_points_csv(dir / "missing.csv"), std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST(SampleSet, SidecarRoundTrip) {
  const auto dir = temp_dir("steinthin_sidecar");
  SampleSet s;
  s.points = PointMatrix::Identity(3, 2);
  s.meta = SampleMeta{"mala", 42, 0.25, 0.8125};
  write_sample_set(dir / "chain.csv", s);
  EXPECT_TRUE(std::filesystem::exists(dir / "chain.meta.json"));
  EXPECT_EQ(sidecar_path(dir / "chain.csv"), dir / "chain.meta.json");
  const SampleSet back = read_sample_set(dir / "chain.csv");
  EXPECT_EQ(back.points, s.points);
  EXPECT_EQ(back.meta.sampler, "mala");
  EXPECT_EQ(back.meta.seed, 42u);
  EXPECT_EQ(back.meta.step_size, 0.25);
  EXPECT_EQ(back.meta.acceptance_rate, 0.8125);
  std::filesystem::remove_all(dir);
}

TEST(WriteFileAtomic, ReplacesContentsWithoutLeftovers) {
  const auto dir = temp_dir("steinthin_atomic");
  write_file_atomic(dir / "a.txt", "one");
  write_file_atomic(dir / "a.txt", "two");
  std::ifstream in(dir / "a.txt");
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "two");
  EXPECT_EQ(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator{}), 1);
  write_file_atomic(dir / "sub" / "b.txt", "x");
  EXPECT_TRUE(std::filesystem::exists(dir / "sub" / "b.txt"));
  std::filesystem::remove_all(dir);
}

TEST(FormatDouble, RoundTrips) {
  for (const double v : {0.1, 1.0 / 3.0, -2.5e-17, 12345678.9}) EXPECT_EQ(std::stod(format_double(v)), v);
}

TEST(LambdaRule, ParsesAndEvaluates) {
  EXPECT_DOUBLE_EQ(LambdaRule::parse("1/m").at(100), 0.01);
  EXPECT_DOUBLE_EQ(LambdaRule::parse("1/m^2").at(10), 0.01);
  EXPECT_DOUBLE_EQ(LambdaRule::parse("1/log(m)").at(100), 1.0 / std::log(100.0));
  EXPECT_DOUBLE_EQ(LambdaRule::parse(0.3).at(7), 0.3);
  EXPECT_THROW(LambdaRule::parse("1/sqrt(m)"), ConfigError);
  EXPECT_THROW(LambdaRule::parse(-1.0), ConfigError);
  EXPECT_EQ(LambdaRule::parse(LambdaRule::parse("1/m^2").describe()).kind, LambdaRule::Kind::InvMSquared);
}

TEST(ExperimentConfig, RejectsUnknownKeys) {
  json j = minimal_thinning();
  j["thinning"]["lamda"] = 0.1;
  try {
    parse_experiment_config(j);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("lamda"), std::string::npos) << e.what();
  }
  j = minimal_thinning();
  j["extra"] = 1;
  EXPECT_THROW(parse_experiment_config(j), ConfigError);
  j = minimal_thinning();
  j["target"]["type"] = "nope";
  EXPECT_THROW(parse_experiment_config(j), ConfigError);
  j = minimal_thinning();
  j["sampler"]["n"] = -3;
  EXPECT_THROW(parse_experiment_config(j), ConfigError);
}

TEST(ExperimentConfig, ResolvedConfigReparses) {
  const ExperimentConfig cfg = parse_experiment_config(minimal_thinning());
  EXPECT_EQ(cfg.target.dim(), 2);
  EXPECT_EQ(cfg.thinning.m_values, std::vector<std::size_t>{20});
  const ExperimentConfig again = parse_experiment_config(cfg.to_json());
  EXPECT_EQ(again.to_json(), cfg.to_json());
}

TEST(Presets, AllLoadAndResolve) {
  const auto names = preset_names();
  EXPECT_GE(names.size(), 9u);
  for (const auto& name : names) {
    const ExperimentConfig cfg = load_preset(name);
    EXPECT_EQ(cfg.name, name);
    EXPECT_NO_THROW(parse_experiment_config(cfg.to_json())) << name;
  }
  EXPECT_THROW(load_preset("no-such-preset"), ConfigError);
}

TEST(TargetConfig, ExampleMixtureMatchesSymmetricPair) {
  const TargetConfig t =
      parse_target_config(json::parse(R"({"type": "example_mixture", "d": 3, "mu": 2.0, "sigma": 0.5, "w": 0.3})"));
  const GaussianMixtureSpec expected = GaussianMixtureSpec::symmetric_pair(3, 2.0, 0.5, 0.3);
  ASSERT_TRUE(t.gaussian.has_value());
  EXPECT_EQ(t.gaussian->means, expected.means);
  EXPECT_EQ(t.gaussian->variances, expected.variances);
  EXPECT_EQ(t.gaussian->weights, expected.weights);
  EXPECT_EQ(t.centers(), expected.means);
}

TEST(Report, CsvAndStatistics) {
  const std::vector<MetricRow> rows{{"st", 2, 10, 0.5, 1, "mmd", 0.25}, {"rst", 2, 10, 0.5, 1, "mmd", 0.125}};
  EXPECT_EQ(rows_to_csv(rows), "method,d,m,eps,seed,metric,value\nst,2,10,0.5,1,mmd,0.25\nrst,2,10,0.5,1,mmd,0.125\n");
  EXPECT_DOUBLE_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_DOUBLE_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
  const MeanSd ms = mean_sd({1.0, 3.0});
  EXPECT_DOUBLE_EQ(ms.mean, 2.0);
  EXPECT_NEAR(ms.sd, std::sqrt(2.0), 1e-15);
}

TEST(Experiments, SummaryFlattensSingleSetting) {
  const std::vector<MetricRow> rows{{"st", 2, 10, 0.0, 1, "left_mode", 0.4}, {"st", 2, 10, 0.0, 2, "left_mode", 0.6}};
  const json s = summarize_rows(rows);
  EXPECT_DOUBLE_EQ(s["st_left_mode_mean"].get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(s["st_left_mode_median"].get<double>(), 0.5);
  EXPECT_EQ(s["groups"].size(), 1u);
}

TEST(Experiments, ThinningRunIsDeterministicAndThreadIndependent) {
  ExperimentConfig cfg = parse_experiment_config(minimal_thinning());
  const ExperimentOutput a = run_experiment(cfg);
  cfg.threads = 3;
  const ExperimentOutput b = run_experiment(cfg);
  EXPECT_EQ(a.metrics_csv, b.metrics_csv);
  EXPECT_EQ(a.report["summary"], b.report["summary"]);
  EXPECT_EQ(a.report["kind"], "thinning");

  const auto dir = temp_dir("steinthin_exp");
  write_experiment_output(dir, a);
  EXPECT_TRUE(std::filesystem::exists(dir / "report.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "metrics.csv"));
  EXPECT_FALSE(std::filesystem::exists(dir / "sweep.csv"));
  std::filesystem::remove_all(dir);
}
