#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "oracles.hpp"
#include "steinthin/bayes_logistic.hpp"

using namespace steinthin;

namespace {

double auc_pairs(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels) {
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (labels[i] < 0.5) continue;
    for (Eigen::Index j = 0; j < scores.size(); ++j) {
      if (labels[j] > 0.5) continue;
      den += 1.0;
      if (scores[i] > scores[j]) num += 1.0;
      if (scores[i] == scores[j]) num += 0.5;
    }
  }
  return num / den;
}

std::filesystem::path write_temp(const std::string& name, const std::string& contents) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << contents;
  return path;
}

}  // namespace

TEST(Auc, MatchesPairCountOracle) {
  std::mt19937_64 rng(61);
  std::uniform_int_distribution<int> level(0, 5);
  std::bernoulli_distribution coin(0.4);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = 5 + trial;
    Eigen::VectorXd s(n);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      s[i] = level(rng) * 0.1;
      y[i] = coin(rng) ? 1.0 : 0.0;
    }
    y[0] = 0.0;
    y[1] = 1.0;
    EXPECT_NEAR(auc(s, y), auc_pairs(s, y), 1e-12);
  }
}

TEST(Auc, InvariantUnderMonotoneMapsAndFlipsUnderNegation) {
  std::mt19937_64 rng(62);
  const Eigen::VectorXd s = steinthin::testing::random_vector(rng, 40);
  Eigen::VectorXd y(40);
  for (Eigen::Index i = 0; i < 40; ++i) y[i] = i % 3 == 0 ? 1.0 : 0.0;
  const double a = auc(s, y);
  EXPECT_NEAR(auc(s.array().exp().matrix(), y), a, 1e-15);
  EXPECT_NEAR(auc(-s, y), 1.0 - a, 1e-12);
  EXPECT_DOUBLE_EQ(auc(y, y), 1.0);
  EXPECT_THROW(auc(s, Eigen::VectorXd::Zero(40)), std::invalid_argument);
}

TEST(StratifiedFolds, PartitionAndStratify) {
  Eigen::VectorXd labels(103);
  for (Eigen::Index i = 0; i < labels.size(); ++i) labels[i] = i % 4 == 0 ? 1.0 : 0.0;
  const double positives = labels.sum();
  const CvPlan plan{10, 3, 5};
  for (int repeat = 0; repeat < 3; ++repeat) {
    const auto folds = stratified_folds(labels, plan, repeat);
    ASSERT_EQ(folds.size(), 10u);
    std::multiset<Eigen::Index> seen;
    for (const auto& f : folds) {
      EXPECT_EQ(f.train.size() + f.test.size(), 103u);
      seen.insert(f.test.begin(), f.test.end());
      double pos = 0.0;
      for (const auto i : f.test) pos += labels[i];
      EXPECT_GE(pos, std::floor(positives / 10.0));
      EXPECT_LE(pos, std::ceil(positives / 10.0));
      std::set<Eigen::Index> train(f.train.begin(), f.train.end());
      for (const auto i : f.test) EXPECT_EQ(train.count(i), 0u);
    }
    ASSERT_EQ(seen.size(), 103u);
    for (Eigen::Index i = 0; i < 103; ++i) EXPECT_EQ(seen.count(i), 1u);
  }
  EXPECT_NE(stratified_folds(labels, plan, 0)[0].test, stratified_folds(labels, plan, 1)[0].test);
  EXPECT_EQ(stratified_folds(labels, plan, 2)[3].test, stratified_folds(labels, plan, 2)[3].test);
}

TEST(PosteriorPredictive, WorkedExamplesAndMonotonicity) {
  PointMatrix thetas(2, 3);
  thetas << 0.0, 0.0, 0.0, 1.0, 2.0, -1.0;
  const Eigen::Vector2d x(0.5, 1.0);
  // mean of sigmoid(0) and sigmoid(1 + 1 - 1)
  EXPECT_NEAR(posterior_predictive(thetas, x), 0.5 * (0.5 + 1.0 / (1.0 + std::exp(-1.0))), 1e-15);

  PointMatrix single(1, 2);
  single << -0.5, 2.0;
  double prev = 0.0;
  for (double v = -3.0; v <= 3.0; v += 0.5) {
    const double p = posterior_predictive(single, Eigen::VectorXd::Constant(1, v));
    EXPECT_GT(p, prev);
    prev = p;
  }
  Eigen::MatrixXd xs(2, 2);
  xs << 0.5, 1.0, -1.0, 0.0;
  const Eigen::VectorXd rows = posterior_predictive_rows(thetas, xs);
  EXPECT_NEAR(rows[0], posterior_predictive(thetas, xs.row(0).transpose()), 1e-15);
  EXPECT_NEAR(rows[1], posterior_predictive(thetas, xs.row(1).transpose()), 1e-15);
  EXPECT_THROW(posterior_predictive(thetas, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST(Standardizer, CentersAndScales) {
  Eigen::MatrixXd x(4, 2);
  x << 1.0, 5.0, 2.0, 5.0, 3.0, 5.0, 4.0, 5.0;
  const Standardizer s = Standardizer::fit(x);
  const Eigen::MatrixXd z = s.apply(x);
  EXPECT_NEAR(z.col(0).mean(), 0.0, 1e-15);
  EXPECT_NEAR(z.col(0).squaredNorm() / 3.0, 1.0, 1e-12);
  EXPECT_EQ(s.sd[1], 1.0);
  EXPECT_NEAR(z.col(1).cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(LoadCsvDataset, ParsesHeaderLabelsAndDrops) {
  const auto path = write_temp("steinthin_ds.csv", "id,a,b,target\n1,0.5,1.5,M\n2,1.0,-2,B\n3,2.5,0,M\n");
  CsvDatasetOptions opts;
  opts.drop_columns = {"id"};
  const Dataset ds = load_csv_dataset(path, "target", opts);
  ASSERT_EQ(ds.size(), 3);
  ASSERT_EQ(ds.dim(), 2);
  EXPECT_EQ(ds.labels[0], 1.0);
  EXPECT_EQ(ds.labels[1], 0.0);
  EXPECT_EQ(ds.features(1, 1), -2.0);
  const Dataset by_index = load_csv_dataset(path, "3", opts);
  EXPECT_EQ(by_index.labels, ds.labels);
  std::filesystem::remove(path);
}

TEST(LoadCsvDataset, NumericLabelsMapSmallerToZero) {
  const auto path = write_temp("steinthin_ds2.csv", "x,y\n1,4\n2,-1\n3,4\n");
  const Dataset ds = load_csv_dataset(path, "y");
  EXPECT_EQ(ds.labels, Eigen::Vector3d(1.0, 0.0, 1.0));
  std::filesystem::remove(path);
}

TEST(LoadCsvDataset, RejectsMalformedFiles) {
  const auto three = write_temp("steinthin_ds3.csv", "x,y\n1,0\n2,1\n3,2\n");
  EXPECT_THROW(load_csv_dataset(three, "y"), std::runtime_error);
  const auto ragged = write_temp("steinthin_ds4.csv", "x,y\n1,0\n2\n");
  EXPECT_THROW(load_csv_dataset(ragged, "y"), std::runtime_error);
  const auto text = write_temp("steinthin_ds5.csv", "x,y\nabc,0\n2,1\n");
  EXPECT_THROW(load_csv_dataset(text, "y"), std::runtime_error);
  EXPECT_THROW(load_csv_dataset(three, "missing"), std::runtime_error);
  for (const auto& p : {three, ragged, text}) std::filesystem::remove(p);
}

TEST(RunLogisticExperiment, SmallSyntheticProblem) {
  std::mt19937_64 rng(63);
  Dataset data;
  data.name = "synthetic";
  data.features = Eigen::MatrixXd(80, 2);
  data.labels = Eigen::VectorXd(80);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (Eigen::Index i = 0; i < 80; ++i) {
    data.features.row(i) = steinthin::testing::random_vector(rng, 2).transpose();
    const double p = sigmoid(2.0 * data.features(i, 0) - data.features(i, 1));
    data.labels[i] = u(rng) < p ? 1.0 : 0.0;
  }
  LogisticExperimentConfig cfg;
  cfg.cv = CvPlan{4, 1, 2};
  cfg.step_sizes = {0.1};
  cfg.n_chains = 2;
  cfg.chain_steps = 300;
  cfg.m_values = {20};
  const MetricReport rep = run_logistic_experiment(data, cfg);
  EXPECT_EQ(rep.rows.size(), 8u);
  for (const auto& r : rep.rows) {
    EXPECT_EQ(r.metric, "auc");
    EXPECT_GT(r.value, 0.6);
    EXPECT_LE(r.value, 1.0);
  }
  EXPECT_TRUE(rep.summary.contains("best"));
  const MetricReport again = run_logistic_experiment(data, cfg);
  for (std::size_t k = 0; k < rep.rows.size(); ++k) EXPECT_EQ(rep.rows[k].value, again.rows[k].value);
}
