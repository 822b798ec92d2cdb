#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "steinthin/report.hpp"
#include "steinthin/target_models.hpp"
#include "steinthin/types.hpp"

namespace steinthin {

struct CsvDatasetOptions {
  bool has_header = true;
  char delimiter = ',';
  /// Columns dropped before parsing (header names, or 0-based indices as text).
  std::vector<std::string> drop_columns;
};

/// Reads a numeric CSV. `label_column` is a header name or a 0-based index.
/// The label column must hold exactly two distinct values; the smaller one
/// (numerically, or lexicographically for text labels) maps to 0.
Dataset load_csv_dataset(const std::filesystem::path& path, const std::string& label_column,
                         const CsvDatasetOptions& opts = {});

/// Per-column affine map fitted on one matrix and applied to others.
/// Constant columns keep unit scale.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;

  static Standardizer fit(const Eigen::MatrixXd& features);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& features) const;
};

struct CvPlan {
  int n_folds = 10;
  int n_repeats = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Fold {
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> test;
};

/// Stratified folds for one repetition: within each class the shuffled
/// indices are dealt round-robin, so every fold holds floor or ceil of the
/// class count over n_folds.
std::vector<Fold> stratified_folds(const Eigen::VectorXd& labels, const CvPlan& plan, int repeat);

/// Mean over the rows theta = (beta_0, beta) of sigmoid(beta_0 + beta . x).
double posterior_predictive(const PointMatrix& thetas, ConstVec x_star);
/// posterior_predictive for every row of `x_star`.
Eigen::VectorXd posterior_predictive_rows(const PointMatrix& thetas, const Eigen::MatrixXd& x_star);

/// Area under the ROC curve as the Mann-Whitney statistic; tied pairs count 1/2.
double auc(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels);

struct LogisticExperimentConfig {
  CvPlan cv;
  std::vector<double> step_sizes{0.01, 0.02, 0.04, 0.08};
  int n_chains = 4;
  std::size_t chain_steps = 10000;
  std::vector<std::size_t> m_values{300};
  /// Entropic weight; <= 0 selects the default 1/m.
  double lambda = 0.0;
  bool standardize = true;
  LogisticPrior prior;
  /// Cap on points used by the median heuristic.
  std::size_t bandwidth_cap = 1000;
  unsigned threads = 1;

  void validate() const;
};

/// Cross-validated AUC of posterior-predictive scores from ST- and
/// RST-thinned MALA output. Rows carry per-fold AUCs (metric "auc", seed =
/// repeat * n_folds + fold); the summary holds mean/sd per (method, m, eps),
/// the best step size per (method, m), and the mean acceptance rate.
MetricReport run_logistic_experiment(const Dataset& data, const LogisticExperimentConfig& cfg);

}  // namespace steinthin
