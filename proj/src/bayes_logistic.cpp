#include "steinthin/bayes_logistic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <tuple>

#include "steinthin/parallel.hpp"
#include "steinthin/samplers.hpp"
#include "steinthin/stein_kernels.hpp"
#include "steinthin/thinning.hpp"

namespace steinthin {

namespace {

std::string trim_copy(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) {
    s.remove_suffix(1);
  }
  return std::string(s);
}

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    out.push_back(trim_copy(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> to_number(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<std::size_t> to_index(const std::string& s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::size_t resolve_column(const std::string& key, const std::vector<std::string>& header,
                           std::size_t n_cols) {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == key) return j;
  }
  if (const auto idx = to_index(key); idx && *idx < n_cols) return *idx;
  throw std::runtime_error("dataset: no column named '" + key + "'");
}

}  // namespace

Dataset load_csv_dataset(const std::filesystem::path& path, const std::string& label_column,
                         const CsvDatasetOptions& opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header;
  std::string line;
  std::vector<std::size_t> line_numbers;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim_copy(line).empty()) continue;
    auto cells = split_line(line, opts.delimiter);
    if (opts.has_header && header.empty()) {
      header = std::move(cells);
      continue;
    }
    rows.push_back(std::move(cells));
    line_numbers.push_back(line_no);
  }
  if (rows.empty()) throw std::runtime_error(path.string() + ": no data rows");
  const std::size_t n_cols = header.empty() ? rows.front().size() : header.size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != n_cols) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_numbers[i]) + ": expected " +
                               std::to_string(n_cols) + " columns");
    }
  }

  const std::size_t label_idx = resolve_column(label_column, header, n_cols);
  std::vector<bool> keep(n_cols, true);
  keep[label_idx] = false;
  for (const auto& name : opts.drop_columns) keep[resolve_column(name, header, n_cols)] = false;
  std::vector<std::size_t> feature_cols;
  for (std::size_t j = 0; j < n_cols; ++j) {
    if (keep[j]) feature_cols.push_back(j);
  }
  if (feature_cols.empty()) throw std::runtime_error("dataset: no feature columns left");

  std::map<std::string, int> distinct;
  for (const auto& r : rows) distinct.emplace(r[label_idx], 0);
  if (distinct.size() != 2) {
    throw std::runtime_error("dataset: label column must hold exactly two distinct values, found " +
                             std::to_string(distinct.size()));
  }
  const std::string first = distinct.begin()->first;
  const std::string second = std::next(distinct.begin())->first;
  std::string zero_label = first;
  const auto a = to_number(first);
  const auto b = to_number(second);
  if (a && b && *b < *a) zero_label = second;

  Dataset ds;
  ds.name = path.stem().string();
  ds.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(feature_cols.size()));
  ds.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
      const std::string& cell = rows[i][feature_cols[k]];
      const auto v = to_number(cell);
      if (!v || !std::isfinite(*v)) {
        throw std::runtime_error(path.string() + ":" + std::to_string(line_numbers[i]) +
                                 ": non-numeric feature '" + cell + "'");
      }
      ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = *v;
    }
    ds.labels[static_cast<Eigen::Index>(i)] = rows[i][label_idx] == zero_label ? 0.0 : 1.0;
  }
  ds.validate();
  return ds;
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& features) {
  if (features.rows() < 2) throw std::invalid_argument("Standardizer: need at least two rows");
  Standardizer s;
  s.mean = features.colwise().mean().transpose();
  const Eigen::MatrixXd centered = features.rowwise() - s.mean.transpose();
  s.sd = (centered.colwise().squaredNorm() / static_cast<double>(features.rows() - 1)).cwiseSqrt().transpose();
  for (Eigen::Index j = 0; j < s.sd.size(); ++j) {
    if (!(s.sd[j] > 0.0)) s.sd[j] = 1.0;
  }
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& features) const {
  if (features.cols() != mean.size()) throw std::invalid_argument("Standardizer: column count mismatch");
  return (features.rowwise() - mean.transpose()).array().rowwise() / sd.transpose().array();
}

void CvPlan::validate() const {
  if (n_folds < 2) throw std::invalid_argument("cross-validation needs at least two folds");
  if (n_repeats < 1) throw std::invalid_argument("cross-validation needs at least one repeat");
}

std::vector<Fold> stratified_folds(const Eigen::VectorXd& labels, const CvPlan& plan, int repeat) {
  plan.validate();
  const auto n_folds = static_cast<std::size_t>(plan.n_folds);
  std::vector<std::vector<Eigen::Index>> by_class(2);
  for (Eigen::Index i = 0; i < labels.size(); ++i) by_class[labels[i] > 0.5 ? 1 : 0].push_back(i);
  if (labels.size() < plan.n_folds) throw std::invalid_argument("fewer rows than folds");

  auto rng = make_rng(plan.seed, static_cast<std::uint64_t>(repeat));
  std::vector<std::vector<bool>> in_test(n_folds, std::vector<bool>(static_cast<std::size_t>(labels.size()), false));
  std::size_t slot = 0;
  for (auto& members : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    for (const Eigen::Index i : members) {
      in_test[slot % n_folds][static_cast<std::size_t>(i)] = true;
      ++slot;
    }
  }
  std::vector<Fold> folds(n_folds);
  for (std::size_t f = 0; f < n_folds; ++f) {
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
      (in_test[f][static_cast<std::size_t>(i)] ? folds[f].test : folds[f].train).push_back(i);
    }
  }
  return folds;
}

double posterior_predictive(const PointMatrix& thetas, ConstVec x_star) {
  if (thetas.rows() == 0) throw std::invalid_argument("posterior_predictive: empty parameter sample");
  if (thetas.cols() != x_star.size() + 1) {
    throw std::invalid_argument("posterior_predictive: parameters need one more entry than x");
  }
  double s = 0.0;
  for (Eigen::Index r = 0; r < thetas.rows(); ++r) {
    s += sigmoid(thetas(r, 0) + thetas.row(r).tail(x_star.size()).dot(x_star.transpose()));
  }
  return s / static_cast<double>(thetas.rows());
}

Eigen::VectorXd posterior_predictive_rows(const PointMatrix& thetas, const Eigen::MatrixXd& x_star) {
  Eigen::VectorXd out(x_star.rows());
  for (Eigen::Index i = 0; i < x_star.rows(); ++i) {
    out[i] = posterior_predictive(thetas, x_star.row(i).transpose());
  }
  return out;
}

double auc(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("auc: scores and labels differ in length");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return scores[a] < scores[b]; });
  // Midranks over tied groups.
  double pos_rank_sum = 0.0;
  double n_pos = 0.0;
  double n_neg = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] > 0.5) {
        pos_rank_sum += rank;
        n_pos += 1.0;
      } else {
        n_neg += 1.0;
      }
    }
    i = j + 1;
  }
  if (n_pos == 0.0 || n_neg == 0.0) throw std::invalid_argument("auc: both classes must be present");
  return (pos_rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

void LogisticExperimentConfig::validate() const {
  cv.validate();
  if (step_sizes.empty()) throw std::invalid_argument("logistic experiment: no step sizes");
  for (double e : step_sizes) {
    if (!(e > 0.0)) throw std::invalid_argument("logistic experiment: step sizes must be positive");
  }
  if (n_chains < 1) throw std::invalid_argument("logistic experiment: need at least one chain");
  if (chain_steps < 1) throw std::invalid_argument("logistic experiment: chains need at least one step");
  if (m_values.empty()) throw std::invalid_argument("logistic experiment: no thinning sizes");
  for (auto m : m_values) {
    if (m < 1) throw std::invalid_argument("logistic experiment: thinning sizes must be positive");
  }
}

namespace {

struct FoldRecord {
  std::string method;
  std::size_t m = 0;
  double eps = 0.0;
  double auc = 0.0;
};

struct FoldOutcome {
  std::vector<FoldRecord> records;
  std::vector<double> acceptance;  // per step size
};

}  // namespace

MetricReport run_logistic_experiment(const Dataset& data, const LogisticExperimentConfig& cfg) {
  cfg.validate();
  data.validate();
  const std::size_t n_folds = static_cast<std::size_t>(cfg.cv.n_folds);
  const std::size_t n_tasks = n_folds * static_cast<std::size_t>(cfg.cv.n_repeats);
  std::vector<std::vector<Fold>> plans;
  for (int r = 0; r < cfg.cv.n_repeats; ++r) plans.push_back(stratified_folds(data.labels, cfg.cv, r));

  std::vector<FoldOutcome> outcomes(n_tasks);
  parallel_for(n_tasks, cfg.threads, [&](std::size_t task) {
    const Fold& fold = plans[task / n_folds][task % n_folds];
    Dataset train = data.subset(fold.train);
    Dataset test = data.subset(fold.test);
    if (cfg.standardize) {
      const Standardizer st = Standardizer::fit(train.features);
      train.features = st.apply(train.features);
      test.features = st.apply(test.features);
    }
    const LogisticPosterior posterior(train, cfg.prior);
    const std::uint64_t task_seed = make_rng(cfg.cv.seed, 1000003ULL + task)();
    FoldOutcome& out = outcomes[task];
    for (std::size_t e = 0; e < cfg.step_sizes.size(); ++e) {
      const double eps = cfg.step_sizes[e];
      const auto steps = static_cast<Eigen::Index>(cfg.chain_steps);
      PointMatrix pooled(steps * cfg.n_chains, posterior.dim());
      double acc = 0.0;
      for (int c = 0; c < cfg.n_chains; ++c) {
        ChainConfig chain;
        chain.n_steps = cfg.chain_steps;
        chain.step_size = eps;
        chain.seed = task_seed + e;
        chain.stream = static_cast<std::uint64_t>(c);
        const SampleSet s = mala_sample(posterior, chain);
        pooled.middleRows(c * steps, steps) = s.points;
        acc += s.meta.acceptance_rate;
      }
      out.acceptance.push_back(acc / cfg.n_chains);
      SteinKernelParams kernel;
      kernel.ell = median_heuristic(pooled, cfg.bandwidth_cap, task_seed).ell;
      const CandidatePool pool = make_pool(posterior, std::move(pooled), kernel);
      for (const std::size_t m : cfg.m_values) {
        const double lambda = cfg.lambda > 0.0 ? cfg.lambda : 1.0 / static_cast<double>(m);
        const ThinningResult st = stein_thin(pool, m);
        const ThinningResult rst = regularized_stein_thin(pool, m, Regularization{lambda, true});
        for (const auto& [name, res] : {std::pair{"st", &st}, std::pair{"rst", &rst}}) {
          PointMatrix thetas(static_cast<Eigen::Index>(res->indices.size()), pool.dim());
          for (std::size_t k = 0; k < res->indices.size(); ++k) {
            thetas.row(static_cast<Eigen::Index>(k)) = pool.points.row(res->indices[k]);
          }
          const Eigen::VectorXd scores = posterior_predictive_rows(thetas, test.features);
          out.records.push_back({name, m, eps, auc(scores, test.labels)});
        }
      }
    }
  });

  MetricReport report;
  std::map<std::tuple<std::string, std::size_t, double>, std::vector<double>> grouped;
  for (std::size_t task = 0; task < n_tasks; ++task) {
    for (const auto& rec : outcomes[task].records) {
      report.rows.push_back({rec.method, static_cast<long>(data.dim()), static_cast<long>(rec.m), rec.eps,
                             static_cast<std::uint64_t>(task), "auc", rec.auc});
      grouped[{rec.method, rec.m, rec.eps}].push_back(rec.auc);
    }
  }

  nlohmann::json results = nlohmann::json::array();
  std::map<std::pair<std::string, std::size_t>, nlohmann::json> best;
  for (const auto& [key, values] : grouped) {
    const auto& [method, m, eps] = key;
    const MeanSd s = mean_sd(values);
    nlohmann::json entry = {{"method", method}, {"m", m}, {"eps", eps}, {"auc_mean", s.mean},
                            {"auc_sd", s.sd}, {"folds", values.size()}};
    results.push_back(entry);
    auto& b = best[{method, m}];
    if (b.is_null() || s.mean > b["auc_mean"].get<double>()) b = entry;
  }
  nlohmann::json best_json = nlohmann::json::array();
  for (const auto& [key, entry] : best) best_json.push_back(entry);

  nlohmann::json acceptance = nlohmann::json::array();
  for (std::size_t e = 0; e < cfg.step_sizes.size(); ++e) {
    double a = 0.0;
    for (const auto& o : outcomes) a += o.acceptance[e];
    acceptance.push_back({{"eps", cfg.step_sizes[e]}, {"acceptance_rate", a / static_cast<double>(n_tasks)}});
  }

  const std::size_t pooled_size = cfg.chain_steps * static_cast<std::size_t>(cfg.n_chains);
  const bool m_exceeds = std::any_of(cfg.m_values.begin(), cfg.m_values.end(),
                                     [&](std::size_t m) { return m > pooled_size; });
  report.summary = {{"dataset", data.name},
                    {"n", data.size()},
                    {"d", data.dim()},
                    {"results", results},
                    {"best", best_json},
                    {"acceptance", acceptance},
                    {"m_exceeds_chain_length", m_exceeds}};
  return report;
}

}  // namespace steinthin
