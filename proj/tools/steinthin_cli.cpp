// Command-line front end: sample, thin, eval, experiment, logistic.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "steinthin/config.hpp"
#include "steinthin/diagnostics.hpp"
#include "steinthin/experiments.hpp"
#include "steinthin/sample_io.hpp"
#include "steinthin/samplers.hpp"
#include "steinthin/thinning.hpp"
#include "steinthin/types.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace steinthin;

namespace {

struct CommonOptions {
  std::string config;
  std::string preset;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "Experiment config (JSON)");
  cmd->add_option("--preset", o.preset, "Bundled preset name");
  cmd->add_option("--out-dir", o.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Override the config seed");
  cmd->add_option("--threads", o.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
}

ExperimentConfig resolve_config(const CommonOptions& o) {
  if (!o.config.empty() && !o.preset.empty()) throw ConfigError("give either --config or --preset, not both");
  if (o.config.empty() && o.preset.empty()) throw ConfigError("one of --config or --preset is required");
  ExperimentConfig cfg = o.config.empty() ? load_preset(o.preset) : load_experiment_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  cfg.threads = o.threads;
  cfg.logistic.threads = o.threads;
  cfg.logistic.cv.seed = cfg.seed;
  return cfg;
}

std::vector<Eigen::Index> read_indices(const fs::path& path) {
  const PointMatrix m = read_points_csv(path, CsvOptions{true});
  if (m.cols() != 1) throw std::runtime_error(path.string() + ": expected a single index column");
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < m.rows(); ++i) idx.push_back(static_cast<Eigen::Index>(m(i, 0)));
  return idx;
}

int cmd_sample(const CommonOptions& o, const std::string& out_file, bool header) {
  const ExperimentConfig cfg = resolve_config(o);
  SampleSet s;
  if (cfg.sampler.type == "mala") {
    const auto model = cfg.target.make_model();
    ChainConfig chain;
    chain.n_steps = cfg.sampler.n;
    chain.step_size = cfg.sampler.step_sizes.front();
    chain.init = cfg.sampler.init;
    chain.seed = cfg.seed;
    s = mala_sample(*model, chain);
  } else {
    s = cfg.target.exact_sample(cfg.sampler.n, cfg.seed);
  }
  const fs::path out = out_file.empty() ? fs::path(o.out_dir) / "sample.csv" : fs::path(out_file);
  write_sample_set(out, s, CsvOptions{header});
  std::cout << "wrote " << s.size() << " points to " << out.string();
  if (s.meta.sampler == "mala") std::cout << " (acceptance rate " << s.meta.acceptance_rate << ")";
  std::cout << "\n";
  return 0;
}

int cmd_thin(const CommonOptions& o, const std::string& input, bool header, std::string method,
             std::optional<std::size_t> m_opt, std::optional<double> lambda_opt) {
  const ExperimentConfig cfg = resolve_config(o);
  const auto model = cfg.target.make_model();
  PointMatrix points = read_points_csv(input, CsvOptions{header});
  if (points.cols() != model->dim()) {
    throw std::runtime_error("sample has " + std::to_string(points.cols()) + " columns but the target has dimension " +
                             std::to_string(model->dim()));
  }
  if (method.empty()) method = cfg.thinning.methods.front();
  if (method != "st" && method != "rst") throw ConfigError("--method must be st or rst");
  const std::size_t m = m_opt.value_or(cfg.thinning.m_values.front());
  const SteinKernelParams kernel = cfg.thinning.kernel_for(points, cfg.seed);
  const CandidatePool pool = make_pool(*model, std::move(points), kernel);
  if (pool.invalid_count() > 0) {
    std::cerr << "warning: " << pool.invalid_count() << " candidate rows with non-finite values are excluded\n";
  }
  ThinningOptions topts{o.threads};
  double lambda = 0.0;
  ThinningResult res;
  if (method == "st") {
    res = stein_thin(pool, m, topts);
  } else {
    lambda = lambda_opt.value_or(cfg.thinning.lambda.at(m));
    res = regularized_stein_thin(pool, m, Regularization{lambda, cfg.thinning.laplacian}, topts);
  }

  const fs::path dir(o.out_dir);
  std::ostringstream idx;
  idx << "index\n";
  for (const auto i : res.indices) idx << i << "\n";
  std::ostringstream trace;
  trace << "t,objective,ksd2\n";
  for (std::size_t t = 0; t < res.indices.size(); ++t) {
    trace << t + 1 << ',' << format_double(res.objective_trace[t]) << ',' << format_double(res.ksd_trace[t]) << "\n";
  }
  const json meta = {{"version", kVersion},     {"input", input},       {"method", method}, {"m", m},
                     {"lambda", lambda},        {"laplacian", method == "rst" && cfg.thinning.laplacian},
                     {"ell", kernel.ell},       {"beta", kernel.beta},  {"masked", res.masked},
                     {"config", cfg.to_json()}, {"ksd2", res.ksd_trace.back()}};
  std::vector<fs::path> written;
  try {
    write_file_atomic(dir / "indices.csv", idx.str());
    written.push_back(dir / "indices.csv");
    write_file_atomic(dir / "trace.csv", trace.str());
    written.push_back(dir / "trace.csv");
    write_file_atomic(dir / "thin.json", meta.dump(2) + "\n");
  } catch (...) {
    std::error_code ec;
    for (const auto& p : written) fs::remove(p, ec);
    throw;
  }
  std::cout << method << ": selected " << m << " of " << pool.size() << " points, KSD^2 = "
            << format_double(res.ksd_trace.back()) << "\n";
  return 0;
}

int cmd_eval(const CommonOptions& o, const std::string& input, bool header, const std::string& indices_file,
             std::optional<double> ell_opt) {
  const ExperimentConfig cfg = resolve_config(o);
  const auto model = cfg.target.make_model();
  PointMatrix points = read_points_csv(input, CsvOptions{header});
  if (points.cols() != model->dim()) throw std::runtime_error("sample dimension does not match the target");
  std::vector<Eigen::Index> idx;
  if (!indices_file.empty()) {
    idx = read_indices(indices_file);
  } else {
    for (Eigen::Index i = 0; i < points.rows(); ++i) idx.push_back(i);
  }
  SteinKernelParams kernel;
  kernel.beta = cfg.thinning.beta;
  kernel.ell = ell_opt ? *ell_opt : cfg.thinning.kernel_for(points, cfg.seed).ell;
  const CandidatePool pool = make_pool(*model, std::move(points), kernel);
  PointMatrix chosen(static_cast<Eigen::Index>(idx.size()), pool.dim());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] < 0 || idx[k] >= pool.size()) throw std::runtime_error("index out of range in " + indices_file);
    chosen.row(static_cast<Eigen::Index>(k)) = pool.points.row(idx[k]);
  }

  json out = {{"version", kVersion}, {"input", input}, {"m", idx.size()}, {"ell", kernel.ell}};
  out["ksd2"] = ksd_squared(pool, idx);
  out["l_ksd2"] = l_ksd_squared(pool, idx);
  const Eigen::VectorXd props = mode_proportions(chosen, cfg.evaluation.mode_centers.value_or(cfg.target.centers()));
  out["mode_proportions"] = std::vector<double>(props.data(), props.data() + props.size());
  if (cfg.target.has_exact_sampler()) {
    const std::uint64_t ref_seed = make_rng(cfg.seed, 0x6d6d64ULL)();
    const MmdReference ref(cfg.target.exact_sample(cfg.evaluation.mmd_reference_size, ref_seed).points);
    out["mmd"] = energy_mmd(chosen, ref, MmdOptions{cfg.evaluation.mmd_unbiased});
  }
  write_file_atomic(fs::path(o.out_dir) / "eval.json", out.dump(2) + "\n");
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_experiment(const CommonOptions& o, std::optional<std::size_t> repeats, const std::string& data) {
  ExperimentConfig cfg = resolve_config(o);
  if (repeats) cfg.repeats = *repeats;
  RunOverrides ov;
  if (!data.empty()) ov.dataset_path = data;
  const ExperimentOutput out = run_experiment(cfg, ov);
  write_experiment_output(o.out_dir, out);
  std::cout << "wrote report.json and metrics.csv" << (out.sweep_csv ? " and sweep.csv" : "") << " to "
            << o.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stein thinning and regularized Stein thinning of MCMC output"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(0, 1);
  bool list_presets = false;
  app.add_flag("--list-presets", list_presets, "Print the bundled preset names");

  CommonOptions common;
  bool header = false;

  auto* sample = app.add_subcommand("sample", "Draw exact or MALA samples and write them as CSV");
  add_common(sample, common);
  std::string sample_out;
  sample->add_option("--out", sample_out, "Output CSV (default <out-dir>/sample.csv)");
  sample->add_flag("--header", header, "Write a header row");

  auto* thin = app.add_subcommand("thin", "Thin a sample CSV with ST or RST");
  add_common(thin, common);
  std::string input;
  std::string method;
  std::optional<std::size_t> m_opt;
  std::optional<double> lambda_opt;
  thin->add_option("--input", input, "Sample CSV")->required()->check(CLI::ExistingFile);
  thin->add_option("--method", method, "st or rst (default: first configured method)");
  thin->add_option("--m", m_opt, "Thinning size")->check(CLI::PositiveNumber);
  thin->add_option("--lambda", lambda_opt, "Entropic weight for rst (default: config rule)");
  thin->add_flag("--header", header, "Input CSV has a header row");

  auto* eval = app.add_subcommand("eval", "Score a sample or a thinned subset of it");
  add_common(eval, common);
  std::string indices;
  std::optional<double> ell_opt;
  eval->add_option("--input", input, "Sample CSV")->required()->check(CLI::ExistingFile);
  eval->add_option("--indices", indices, "indices.csv from thin (default: all rows)");
  eval->add_option("--ell", ell_opt, "Kernel bandwidth (default: config rule)");
  eval->add_flag("--header", header, "Input CSV has a header row");

  auto* experiment = app.add_subcommand("experiment", "Run a configured experiment over its repeats");
  add_common(experiment, common);
  std::optional<std::size_t> repeats;
  std::string data;
  experiment->add_option("--repeats", repeats, "Override the number of repeats")->check(CLI::PositiveNumber);
  experiment->add_option("--data", data, "Dataset CSV for logistic experiments");

  auto* logistic = app.add_subcommand("logistic", "Cross-validated Bayesian logistic regression experiment");
  add_common(logistic, common);
  logistic->add_option("--data", data, "Dataset CSV (overrides the config path)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_presets) {
      for (const auto& name : preset_names()) std::cout << name << "\n";
      return 0;
    }
    if (sample->parsed()) return cmd_sample(common, sample_out, header);
    if (thin->parsed()) return cmd_thin(common, input, header, method, m_opt, lambda_opt);
    if (eval->parsed()) return cmd_eval(common, input, header, indices, ell_opt);
    if (experiment->parsed()) return cmd_experiment(common, repeats, data);
    if (logistic->parsed()) {
      if (common.config.empty() && common.preset.empty()) common.preset = "table1-logistic";
      const ExperimentConfig cfg = resolve_config(common);
      if (cfg.kind != "logistic") throw ConfigError("the logistic subcommand needs a config of kind 'logistic'");
      return cmd_experiment(common, std::nullopt, data);
    }
    std::cout << app.help();
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
