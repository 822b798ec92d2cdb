#include "steinthin/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "steinthin/diagnostics.hpp"
#include "steinthin/parallel.hpp"
#include "steinthin/sample_io.hpp"
#include "steinthin/samplers.hpp"
#include "steinthin/thinning.hpp"
#include "steinthin/types.hpp"

namespace steinthin {

using nlohmann::json;

namespace {

PointMatrix select_rows(const PointMatrix& points, const std::vector<Eigen::Index>& idx) {
  PointMatrix out(static_cast<Eigen::Index>(idx.size()), points.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = points.row(idx[k]);
  return out;
}

bool wants(const EvaluationConfig& ev, const std::string& metric) {
  return std::find(ev.metrics.begin(), ev.metrics.end(), metric) != ev.metrics.end();
}

struct ThinningContext {
  const ExperimentConfig& cfg;
  const TargetModel& model;
  Eigen::MatrixXd centers;
  std::optional<double> band;
  std::optional<MmdReference> reference;
};

std::vector<MetricRow> thinning_repeat(const ThinningContext& ctx, std::size_t repeat) {
  const ExperimentConfig& cfg = ctx.cfg;
  const std::uint64_t seed = cfg.seed + repeat;
  const long d = static_cast<long>(ctx.model.dim());
  std::vector<MetricRow> rows;

  const bool mala = cfg.sampler.type == "mala";
  const std::vector<double> eps_list = mala ? cfg.sampler.step_sizes : std::vector<double>{0.0};
  for (std::size_t e = 0; e < eps_list.size(); ++e) {
    const double eps = eps_list[e];
    SampleSet sample;
    if (mala) {
      ChainConfig chain;
      chain.n_steps = cfg.sampler.n;
      chain.step_size = eps;
      chain.init = cfg.sampler.init;
      chain.seed = seed;
      chain.stream = e;
      sample = mala_sample(ctx.model, chain);
      rows.push_back({"sampler", d, 0, eps, seed, "acceptance_rate", sample.meta.acceptance_rate});
    } else {
      sample = cfg.target.exact_sample(cfg.sampler.n, seed);
    }
    const SteinKernelParams kernel = cfg.thinning.kernel_for(sample.points, seed);
    rows.push_back({"sampler", d, 0, eps, seed, "ell", kernel.ell});
    const CandidatePool pool = make_pool(ctx.model, std::move(sample.points), kernel);

    for (const std::string& method : cfg.thinning.methods) {
      for (const std::size_t m : cfg.thinning.m_values) {
        const ThinningResult res =
            method == "st" ? stein_thin(pool, m)
                           : regularized_stein_thin(pool, m,
                                                    Regularization{cfg.thinning.lambda.at(m), cfg.thinning.laplacian});
        const long ml = static_cast<long>(m);
        const PointMatrix chosen = select_rows(pool.points, res.indices);
        if (wants(cfg.evaluation, "ksd")) rows.push_back({method, d, ml, eps, seed, "ksd2", res.ksd_trace.back()});
        if (wants(cfg.evaluation, "mode_proportions")) {
          const Eigen::VectorXd props = mode_proportions(chosen, ctx.centers);
          if (props.size() == 2) {
            rows.push_back({method, d, ml, eps, seed, "left_mode", props[0]});
          } else {
            for (Eigen::Index k = 0; k < props.size(); ++k) {
              rows.push_back({method, d, ml, eps, seed, "mode_" + std::to_string(k), props[k]});
            }
          }
        }
        if (wants(cfg.evaluation, "mmd")) {
          rows.push_back({method, d, ml, eps, seed, "mmd",
                          energy_mmd(chosen, *ctx.reference, MmdOptions{cfg.evaluation.mmd_unbiased})});
        }
        if (wants(cfg.evaluation, "saddle_band")) {
          const double h = *ctx.band;
          const auto count = (chosen.col(0).array().abs() < h).count();
          rows.push_back({method, d, ml, eps, seed, "saddle_band_count", static_cast<double>(count)});
          rows.push_back({method, d, ml, eps, seed, "saddle_band_hit", count > 0 ? 1.0 : 0.0});
        }
      }
    }
  }
  return rows;
}

ExperimentOutput run_thinning(const ExperimentConfig& cfg) {
  const auto model = cfg.target.make_model();
  ThinningContext ctx{cfg, *model, cfg.evaluation.mode_centers.value_or(cfg.target.centers()),
                      cfg.evaluation.band_half_width, std::nullopt};
  if (wants(cfg.evaluation, "saddle_band") && !ctx.band) {
    const auto pair = cfg.target.gaussian ? as_symmetric_pair(*cfg.target.gaussian) : std::nullopt;
    if (pair) ctx.band = saddle_band_half_width(pair->mu, pair->sigma);
    if (!ctx.band) {
      throw ConfigError("saddle_band needs evaluation.band_half_width for this target");
    }
  }
  if (wants(cfg.evaluation, "mmd")) {
    if (!cfg.target.has_exact_sampler()) throw ConfigError("mmd needs a target with an exact sampler");
    const std::uint64_t ref_seed = make_rng(cfg.seed, 0x6d6d64ULL)();
    ctx.reference.emplace(cfg.target.exact_sample(cfg.evaluation.mmd_reference_size, ref_seed).points);
  }

  std::vector<std::vector<MetricRow>> per_repeat(cfg.repeats);
  parallel_for(cfg.repeats, cfg.threads, [&](std::size_t r) { per_repeat[r] = thinning_repeat(ctx, r); });

  std::vector<MetricRow> rows;
  for (auto& v : per_repeat) rows.insert(rows.end(), v.begin(), v.end());
  ExperimentOutput out;
  out.report["summary"] = summarize_rows(rows);
  if (ctx.band) out.report["summary"]["saddle_band_half_width"] = *ctx.band;
  out.metrics_csv = rows_to_csv(rows);
  return out;
}

ExperimentOutput run_weight_sweep(const ExperimentConfig& cfg) {
  const GaussianMixtureSpec& gm = *cfg.target.gaussian;
  const GaussianMixture model(gm);
  const SweepConfig& sw = cfg.sweep;
  const std::size_t n_left = sw.n / 2;
  const std::size_t n_right = sw.n - n_left;

  std::vector<WeightSweepResult> sweeps(cfg.repeats);
  parallel_for(cfg.repeats, cfg.threads, [&](std::size_t r) {
    const std::uint64_t seed = cfg.seed + r;
    auto [left, right] = truncated_mode_samples(gm, n_left, n_right, sw.radius_sd, seed);
    PointMatrix all(left.rows() + right.rows(), left.cols());
    all << left, right;
    const SteinKernelParams kernel = cfg.thinning.kernel_for(all, seed);
    sweeps[r] = weight_sweep(left, right, model, sw.grid, sw.lambda, kernel);
  });

  std::vector<MetricRow> rows;
  const long d = static_cast<long>(gm.dim());
  std::vector<double> argmins, etas;
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    rows.push_back({"sweep", d, 0, 0.0, cfg.seed + r, "argmin_w", sweeps[r].argmin_w});
    rows.push_back({"sweep", d, 0, 0.0, cfg.seed + r, "eta", sweeps[r].eta_estimate});
    argmins.push_back(sweeps[r].argmin_w);
    etas.push_back(sweeps[r].eta_estimate);
  }

  auto sweep_table = [&](const std::vector<WeightSweepResult>& runs, std::ostringstream& os) {
    const std::size_t g = sw.grid.size();
    std::vector<double> means(g);
    std::vector<double> sds(g);
    for (std::size_t k = 0; k < g; ++k) {
      std::vector<double> v;
      for (const auto& s : runs) v.push_back(s.ksd_values[k]);
      const MeanSd ms = mean_sd(v);
      means[k] = ms.mean;
      sds[k] = ms.sd;
    }
    const std::size_t best = static_cast<std::size_t>(std::min_element(means.begin(), means.end()) - means.begin());
    for (std::size_t k = 0; k < g; ++k) {
      os << format_double(runs.front().lambda) << ',' << format_double(sw.grid[k]) << ',' << format_double(means[k])
         << ',' << format_double(sds[k]) << ',' << (k == best ? 1 : 0) << '\n';
    }
    return sw.grid[best];
  };

  std::ostringstream csv;
  csv << "lambda,w,ksd2_mean,ksd2_sd,is_argmin\n";
  const double argmin_of_mean = sweep_table(sweeps, csv);

  const MeanSd am = mean_sd(argmins);
  json summary = {{"argmin_w_mean", am.mean},
                  {"argmin_w_sd", am.sd},
                  {"argmin_of_mean_curve", argmin_of_mean},
                  {"eta_mean", mean_sd(etas).mean},
                  {"lambda", sw.lambda},
                  {"target_left_weight", gm.weights[0]},
                  {"grid_step", sw.grid.size() > 1 ? sw.grid[1] - sw.grid[0] : 0.0}};

  if (sw.search_count > 0) {
    const double w_p = gm.weights[0];
    double best_lambda = 0.0;
    double best_gap = std::numeric_limits<double>::infinity();
    double best_mean = 0.0;
    json search = json::array();
    const double log_lo = std::log(sw.search_lo);
    const double log_hi = std::log(sw.search_hi);
    for (std::size_t k = 0; k < sw.search_count; ++k) {
      const double t = sw.search_count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(sw.search_count - 1);
      const double lambda = std::exp(log_lo + t * (log_hi - log_lo));
      std::vector<double> a;
      for (const auto& s : sweeps) a.push_back(reweight_sweep(s, lambda).argmin_w);
      const double mean = mean_sd(a).mean;
      search.push_back({{"lambda", lambda}, {"argmin_w_mean", mean}});
      const double gap = std::abs(mean - w_p);
      if (gap < best_gap) {
        best_gap = gap;
        best_lambda = lambda;
        best_mean = mean;
      }
    }
    summary["lambda_search"] = search;
    summary["lambda_star"] = best_lambda;
    summary["argmin_w_at_lambda_star"] = best_mean;
    std::vector<WeightSweepResult> at_star;
    for (const auto& s : sweeps) at_star.push_back(reweight_sweep(s, best_lambda));
    sweep_table(at_star, csv);
  }

  ExperimentOutput out;
  out.report["summary"] = summary;
  out.metrics_csv = rows_to_csv(rows);
  out.sweep_csv = csv.str();
  return out;
}

ExperimentOutput run_bounds(const ExperimentConfig& cfg) {
  const GaussianMixtureSpec& gm = *cfg.target.gaussian;
  const GaussianMixture model(gm);
  const SampleSet base = exact_mixture_sample(gm, cfg.sampler.n, cfg.seed);
  const SteinKernelParams kernel = cfg.thinning.kernel_for(base.points, cfg.seed);
  const PathologyBounds bounds = pathology_bounds(gm, kernel, 0.0, cfg.sampler.n, cfg.seed + 1);

  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(gm.dim());
  const double diag0 = stein_kernel_diag(model.score(x0), kernel);
  const double lap0 = truncated_laplacian_log(model, x0);
  const std::size_t replicates = std::max<std::size_t>(cfg.repeats, 2);
  const long d = static_cast<long>(gm.dim());

  const auto m_hi = static_cast<std::size_t>(std::clamp(std::ceil(bounds.m_threshold) - 1.0, 2.0, 200.0));
  std::vector<std::size_t> ms;
  for (std::size_t m = 2; m <= m_hi; ++m) ms.push_back(m);
  struct Cell {
    MeanSe ksd, lksd;
  };
  std::vector<Cell> cells(ms.size());
  parallel_for(ms.size(), cfg.threads, [&](std::size_t k) {
    cells[k].ksd = iid_ksd_squared(gm, kernel, ms[k], replicates, cfg.seed + 2 + 2 * k, false);
    cells[k].lksd = iid_ksd_squared(gm, kernel, ms[k], replicates, cfg.seed + 3 + 2 * k, true);
  });

  std::vector<MetricRow> rows;
  json per_m = json::array();
  for (std::size_t k = 0; k < ms.size(); ++k) {
    const auto m = static_cast<double>(ms[k]);
    const long ml = static_cast<long>(ms[k]);
    const double conc_lksd = diag0 + lap0 / m;
    rows.push_back({"concentrated", d, ml, 0.0, cfg.seed, "ksd2", diag0});
    rows.push_back({"concentrated", d, ml, 0.0, cfg.seed, "lksd2", conc_lksd});
    rows.push_back({"iid", d, ml, 0.0, cfg.seed, "ksd2_mean", cells[k].ksd.mean});
    rows.push_back({"iid", d, ml, 0.0, cfg.seed, "ksd2_se", cells[k].ksd.se});
    rows.push_back({"iid", d, ml, 0.0, cfg.seed, "lksd2_mean", cells[k].lksd.mean});
    rows.push_back({"iid", d, ml, 0.0, cfg.seed, "lksd2_se", cells[k].lksd.se});
    per_m.push_back({{"m", ms[k]},
                     {"below_threshold", m < bounds.m_threshold},
                     {"ksd2_concentrated", diag0},
                     {"ksd2_iid_mean", cells[k].ksd.mean},
                     {"ksd2_iid_se", cells[k].ksd.se},
                     {"concentrated_beats_iid", diag0 < cells[k].ksd.mean - 3.0 * cells[k].ksd.se},
                     {"lksd2_concentrated", conc_lksd},
                     {"lksd2_iid_mean", cells[k].lksd.mean},
                     {"lksd2_iid_se", cells[k].lksd.se},
                     {"laplacian_penalizes_concentrated", conc_lksd > cells[k].lksd.mean + 3.0 * cells[k].lksd.se}});
  }
  json summary = {{"ell", kernel.ell},
                  {"m_threshold", bounds.m_threshold},
                  {"e_score_sq", bounds.e_score_sq.mean},
                  {"e_score_sq_se", bounds.e_score_sq.se},
                  {"e_lap_plus", bounds.e_lap_plus.mean},
                  {"e_lap_plus_se", bounds.e_lap_plus.se},
                  {"lap_plus_log_p_at_origin", lap0},
                  {"laplacian_condition_holds", bounds.e_score_sq.mean + bounds.e_lap_plus.mean < lap0},
                  {"per_m", per_m}};
  summary["s0_max"] = bounds.s0_max ? json(*bounds.s0_max) : json(nullptr);
  summary["z_max"] = bounds.z_max ? json(*bounds.z_max) : json(nullptr);

  ExperimentOutput out;
  out.report["summary"] = summary;
  out.metrics_csv = rows_to_csv(rows);
  return out;
}

ExperimentOutput run_logistic(const ExperimentConfig& cfg, const RunOverrides& overrides) {
  const std::string path = overrides.dataset_path.value_or(cfg.dataset.path);
  const Dataset data = load_csv_dataset(path, cfg.dataset.label_column, cfg.dataset.csv);
  const MetricReport rep = run_logistic_experiment(data, cfg.logistic);
  ExperimentOutput out;
  out.report["summary"] = rep.summary;
  out.metrics_csv = rows_to_csv(rep.rows);
  return out;
}

}  // namespace

json summarize_rows(const std::vector<MetricRow>& rows) {
  std::map<std::tuple<std::string, long, double, std::string>, std::vector<double>> groups;
  std::map<std::pair<long, double>, int> settings;
  for (const auto& r : rows) {
    groups[{r.method, r.m, r.eps, r.metric}].push_back(r.value);
    if (r.method != "sampler") settings[{r.m, r.eps}] = 1;
  }
  json stats = json::array();
  json summary = json::object();
  for (const auto& [key, values] : groups) {
    const auto& [method, m, eps, metric] = key;
    const MeanSd s = mean_sd(values);
    const double med = median(values);
    stats.push_back({{"method", method}, {"m", m}, {"eps", eps}, {"metric", metric}, {"mean", s.mean},
                     {"sd", s.sd}, {"median", med}, {"count", values.size()}});
    if (settings.size() <= 1 && (method != "sampler" || m == 0)) {
      const std::string stem = method + "_" + metric;
      summary[stem + "_mean"] = s.mean;
      summary[stem + "_sd"] = s.sd;
      summary[stem + "_median"] = med;
    }
  }
  summary["groups"] = stats;
  return summary;
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg, const RunOverrides& overrides) {
  ExperimentOutput out;
  if (cfg.kind == "thinning") {
    out = run_thinning(cfg);
  } else if (cfg.kind == "weight_sweep") {
    out = run_weight_sweep(cfg);
  } else if (cfg.kind == "bounds") {
    out = run_bounds(cfg);
  } else if (cfg.kind == "logistic") {
    out = run_logistic(cfg, overrides);
  } else {
    throw ConfigError("unknown experiment kind '" + cfg.kind + "'");
  }
  json config = cfg.to_json();
  if (overrides.dataset_path) config["dataset"]["path"] = *overrides.dataset_path;
  json report = {{"name", cfg.name}, {"kind", cfg.kind}, {"version", kVersion}, {"config", config}};
  report["summary"] = out.report["summary"];
  out.report = report;
  return out;
}

void write_experiment_output(const std::filesystem::path& out_dir, const ExperimentOutput& out) {
  std::vector<std::pair<std::filesystem::path, std::string>> files{
      {out_dir / "report.json", out.report.dump(2) + "\n"}, {out_dir / "metrics.csv", out.metrics_csv}};
  if (out.sweep_csv) files.emplace_back(out_dir / "sweep.csv", *out.sweep_csv);
  std::vector<std::filesystem::path> written;
  try {
    for (const auto& [path, contents] : files) {
      write_file_atomic(path, contents);
      written.push_back(path);
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& p : written) std::filesystem::remove(p, ec);
    throw;
  }
}

}  // namespace steinthin
