#include "steinthin/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "steinthin/diagnostics.hpp"

namespace steinthin {

using nlohmann::json;

namespace {

/// Reads keys from one JSON object and rejects whatever was not read.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw ConfigError(where() + " is missing '" + key + "'");
    return j_.at(key);
  }

  template <typename T>
  T get(const std::string& key) {
    return convert<T>(at(key), key);
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    return convert<T>(j_.at(key), key);
  }

  const json* maybe(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown key '" + child(key) + "'");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "config" : "'" + path_ + "'"; }

  template <typename T>
  T convert(const json& v, const std::string& key) const {
    try {
      if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
        if (v.is_number_integer() && v.get<long long>() < 0) throw ConfigError("negative");
        if (!v.is_number_integer()) throw ConfigError("not an integer");
      }
      return v.get<T>();
    } catch (const std::exception&) {
      throw ConfigError("'" + child(key) + "' has the wrong type or value: " + v.dump());
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& name) {
  if (!j.is_array() || j.empty()) throw ConfigError("'" + name + "' must be a nonempty array of rows");
  const std::size_t cols = j.at(0).is_array() ? j.at(0).size() : 0;
  if (cols == 0) throw ConfigError("'" + name + "' must be a nonempty array of rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j.at(i).is_array() || j.at(i).size() != cols) throw ConfigError("'" + name + "' has ragged rows");
    for (std::size_t k = 0; k < cols; ++k) {
      if (!j.at(i).at(k).is_number()) throw ConfigError("'" + name + "' must hold numbers");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j.at(i).at(k).get<double>();
    }
  }
  return m;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& name) {
  if (!j.is_array() || j.empty()) throw ConfigError("'" + name + "' must be a nonempty array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j.at(i).is_number()) throw ConfigError("'" + name + "' must hold numbers");
    v[static_cast<Eigen::Index>(i)] = j.at(i).get<double>();
  }
  return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

json vector_to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

template <typename Fn>
auto rethrow_as_config(const std::string& what, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

}  // namespace

double LambdaRule::at(std::size_t m) const {
  if (m == 0) throw std::invalid_argument("lambda rule: m must be positive");
  const auto dm = static_cast<double>(m);
  switch (kind) {
    case Kind::Constant:
      return value;
    case Kind::InvM:
      return 1.0 / dm;
    case Kind::InvMSquared:
      return 1.0 / (dm * dm);
    case Kind::InvLogM:
      if (m < 2) throw std::invalid_argument("lambda rule 1/log(m) needs m >= 2");
      return 1.0 / std::log(dm);
  }
  return 0.0;
}

std::string LambdaRule::describe() const {
  switch (kind) {
    case Kind::Constant: {
      std::ostringstream os;
      os << value;
      return os.str();
    }
    case Kind::InvM:
      return "1/m";
    case Kind::InvMSquared:
      return "1/m^2";
    case Kind::InvLogM:
      return "1/log(m)";
  }
  return "";
}

LambdaRule LambdaRule::parse(const json& j) {
  LambdaRule r;
  if (j.is_number()) {
    r.kind = Kind::Constant;
    r.value = j.get<double>();
    if (!(r.value >= 0.0) || !std::isfinite(r.value)) throw ConfigError("lambda must be finite and nonnegative");
    return r;
  }
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "1/m") return r;
    if (s == "1/m^2") {
      r.kind = Kind::InvMSquared;
      return r;
    }
    if (s == "1/log(m)") {
      r.kind = Kind::InvLogM;
      return r;
    }
  }
  throw ConfigError("lambda must be a number or one of \"1/m\", \"1/m^2\", \"1/log(m)\"; got " + j.dump());
}

std::unique_ptr<TargetModel> TargetConfig::make_model() const {
  if (gaussian) return std::make_unique<GaussianMixture>(*gaussian);
  if (banana) return std::make_unique<BananaTMixture>(*banana);
  throw ConfigError("target '" + type + "' has no model");
}

Eigen::Index TargetConfig::dim() const {
  if (gaussian) return gaussian->dim();
  if (banana) return banana->dim;
  return 0;
}

Eigen::MatrixXd TargetConfig::centers() const {
  if (gaussian) return gaussian->means;
  if (banana) {
    Eigen::MatrixXd c(static_cast<Eigen::Index>(banana->centers.size()), banana->dim);
    for (std::size_t k = 0; k < banana->centers.size(); ++k) {
      c.row(static_cast<Eigen::Index>(k)) = banana->centers[k].transpose();
      c(static_cast<Eigen::Index>(k), 1) -= 100.0 * banana->b;  // image of the t mode under the shear
    }
    return c;
  }
  throw ConfigError("target '" + type + "' has no centers");
}

SampleSet TargetConfig::exact_sample(std::size_t n, std::uint64_t seed) const {
  if (gaussian) return exact_mixture_sample(*gaussian, n, seed);
  if (banana) return exact_mixture_sample(*banana, n, seed);
  throw ConfigError("target '" + type + "' has no exact sampler");
}

json TargetConfig::to_json() const {
  // Resolved form: named Gaussian families are written out as explicit mixtures.
  json j = {{"type", gaussian ? std::string("gaussian_mixture") : type}};
  if (gaussian) {
    j["means"] = matrix_to_json(gaussian->means);
    j["variances"] = matrix_to_json(gaussian->variances);
    j["weights"] = vector_to_json(gaussian->weights);
  }
  if (banana) {
    j["d"] = banana->dim;
    j["b"] = banana->b;
    j["dof"] = banana->dof;
    j["scale_first"] = banana->scale_first;
    json centers = json::array();
    for (const auto& c : banana->centers) centers.push_back(vector_to_json(c));
    j["centers"] = centers;
    j["weights"] = vector_to_json(banana->weights);
  }
  return j;
}

TargetConfig parse_target_config(const json& j) {
  Section s(j, "target");
  TargetConfig t;
  t.type = s.get<std::string>("type");
  if (t.type == "gaussian_mixture") {
    const Eigen::MatrixXd means = matrix_from_json(s.at("means"), "target.means");
    const json& var = s.at("variances");
    const Eigen::VectorXd weights = vector_from_json(s.at("weights"), "target.weights");
    t.gaussian = rethrow_as_config("target", [&] {
      GaussianMixtureSpec spec;
      if (var.is_array() && !var.empty() && var.at(0).is_array()) {
        spec.means = means;
        spec.variances = matrix_from_json(var, "target.variances");
        spec.weights = weights;
      } else {
        spec = GaussianMixtureSpec::isotropic(means, vector_from_json(var, "target.variances"), weights);
      }
      spec.validate();
      return spec;
    });
  } else if (t.type == "example_mixture") {
    const auto d = s.get<Eigen::Index>("d", 2);
    const double mu = s.get<double>("mu", 3.0);
    const double sigma = s.get<double>("sigma", 1.0);
    const double w = s.get<double>("w", 0.2);
    t.gaussian = rethrow_as_config("target", [&] { return GaussianMixtureSpec::symmetric_pair(d, mu, sigma, w); });
  } else if (t.type == "standard_normal") {
    const auto d = s.get<Eigen::Index>("d", 1);
    t.gaussian = rethrow_as_config("target", [&] { return GaussianMixtureSpec::standard_normal(d); });
  } else if (t.type == "banana_t_mixture") {
    const auto d = s.get<Eigen::Index>("d", 2);
    BananaTMixtureSpec spec = rethrow_as_config("target", [&] { return BananaTMixtureSpec::two_bananas(d); });
    spec.b = s.get<double>("b", spec.b);
    spec.dof = s.get<double>("dof", spec.dof);
    spec.scale_first = s.get<double>("scale_first", spec.scale_first);
    if (const json* c = s.maybe("centers")) {
      const Eigen::MatrixXd centers = matrix_from_json(*c, "target.centers");
      spec.centers.clear();
      for (Eigen::Index k = 0; k < centers.rows(); ++k) spec.centers.push_back(centers.row(k).transpose());
    }
    if (const json* w = s.maybe("weights")) spec.weights = vector_from_json(*w, "target.weights");
    rethrow_as_config("target", [&] {
      spec.validate();
      return 0;
    });
    t.banana = spec;
  } else {
    throw ConfigError("unknown target type '" + t.type +
                      "' (expected gaussian_mixture, example_mixture, banana_t_mixture, standard_normal)");
  }
  s.finish();
  return t;
}

json SamplerConfig::to_json() const {
  json j = {{"type", type}, {"n", n}};
  if (type == "mala") {
    j["step_sizes"] = step_sizes;
    if (init.size() > 0) j["init"] = vector_to_json(init);
  }
  return j;
}

SteinKernelParams ThinningConfig::kernel_for(const PointMatrix& points, std::uint64_t seed) const {
  SteinKernelParams k;
  k.beta = beta;
  k.ell = fixed_ell ? *fixed_ell : median_heuristic(points, bandwidth_cap, seed).ell;
  k.validate_closed_form();
  return k;
}

json ThinningConfig::to_json() const {
  json j = {{"methods", methods},     {"m", m_values},         {"lambda", lambda.describe()},
            {"laplacian", laplacian}, {"beta", beta},          {"bandwidth_cap", bandwidth_cap}};
  if (lambda.kind == LambdaRule::Kind::Constant) j["lambda"] = lambda.value;
  j["ell"] = fixed_ell ? json(*fixed_ell) : json("median");
  return j;
}

json EvaluationConfig::to_json() const {
  json j = {{"metrics", metrics}, {"mmd_reference_size", mmd_reference_size}, {"mmd_unbiased", mmd_unbiased}};
  if (mode_centers) j["mode_centers"] = matrix_to_json(*mode_centers);
  if (band_half_width) j["band_half_width"] = *band_half_width;
  return j;
}

json SweepConfig::to_json() const {
  return {{"grid", grid},
          {"n", n},
          {"radius_sd", radius_sd},
          {"lambda", lambda},
          {"lambda_search", {{"lo", search_lo}, {"hi", search_hi}, {"count", search_count}}}};
}

json DatasetConfig::to_json() const {
  return {{"path", path},
          {"label_column", label_column},
          {"has_header", csv.has_header},
          {"drop_columns", csv.drop_columns}};
}

namespace {

SamplerConfig parse_sampler(const json& j) {
  Section s(j, "sampler");
  SamplerConfig c;
  c.type = s.get<std::string>("type", c.type);
  if (c.type != "exact" && c.type != "mala") throw ConfigError("sampler.type must be 'exact' or 'mala'");
  c.n = s.get<std::size_t>("n", c.n);
  if (c.n < 1) throw ConfigError("sampler.n must be positive");
  if (const json* e = s.maybe("step_size")) {
    if (!e->is_number()) throw ConfigError("sampler.step_size must be a number");
    c.step_sizes = {e->get<double>()};
  }
  if (const json* e = s.maybe("step_sizes")) {
    const Eigen::VectorXd v = vector_from_json(*e, "sampler.step_sizes");
    c.step_sizes.assign(v.data(), v.data() + v.size());
  }
  for (double e : c.step_sizes) {
    if (!(e > 0.0)) throw ConfigError("sampler step sizes must be positive");
  }
  if (const json* i = s.maybe("init")) c.init = vector_from_json(*i, "sampler.init");
  s.finish();
  return c;
}

ThinningConfig parse_thinning(const json& j) {
  Section s(j, "thinning");
  ThinningConfig c;
  c.methods = s.get<std::vector<std::string>>("methods", c.methods);
  if (c.methods.empty()) throw ConfigError("thinning.methods is empty");
  for (const auto& m : c.methods) {
    if (m != "st" && m != "rst") throw ConfigError("thinning.methods entries must be 'st' or 'rst'");
  }
  if (const json* m = s.maybe("m")) {
    if (m->is_array()) {
      c.m_values = s.get<std::vector<std::size_t>>("m");
    } else {
      c.m_values = {s.get<std::size_t>("m")};
    }
  }
  if (c.m_values.empty()) throw ConfigError("thinning.m is empty");
  for (auto m : c.m_values) {
    if (m < 1) throw ConfigError("thinning.m entries must be positive");
  }
  if (const json* l = s.maybe("lambda")) c.lambda = LambdaRule::parse(*l);
  c.laplacian = s.get<bool>("laplacian", c.laplacian);
  c.beta = s.get<double>("beta", c.beta);
  if (const json* e = s.maybe("ell")) {
    if (e->is_number()) {
      c.fixed_ell = e->get<double>();
    } else if (!(e->is_string() && e->get<std::string>() == "median")) {
      throw ConfigError("thinning.ell must be a positive number or \"median\"");
    }
  }
  c.bandwidth_cap = s.get<std::size_t>("bandwidth_cap", c.bandwidth_cap);
  rethrow_as_config("thinning", [&] {
    SteinKernelParams k;
    k.beta = c.beta;
    k.ell = c.fixed_ell.value_or(1.0);
    k.validate_closed_form();
    return 0;
  });
  if (c.bandwidth_cap < 2) throw ConfigError("thinning.bandwidth_cap must be at least 2");
  s.finish();
  return c;
}

EvaluationConfig parse_evaluation(const json& j) {
  Section s(j, "evaluation");
  EvaluationConfig c;
  c.metrics = s.get<std::vector<std::string>>("metrics", c.metrics);
  for (const auto& m : c.metrics) {
    if (m != "ksd" && m != "mode_proportions" && m != "mmd" && m != "saddle_band") {
      throw ConfigError("unknown metric '" + m + "' (expected ksd, mode_proportions, mmd, saddle_band)");
    }
  }
  c.mmd_reference_size = s.get<std::size_t>("mmd_reference_size", c.mmd_reference_size);
  c.mmd_unbiased = s.get<bool>("mmd_unbiased", c.mmd_unbiased);
  if (const json* m = s.maybe("mode_centers")) c.mode_centers = matrix_from_json(*m, "evaluation.mode_centers");
  if (const json* b = s.maybe("band_half_width")) {
    if (!b->is_number() || !(b->get<double>() > 0.0)) throw ConfigError("evaluation.band_half_width must be positive");
    c.band_half_width = b->get<double>();
  }
  s.finish();
  return c;
}

SweepConfig parse_sweep(const json& j) {
  Section s(j, "sweep");
  SweepConfig c;
  const json& g = s.at("grid");
  if (g.is_array()) {
    const Eigen::VectorXd v = vector_from_json(g, "sweep.grid");
    c.grid.assign(v.data(), v.data() + v.size());
  } else {
    Section gs(g, "sweep.grid");
    c.grid = rethrow_as_config("sweep.grid", [&] {
      return linear_grid(gs.get<double>("lo"), gs.get<double>("hi"), gs.get<double>("step"));
    });
    gs.finish();
  }
  c.n = s.get<std::size_t>("n", c.n);
  if (c.n < 2) throw ConfigError("sweep.n must be at least 2");
  c.radius_sd = s.get<double>("radius_sd", c.radius_sd);
  c.lambda = s.get<double>("lambda", c.lambda);
  if (const json* ls = s.maybe("lambda_search")) {
    Section l(*ls, "sweep.lambda_search");
    c.search_lo = l.get<double>("lo", c.search_lo);
    c.search_hi = l.get<double>("hi", c.search_hi);
    c.search_count = l.get<std::size_t>("count", std::size_t{41});
    l.finish();
    if (!(c.search_lo > 0.0) || !(c.search_hi > c.search_lo)) {
      throw ConfigError("sweep.lambda_search needs 0 < lo < hi");
    }
  }
  s.finish();
  return c;
}

DatasetConfig parse_dataset(const json& j) {
  Section s(j, "dataset");
  DatasetConfig c;
  c.path = s.get<std::string>("path");
  const json& label = s.at("label_column");
  c.label_column = label.is_number_integer() ? std::to_string(label.get<long>()) : label.get<std::string>();
  c.csv.has_header = s.get<bool>("has_header", c.csv.has_header);
  c.csv.drop_columns = s.get<std::vector<std::string>>("drop_columns", {});
  s.finish();
  return c;
}

LogisticExperimentConfig parse_logistic(const json& j) {
  Section s(j, "logistic");
  LogisticExperimentConfig c;
  c.cv.n_folds = s.get<int>("folds", c.cv.n_folds);
  c.cv.n_repeats = s.get<int>("repeats", c.cv.n_repeats);
  c.step_sizes = s.get<std::vector<double>>("step_sizes", c.step_sizes);
  c.n_chains = s.get<int>("chains", c.n_chains);
  c.chain_steps = s.get<std::size_t>("chain_steps", c.chain_steps);
  c.m_values = s.get<std::vector<std::size_t>>("m", c.m_values);
  if (const json* l = s.maybe("lambda")) {
    const LambdaRule rule = LambdaRule::parse(*l);
    if (rule.kind == LambdaRule::Kind::Constant) {
      c.lambda = rule.value;
    } else if (rule.kind != LambdaRule::Kind::InvM) {
      throw ConfigError("logistic.lambda must be a constant or \"1/m\"");
    }
  }
  c.standardize = s.get<bool>("standardize", c.standardize);
  if (const json* p = s.maybe("prior")) {
    Section ps(*p, "logistic.prior");
    c.prior.a = ps.get<double>("a", c.prior.a);
    c.prior.b = ps.get<double>("b", c.prior.b);
    c.prior.prior_on_intercept = ps.get<bool>("prior_on_intercept", c.prior.prior_on_intercept);
    ps.finish();
  }
  c.bandwidth_cap = s.get<std::size_t>("bandwidth_cap", c.bandwidth_cap);
  rethrow_as_config("logistic", [&] {
    c.validate();
    return 0;
  });
  s.finish();
  return c;
}

json logistic_to_json(const LogisticExperimentConfig& c) {
  json j = {{"folds", c.cv.n_folds},
            {"repeats", c.cv.n_repeats},
            {"step_sizes", c.step_sizes},
            {"chains", c.n_chains},
            {"chain_steps", c.chain_steps},
            {"m", c.m_values},
            {"standardize", c.standardize},
            {"prior", {{"a", c.prior.a}, {"b", c.prior.b}, {"prior_on_intercept", c.prior.prior_on_intercept}}},
            {"bandwidth_cap", c.bandwidth_cap}};
  j["lambda"] = c.lambda > 0.0 ? json(c.lambda) : json("1/m");
  return j;
}

}  // namespace

json ExperimentConfig::to_json() const {
  json j = {{"name", name}, {"kind", kind}, {"repeats", repeats}, {"seed", seed}, {"threads", threads}};
  if (kind == "logistic") {
    j["dataset"] = dataset.to_json();
    j["logistic"] = logistic_to_json(logistic);
    return j;
  }
  j["target"] = target.to_json();
  if (kind == "thinning") {
    j["sampler"] = sampler.to_json();
    j["thinning"] = thinning.to_json();
    j["evaluation"] = evaluation.to_json();
  } else if (kind == "weight_sweep") {
    j["thinning"] = thinning.to_json();
    j["sweep"] = sweep.to_json();
  } else if (kind == "bounds") {
    j["sampler"] = sampler.to_json();
    j["thinning"] = thinning.to_json();
  }
  return j;
}

ExperimentConfig parse_experiment_config(const json& j) {
  Section s(j, "");
  ExperimentConfig c;
  c.name = s.get<std::string>("name", c.name);
  c.kind = s.get<std::string>("kind", c.kind);
  if (c.kind != "thinning" && c.kind != "weight_sweep" && c.kind != "bounds" && c.kind != "logistic") {
    throw ConfigError("kind must be one of thinning, weight_sweep, bounds, logistic");
  }
  c.repeats = s.get<std::size_t>("repeats", c.repeats);
  if (c.repeats < 1) throw ConfigError("repeats must be positive");
  c.seed = s.get<std::uint64_t>("seed", c.seed);
  c.threads = s.get<unsigned>("threads", c.threads);
  if (c.threads < 1) c.threads = 1;

  if (const json* t = s.maybe("target")) c.target = parse_target_config(*t);
  if (const json* t = s.maybe("sampler")) c.sampler = parse_sampler(*t);
  if (const json* t = s.maybe("thinning")) c.thinning = parse_thinning(*t);
  if (const json* t = s.maybe("evaluation")) c.evaluation = parse_evaluation(*t);
  if (const json* t = s.maybe("sweep")) c.sweep = parse_sweep(*t);
  if (const json* t = s.maybe("dataset")) c.dataset = parse_dataset(*t);
  if (const json* t = s.maybe("logistic")) c.logistic = parse_logistic(*t);
  s.finish();

  if (c.kind == "logistic") {
    if (!s.has("dataset")) throw ConfigError("kind 'logistic' needs a 'dataset' section");
    c.logistic.cv.seed = c.seed;
    c.logistic.threads = c.threads;
  } else {
    if (!s.has("target")) throw ConfigError("kind '" + c.kind + "' needs a 'target' section");
  }
  if (c.kind == "weight_sweep") {
    if (!s.has("sweep")) throw ConfigError("kind 'weight_sweep' needs a 'sweep' section");
    if (!c.target.gaussian || c.target.gaussian->components() != 2) {
      throw ConfigError("weight_sweep needs a two-component Gaussian mixture target");
    }
  }
  if (c.kind == "bounds" && !c.target.gaussian) throw ConfigError("kind 'bounds' needs a Gaussian mixture target");
  if (c.kind == "thinning") {
    if (c.sampler.type == "exact" && !c.target.has_exact_sampler()) {
      throw ConfigError("target has no exact sampler");
    }
    if (c.sampler.init.size() > 0 && c.sampler.init.size() != c.target.dim()) {
      throw ConfigError("sampler.init has the wrong dimension");
    }
    if (c.evaluation.mode_centers && c.evaluation.mode_centers->cols() != c.target.dim()) {
      throw ConfigError("evaluation.mode_centers has the wrong dimension");
    }
  }
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_experiment_config(j);
}

std::filesystem::path preset_dir() {
  if (const char* env = std::getenv("STEINTHIN_PRESET_DIR")) return env;
  return STEINTHIN_PRESET_DIR;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(preset_dir(), ec)) {
    if (entry.path().extension() == ".json") names.push_back(entry.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

ExperimentConfig load_preset(const std::string& name) {
  const auto path = preset_dir() / (name + ".json");
  if (!std::filesystem::exists(path)) throw ConfigError("unknown preset '" + name + "'");
  return load_experiment_config(path);
}

}  // namespace steinthin
