#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "steinthin/bayes_logistic.hpp"
#include "steinthin/samplers.hpp"
#include "steinthin/stein_kernels.hpp"
#include "steinthin/target_models.hpp"

namespace steinthin {

/// Thrown for malformed or unknown configuration entries. The message names
/// the offending key path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Entropic weight as a constant or as a rate in the thinning size m.
struct LambdaRule {
  enum class Kind { Constant, InvM, InvMSquared, InvLogM };
  Kind kind = Kind::InvM;
  double value = 0.0;  // Constant only

  double at(std::size_t m) const;
  std::string describe() const;
  static LambdaRule parse(const nlohmann::json& j);  // number or "1/m", "1/m^2", "1/log(m)"
};

/// A target model together with whatever the evaluation stage needs about it.
struct TargetConfig {
  std::string type;  // gaussian_mixture | example_mixture | banana_t_mixture | standard_normal
  std::optional<GaussianMixtureSpec> gaussian;
  std::optional<BananaTMixtureSpec> banana;

  std::unique_ptr<TargetModel> make_model() const;
  Eigen::Index dim() const;
  /// Component centers used for mode assignment.
  Eigen::MatrixXd centers() const;
  bool has_exact_sampler() const { return gaussian.has_value() || banana.has_value(); }
  SampleSet exact_sample(std::size_t n, std::uint64_t seed) const;
  nlohmann::json to_json() const;
};

struct SamplerConfig {
  std::string type = "exact";  // exact | mala
  std::size_t n = 3000;        // exact draws or MALA steps
  std::vector<double> step_sizes{0.1};  // MALA only
  Eigen::VectorXd init;        // MALA only; empty means the origin

  nlohmann::json to_json() const;
};

struct ThinningConfig {
  std::vector<std::string> methods{"st", "rst"};
  std::vector<std::size_t> m_values{300};
  LambdaRule lambda;
  bool laplacian = true;
  double beta = 0.5;
  std::optional<double> fixed_ell;  // median heuristic when empty
  std::size_t bandwidth_cap = 1000;

  SteinKernelParams kernel_for(const PointMatrix& points, std::uint64_t seed) const;
  nlohmann::json to_json() const;
};

struct EvaluationConfig {
  std::vector<std::string> metrics{"ksd"};  // ksd | mode_proportions | mmd | saddle_band
  std::size_t mmd_reference_size = 5000;
  std::optional<Eigen::MatrixXd> mode_centers;
  std::optional<double> band_half_width;  // saddle band |x_1| < h; symmetric-pair default
  bool mmd_unbiased = false;

  nlohmann::json to_json() const;
};

struct SweepConfig {
  std::vector<double> grid;
  std::size_t n = 3000;  // split evenly between the two clusters
  double radius_sd = 2.0;
  double lambda = 0.0;
  /// Log-spaced lambda search; count 0 disables it.
  double search_lo = 1e-3;
  double search_hi = 10.0;
  std::size_t search_count = 0;

  nlohmann::json to_json() const;
};

struct DatasetConfig {
  std::string path;
  std::string label_column;
  CsvDatasetOptions csv;

  nlohmann::json to_json() const;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::string kind = "thinning";  // thinning | weight_sweep | bounds | logistic
  TargetConfig target;
  SamplerConfig sampler;
  ThinningConfig thinning;
  EvaluationConfig evaluation;
  SweepConfig sweep;
  DatasetConfig dataset;
  LogisticExperimentConfig logistic;
  std::size_t repeats = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  /// The full resolved configuration, defaults filled in.
  nlohmann::json to_json() const;
};

ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Parses a standalone target document (the "target" section on its own).
TargetConfig parse_target_config(const nlohmann::json& j);

/// Directory of the bundled presets; overridable by STEINTHIN_PRESET_DIR in
/// the environment.
std::filesystem::path preset_dir();
std::vector<std::string> preset_names();
ExperimentConfig load_preset(const std::string& name);

}  // namespace steinthin
