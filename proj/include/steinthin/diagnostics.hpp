#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "steinthin/stein_kernels.hpp"
#include "steinthin/target_models.hpp"
#include "steinthin/types.hpp"

namespace steinthin {

/// Running sum with Neumaier compensation.
class CompensatedSum {
 public:
  void add(double v);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Squared MMD under the distance-induced kernel
/// k(x, x') = |x| + |x'| - |x - x'|, or its square root.
struct MmdOptions {
  /// U-statistic within-sample terms (diagonal excluded) instead of the
  /// V-statistic plug-in.
  bool unbiased = false;
};

/// Precomputed within-sample term of a fixed reference sample, so that many
/// candidate samples can be scored against it cheaply.
struct MmdReference {
  PointMatrix points;
  double self_term_v = 0.0;  // (1/n^2) sum_{i,j} k(z_i, z_j)
  double self_term_u = 0.0;  // 1/(n(n-1)) sum_{i != j} k(z_i, z_j)
  Eigen::VectorXd norms;

  explicit MmdReference(PointMatrix reference);
};

/// sqrt(max(0, MMD^2)) between two samples.
double energy_mmd(const PointMatrix& a, const PointMatrix& b, MmdOptions opts = {});
double energy_mmd(const PointMatrix& a, const MmdReference& ref, MmdOptions opts = {});

/// Fraction of points whose nearest center (Euclidean) is each row of
/// `centers`; equidistant points go to the lowest-index center.
Eigen::VectorXd mode_proportions(const PointMatrix& points, const Eigen::MatrixXd& centers);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_and_se(const std::vector<double>& values);

/// Two-component symmetric mixture parameters recovered from a spec, when
/// the spec has that shape: means at -mu e_1 and +mu e_1, common isotropic
/// variance sigma^2.
struct SymmetricPair {
  double mu = 0.0;
  double sigma = 1.0;
};
std::optional<SymmetricPair> as_symmetric_pair(const GaussianMixtureSpec& spec);

/// Sample-size and score thresholds under which a sample concentrated at low
/// score norm beats an iid sample in expected KSD.
struct PathologyBounds {
  double m_threshold = 0.0;
  std::optional<double> s0_max;  // only for symmetric pairs with mu / sigma > 1
  std::optional<double> z_max;   // edge of the band around the saddle
  MeanSe e_score_sq;             // E|s_p(X)|^2, Monte Carlo
  MeanSe e_lap_plus;             // E[truncated Laplacian of log p], Monte Carlo
};

PathologyBounds pathology_bounds(const GaussianMixtureSpec& spec, const SteinKernelParams& params,
                                 double s0, std::size_t mc_n, std::uint64_t seed);

/// [nu sqrt(nu^2 - 1) - ln(nu + sqrt(nu^2 - 1))] / mu with nu = mu / sigma.
std::optional<double> score_threshold(double mu, double sigma);
/// (sigma^2 / mu) arcosh(mu / sigma).
std::optional<double> saddle_band_half_width(double mu, double sigma);

/// Monte Carlo distribution of KSD^2 (or L-KSD^2) of m iid exact draws,
/// over `replicates` independent replicates.
MeanSe iid_ksd_squared(const GaussianMixtureSpec& spec, const SteinKernelParams& params,
                       std::size_t m, std::size_t replicates, std::uint64_t seed,
                       bool with_laplacian);

/// Points drawn from each component separately, keeping only draws within
/// `radius_sd` standard deviations of the component mean.
std::pair<PointMatrix, PointMatrix> truncated_mode_samples(const GaussianMixtureSpec& spec,
                                                           std::size_t n_left, std::size_t n_right,
                                                           double radius_sd, std::uint64_t seed);

struct WeightSweepResult {
  std::vector<double> weights;
  std::vector<double> ksd_values;  // entropic KSD^2 of Q_w (plain KSD^2 when lambda = 0)
  double argmin_w = 0.0;
  double lambda = 0.0;
  /// |KSD^2(P, Q_L) / KSD^2(P, Q_R) - 1|
  double eta_estimate = 0.0;
  /// Block sums of the quadratic KSD^2(Q_w) = w^2 A_LL + (1-w)^2 A_RR + 2 w (1-w) A_LR.
  double a_ll = 0.0;
  double a_rr = 0.0;
  double a_lr = 0.0;
  double mean_log_p_left = 0.0;
  double mean_log_p_right = 0.0;
};

/// Evaluates the objective of Q_w = w * uniform(left) + (1 - w) * uniform(right)
/// over a grid of w. Argmin ties go to the smallest w.
WeightSweepResult weight_sweep(const PointMatrix& left, const PointMatrix& right,
                               const TargetModel& target, const std::vector<double>& grid,
                               double lambda, const SteinKernelParams& params);

/// Re-evaluates a sweep for another lambda without touching the kernel.
WeightSweepResult reweight_sweep(const WeightSweepResult& base, double lambda);

/// Evenly spaced grid lo, lo + step, ..., up to hi inclusive (within 1e-9).
std::vector<double> linear_grid(double lo, double hi, double step);

}  // namespace steinthin
