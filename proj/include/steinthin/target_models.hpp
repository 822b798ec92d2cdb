#pragma once

#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "steinthin/stein_kernels.hpp"
#include "steinthin/types.hpp"

namespace steinthin {

/// A target density known up to an additive constant on the log scale.
///
/// score() must be the exact gradient of log_density() and hess_diag_log()
/// the exact diagonal of its Hessian. Implementations are immutable after
/// construction, so evaluations may run concurrently.
class TargetModel {
 public:
  virtual ~TargetModel() = default;

  virtual Eigen::Index dim() const = 0;
  virtual double log_density(ConstVec x) const = 0;
  virtual Eigen::VectorXd score(ConstVec x) const = 0;
  virtual Eigen::VectorXd hess_diag_log(ConstVec x) const = 0;

 protected:
  void check_dim(ConstVec x) const;
};

/// Sum of the positive parts of the diagonal second derivatives of log p.
double truncated_laplacian_log(const TargetModel& model, ConstVec x);

/// K-component Gaussian mixture with diagonal covariances.
struct GaussianMixtureSpec {
  Eigen::MatrixXd means;      // K x d
  Eigen::MatrixXd variances;  // K x d, per-coordinate variances
  Eigen::VectorXd weights;    // K, nonnegative, summing to one

  Eigen::Index components() const { return means.rows(); }
  Eigen::Index dim() const { return means.cols(); }
  void validate() const;

  /// Isotropic components: variances[k] applied to every coordinate.
  static GaussianMixtureSpec isotropic(Eigen::MatrixXd means, const Eigen::VectorXd& variances,
                                       Eigen::VectorXd weights);
  /// Two components at (-mu, 0, ..., 0) and (mu, 0, ..., 0) with variance
  /// sigma^2 I and weights (w, 1 - w).
  static GaussianMixtureSpec symmetric_pair(Eigen::Index d, double mu, double sigma, double w);
  static GaussianMixtureSpec standard_normal(Eigen::Index d);
};

class GaussianMixture final : public TargetModel {
 public:
  explicit GaussianMixture(GaussianMixtureSpec spec);

  Eigen::Index dim() const override { return spec_.dim(); }
  /// Normalized log density (log-sum-exp over components).
  double log_density(ConstVec x) const override;
  Eigen::VectorXd score(ConstVec x) const override;
  Eigen::VectorXd hess_diag_log(ConstVec x) const override;

  /// Posterior component probabilities at x.
  Eigen::VectorXd responsibilities(ConstVec x) const;
  /// Raw density, gradient and Hessian diagonal, as consumed by
  /// laplacian_stein_kernel.
  DensityCurvature density_curvature(ConstVec x) const;

  const GaussianMixtureSpec& spec() const { return spec_; }

 private:
  Eigen::VectorXd component_log_terms(ConstVec x) const;

  GaussianMixtureSpec spec_;
  Eigen::VectorXd log_weights_;
  Eigen::VectorXd log_norm_;  // per-component Gaussian normalizing log-constant
};

/// First score coordinate of the symmetric two-component mixture with equal
/// weights: -z / sigma^2 + (mu / sigma^2) tanh(mu z / sigma^2).
double symmetric_pair_score_first(double z, double mu, double sigma);

/// Mixture of sheared multivariate-t components. A component centered at mu
/// is the law of phi(Z) + mu, with Z multivariate t (dof degrees of freedom,
/// scale diag(scale_first^2, 1, ..., 1)) and
/// phi(z)_2 = z_2 + b z_1^2 - 100 b, phi(z)_i = z_i otherwise.
struct BananaTMixtureSpec {
  Eigen::Index dim = 2;
  double b = 0.03;
  double dof = 7.0;
  double scale_first = 10.0;
  std::vector<Eigen::VectorXd> centers;
  Eigen::VectorXd weights;

  void validate() const;

  /// Two components at 0 and (0, 8, 0, ...) with weights 0.25 / 0.75.
  static BananaTMixtureSpec two_bananas(Eigen::Index d);
};

class BananaTMixture final : public TargetModel {
 public:
  explicit BananaTMixture(BananaTMixtureSpec spec);

  Eigen::Index dim() const override { return spec_.dim; }
  double log_density(ConstVec x) const override;
  Eigen::VectorXd score(ConstVec x) const override;
  /// Central differences of the analytic score, step 1e-4 * max(1, |x_j|).
  Eigen::VectorXd hess_diag_log(ConstVec x) const override;

  /// phi^{-1}(x - center).
  Eigen::VectorXd unshear(ConstVec x, Eigen::Index component) const;
  /// Normalized log density of the unsheared t variable.
  double t_log_density(ConstVec z) const;

  const BananaTMixtureSpec& spec() const { return spec_; }

 private:
  BananaTMixtureSpec spec_;
  double log_norm_ = 0.0;
};

/// Binary classification data; labels are 0 or 1.
struct Dataset {
  Eigen::MatrixXd features;  // N x d
  Eigen::VectorXd labels;    // N
  std::string name;

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }
  void validate() const;
  Dataset subset(const std::vector<Eigen::Index>& rows) const;
};

struct LogisticPrior {
  double a = 1.0;
  double b = 1.0;
  /// Student-t(2a, 0, b/a) on the intercept too; flat (improper) when false.
  bool prior_on_intercept = true;
};

/// Posterior over theta = (beta_0, beta) in R^{d+1} for Bayesian logistic
/// regression with independent Student-t(2a, 0, b/a) marginal priors.
class LogisticPosterior final : public TargetModel {
 public:
  LogisticPosterior(Dataset data, LogisticPrior prior);

  Eigen::Index dim() const override { return data_.dim() + 1; }
  double log_density(ConstVec theta) const override;
  Eigen::VectorXd score(ConstVec theta) const override;
  Eigen::VectorXd hess_diag_log(ConstVec theta) const override;

  const Dataset& data() const { return data_; }
  const LogisticPrior& prior() const { return prior_; }

 private:
  Eigen::VectorXd linear_predictor(ConstVec theta) const;

  Dataset data_;
  LogisticPrior prior_;
  double prior_dof_;
  double prior_scale2_;
  double prior_log_norm_;
};

double log_sigmoid(double eta);
double sigmoid(double eta);

}  // namespace steinthin
