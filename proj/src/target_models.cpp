#include "steinthin/target_models.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace steinthin {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const Eigen::VectorXd& v) {
  const double top = v.maxCoeff();
  if (!std::isfinite(top)) return top;
  return top + std::log((v.array() - top).exp().sum());
}

}  // namespace

void TargetModel::check_dim(ConstVec x) const {
  if (x.size() != dim()) {
    throw std::invalid_argument("target model: expected dimension " + std::to_string(dim()) +
                                ", got " + std::to_string(x.size()));
  }
}

double truncated_laplacian_log(const TargetModel& model, ConstVec x) {
  return model.hess_diag_log(x).array().max(0.0).sum();
}

// ---------------------------------------------------------------------------
// Gaussian mixtures

void GaussianMixtureSpec::validate() const {
  const Eigen::Index k = means.rows();
  if (k < 1 || means.cols() < 1) throw std::invalid_argument("gaussian mixture: no components");
  if (variances.rows() != k || variances.cols() != means.cols()) {
    throw std::invalid_argument("gaussian mixture: variances must be K x d");
  }
  if (weights.size() != k) throw std::invalid_argument("gaussian mixture: weights must have K entries");
  if ((variances.array() <= 0.0).any() || !variances.allFinite()) {
    throw std::invalid_argument("gaussian mixture: variances must be positive");
  }
  if ((weights.array() < 0.0).any() || std::abs(weights.sum() - 1.0) > 1e-12) {
    throw std::invalid_argument("gaussian mixture: weights must be nonnegative and sum to 1");
  }
  if (!means.allFinite()) throw std::invalid_argument("gaussian mixture: non-finite mean");
}

GaussianMixtureSpec GaussianMixtureSpec::isotropic(Eigen::MatrixXd means,
                                                   const Eigen::VectorXd& variances,
                                                   Eigen::VectorXd weights) {
  GaussianMixtureSpec spec;
  spec.variances = variances.replicate(1, means.cols());
  spec.means = std::move(means);
  spec.weights = std::move(weights);
  return spec;
}

GaussianMixtureSpec GaussianMixtureSpec::symmetric_pair(Eigen::Index d, double mu, double sigma,
                                                        double w) {
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(2, d);
  means(0, 0) = -mu;
  means(1, 0) = mu;
  return isotropic(std::move(means), Eigen::Vector2d::Constant(sigma * sigma),
                   Eigen::Vector2d(w, 1.0 - w));
}

GaussianMixtureSpec GaussianMixtureSpec::standard_normal(Eigen::Index d) {
  return isotropic(Eigen::MatrixXd::Zero(1, d), Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1));
}

GaussianMixture::GaussianMixture(GaussianMixtureSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const Eigen::Index k = spec_.components();
  log_weights_.resize(k);
  log_norm_.resize(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    log_weights_[c] = spec_.weights[c] > 0.0 ? std::log(spec_.weights[c]) : kNegInf;
    log_norm_[c] = -0.5 * (2.0 * std::numbers::pi * spec_.variances.row(c).array()).log().sum();
  }
}

Eigen::VectorXd GaussianMixture::component_log_terms(ConstVec x) const {
  check_dim(x);
  const Eigen::Index k = spec_.components();
  Eigen::VectorXd terms(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const double quad =
        ((x.transpose() - spec_.means.row(c)).array().square() / spec_.variances.row(c).array()).sum();
    terms[c] = log_weights_[c] + log_norm_[c] - 0.5 * quad;
  }
  return terms;
}

double GaussianMixture::log_density(ConstVec x) const {
  return log_sum_exp(component_log_terms(x));
}

Eigen::VectorXd GaussianMixture::responsibilities(ConstVec x) const {
  const Eigen::VectorXd terms = component_log_terms(x);
  const double lse = log_sum_exp(terms);
  return (terms.array() - lse).exp().matrix();
}

Eigen::VectorXd GaussianMixture::score(ConstVec x) const {
  const Eigen::VectorXd r = responsibilities(x);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(dim());
  for (Eigen::Index c = 0; c < spec_.components(); ++c) {
    if (r[c] == 0.0) continue;
    s.array() -= r[c] * (x.transpose() - spec_.means.row(c)).array().transpose() /
                 spec_.variances.row(c).array().transpose();
  }
  return s;
}

Eigen::VectorXd GaussianMixture::hess_diag_log(ConstVec x) const {
  const Eigen::VectorXd r = responsibilities(x);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(dim());
  Eigen::VectorXd second = Eigen::VectorXd::Zero(dim());  // (d^2 p / dx_j^2) / p
  for (Eigen::Index c = 0; c < spec_.components(); ++c) {
    if (r[c] == 0.0) continue;
    const Eigen::ArrayXd inv_var = spec_.variances.row(c).array().inverse().transpose();
    const Eigen::ArrayXd g = -(x.transpose() - spec_.means.row(c)).array().transpose() * inv_var;
    s.array() += r[c] * g;
    second.array() += r[c] * (g.square() - inv_var);
  }
  return second - s.cwiseAbs2();
}

DensityCurvature GaussianMixture::density_curvature(ConstVec x) const {
  DensityCurvature out;
  out.density = std::exp(log_density(x));
  const Eigen::VectorXd s = score(x);
  out.grad = out.density * s;
  out.hess_diag = out.density * (hess_diag_log(x) + s.cwiseAbs2());
  return out;
}

double symmetric_pair_score_first(double z, double mu, double sigma) {
  const double s2 = sigma * sigma;
  return -z / s2 + (mu / s2) * std::tanh(mu * z / s2);
}

// ---------------------------------------------------------------------------
// Sheared t mixtures

void BananaTMixtureSpec::validate() const {
  if (dim < 2) throw std::invalid_argument("banana mixture: dimension must be at least 2");
  if (!(dof > 2.0)) throw std::invalid_argument("banana mixture: dof must exceed 2");
  if (!(scale_first > 0.0)) throw std::invalid_argument("banana mixture: scale_first must be positive");
  if (!std::isfinite(b)) throw std::invalid_argument("banana mixture: non-finite curvature b");
  if (centers.empty() || static_cast<Eigen::Index>(centers.size()) != weights.size()) {
    throw std::invalid_argument("banana mixture: need one weight per center");
  }
  for (const auto& c : centers) {
    if (c.size() != dim) throw std::invalid_argument("banana mixture: center dimension mismatch");
  }
  if ((weights.array() < 0.0).any() || std::abs(weights.sum() - 1.0) > 1e-12) {
    throw std::invalid_argument("banana mixture: weights must be nonnegative and sum to 1");
  }
}

BananaTMixtureSpec BananaTMixtureSpec::two_bananas(Eigen::Index d) {
  BananaTMixtureSpec spec;
  spec.dim = d;
  Eigen::VectorXd second = Eigen::VectorXd::Zero(d);
  second[1] = 8.0;
  spec.centers = {Eigen::VectorXd::Zero(d), second};
  spec.weights = Eigen::Vector2d(0.25, 0.75);
  return spec;
}

BananaTMixture::BananaTMixture(BananaTMixtureSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const auto d = static_cast<double>(spec_.dim);
  const double nu = spec_.dof;
  log_norm_ = std::lgamma(0.5 * (nu + d)) - std::lgamma(0.5 * nu) -
              0.5 * d * std::log(nu * std::numbers::pi) - std::log(spec_.scale_first);
}

Eigen::VectorXd BananaTMixture::unshear(ConstVec x, Eigen::Index component) const {
  Eigen::VectorXd z = x - spec_.centers[static_cast<std::size_t>(component)];
  z[1] = z[1] - spec_.b * z[0] * z[0] + 100.0 * spec_.b;
  return z;
}

double BananaTMixture::t_log_density(ConstVec z) const {
  const double s0 = z[0] / spec_.scale_first;
  const double quad = s0 * s0 + z.tail(z.size() - 1).squaredNorm();
  return log_norm_ - 0.5 * (spec_.dof + static_cast<double>(spec_.dim)) * std::log1p(quad / spec_.dof);
}

double BananaTMixture::log_density(ConstVec x) const {
  check_dim(x);
  const auto k = static_cast<Eigen::Index>(spec_.centers.size());
  Eigen::VectorXd terms(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    terms[c] = (spec_.weights[c] > 0.0 ? std::log(spec_.weights[c]) : kNegInf) +
               t_log_density(unshear(x, c));
  }
  return log_sum_exp(terms);
}

Eigen::VectorXd BananaTMixture::score(ConstVec x) const {
  check_dim(x);
  const auto k = static_cast<Eigen::Index>(spec_.centers.size());
  const double nu = spec_.dof;
  const auto d = static_cast<double>(spec_.dim);
  const double inv_s2 = 1.0 / (spec_.scale_first * spec_.scale_first);

  Eigen::VectorXd terms(k);
  Eigen::MatrixXd grads(spec_.dim, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const Eigen::VectorXd z = unshear(x, c);
    terms[c] = (spec_.weights[c] > 0.0 ? std::log(spec_.weights[c]) : kNegInf) + t_log_density(z);
    const double quad = z[0] * z[0] * inv_s2 + z.tail(z.size() - 1).squaredNorm();
    const double factor = -(nu + d) / (nu + quad);
    Eigen::VectorXd gz = factor * z;
    gz[0] *= inv_s2;
    // chain rule through the shear: dz_2/dy_1 = -2 b y_1
    const double y0 = x[0] - spec_.centers[static_cast<std::size_t>(c)][0];
    Eigen::VectorXd g = gz;
    g[0] += gz[1] * (-2.0 * spec_.b * y0);
    grads.col(c) = g;
  }
  const double lse = log_sum_exp(terms);
  const Eigen::VectorXd r = (terms.array() - lse).exp().matrix();
  return grads * r;
}

Eigen::VectorXd BananaTMixture::hess_diag_log(ConstVec x) const {
  check_dim(x);
  Eigen::VectorXd out(spec_.dim);
  Eigen::VectorXd probe = x;
  for (Eigen::Index j = 0; j < spec_.dim; ++j) {
    const double h = 1e-4 * std::max(1.0, std::abs(x[j]));
    probe[j] = x[j] + h;
    const double up = score(probe)[j];
    probe[j] = x[j] - h;
    const double down = score(probe)[j];
    probe[j] = x[j];
    out[j] = (up - down) / (2.0 * h);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bayesian logistic regression

void Dataset::validate() const {
  if (features.rows() < 1) throw std::invalid_argument("dataset '" + name + "' is empty");
  if (labels.size() != features.rows()) {
    throw std::invalid_argument("dataset '" + name + "': label count does not match rows");
  }
  if (!features.allFinite()) throw std::invalid_argument("dataset '" + name + "': non-finite feature");
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0.0 && labels[i] != 1.0) {
      throw std::invalid_argument("dataset '" + name + "': labels must be 0 or 1");
    }
  }
}

Dataset Dataset::subset(const std::vector<Eigen::Index>& rows) const {
  Dataset out;
  out.name = name;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(rows[i]);
    out.labels[static_cast<Eigen::Index>(i)] = labels[rows[i]];
  }
  return out;
}

double log_sigmoid(double eta) {
  return eta >= 0.0 ? -std::log1p(std::exp(-eta)) : eta - std::log1p(std::exp(eta));
}

double sigmoid(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

LogisticPosterior::LogisticPosterior(Dataset data, LogisticPrior prior)
    : data_(std::move(data)), prior_(prior) {
  data_.validate();
  if (!(prior_.a > 0.0) || !(prior_.b > 0.0)) {
    throw std::invalid_argument("logistic prior: a and b must be positive");
  }
  prior_dof_ = 2.0 * prior_.a;
  prior_scale2_ = prior_.b / prior_.a;
  const double nu = prior_dof_;
  prior_log_norm_ = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                    0.5 * std::log(nu * std::numbers::pi * prior_scale2_);
}

Eigen::VectorXd LogisticPosterior::linear_predictor(ConstVec theta) const {
  check_dim(theta);
  return (data_.features * theta.tail(data_.dim())).array() + theta[0];
}

double LogisticPosterior::log_density(ConstVec theta) const {
  const Eigen::VectorXd eta = linear_predictor(theta);
  double lp = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    lp += data_.labels[i] == 1.0 ? log_sigmoid(eta[i]) : log_sigmoid(-eta[i]);
  }
  const double nu = prior_dof_;
  const Eigen::Index first = prior_.prior_on_intercept ? 0 : 1;
  for (Eigen::Index j = first; j < theta.size(); ++j) {
    lp += prior_log_norm_ - 0.5 * (nu + 1.0) * std::log1p(theta[j] * theta[j] / (nu * prior_scale2_));
  }
  return lp;
}

Eigen::VectorXd LogisticPosterior::score(ConstVec theta) const {
  const Eigen::VectorXd eta = linear_predictor(theta);
  Eigen::VectorXd resid(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) resid[i] = data_.labels[i] - sigmoid(eta[i]);
  Eigen::VectorXd g(dim());
  g[0] = resid.sum();
  g.tail(data_.dim()) = data_.features.transpose() * resid;
  const double nu = prior_dof_;
  const Eigen::Index first = prior_.prior_on_intercept ? 0 : 1;
  for (Eigen::Index j = first; j < theta.size(); ++j) {
    g[j] -= (nu + 1.0) * theta[j] / (nu * prior_scale2_ + theta[j] * theta[j]);
  }
  return g;
}

Eigen::VectorXd LogisticPosterior::hess_diag_log(ConstVec theta) const {
  const Eigen::VectorXd eta = linear_predictor(theta);
  Eigen::VectorXd curv(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double p = sigmoid(eta[i]);
    curv[i] = p * (1.0 - p);
  }
  Eigen::VectorXd h(dim());
  h[0] = -curv.sum();
  h.tail(data_.dim()) = -(data_.features.array().square().matrix().transpose() * curv);
  const double nu = prior_dof_;
  const double ns2 = nu * prior_scale2_;
  const Eigen::Index first = prior_.prior_on_intercept ? 0 : 1;
  for (Eigen::Index j = first; j < theta.size(); ++j) {
    const double t2 = theta[j] * theta[j];
    h[j] -= (nu + 1.0) * (ns2 - t2) / ((ns2 + t2) * (ns2 + t2));
  }
  return h;
}

}  // namespace steinthin
