#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "steinthin/target_models.hpp"

using namespace steinthin;
using steinthin::testing::central_diff;
using steinthin::testing::random_vector;
using steinthin::testing::second_diff;

namespace {

/// Score against central differences of log p and the Hessian diagonal
/// against second differences of log p.
void check_derivatives(const TargetModel& model, std::mt19937_64& rng, double scale, int points, double score_tol,
                       double hess_tol) {
  auto lp = [&](const Eigen::VectorXd& x) { return model.log_density(x); };
  for (int k = 0; k < points; ++k) {
    const Eigen::VectorXd x = random_vector(rng, model.dim(), scale);
    const Eigen::VectorXd s = model.score(x);
    const Eigen::VectorXd h = model.hess_diag_log(x);
    ASSERT_EQ(s.size(), model.dim());
    ASSERT_EQ(h.size(), model.dim());
    for (Eigen::Index j = 0; j < model.dim(); ++j) {
      const double step = 1e-5 * std::max(1.0, std::abs(x[j]));
      const double fd = central_diff(lp, x, j, step);
      EXPECT_NEAR(s[j], fd, score_tol * std::max(1.0, std::abs(fd))) << "score coordinate " << j;
      const double fd2 = second_diff(lp, x, j, 1e-3 * std::max(1.0, std::abs(x[j])));
      EXPECT_NEAR(h[j], fd2, hess_tol * std::max(1.0, std::abs(fd2))) << "hessian coordinate " << j;
    }
    double lap = 0.0;
    for (Eigen::Index j = 0; j < model.dim(); ++j) lap += std::max(0.0, h[j]);
    EXPECT_NEAR(truncated_laplacian_log(model, x), lap, 1e-12);
  }
}

GaussianMixtureSpec random_mixture(std::mt19937_64& rng, Eigen::Index k, Eigen::Index d) {
  std::uniform_real_distribution<double> u(0.3, 2.0);
  GaussianMixtureSpec spec;
  spec.means = Eigen::MatrixXd(k, d);
  spec.variances = Eigen::MatrixXd(k, d);
  spec.weights = Eigen::VectorXd(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    spec.means.row(c) = random_vector(rng, d, 2.0).transpose();
    for (Eigen::Index j = 0; j < d; ++j) spec.variances(c, j) = u(rng);
    spec.weights[c] = u(rng);
  }
  spec.weights /= spec.weights.sum();
  return spec;
}

}  // namespace

TEST(GaussianMixture, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 6; ++trial) {
    const GaussianMixture model(random_mixture(rng, 1 + trial % 4, 1 + trial % 3));
    check_derivatives(model, rng, 2.5, 20, 1e-7, 1e-4);
  }
}

TEST(GaussianMixture, DensityIntegratesToOneIn1d) {
  GaussianMixtureSpec spec;
  spec.means = Eigen::MatrixXd(2, 1);
  spec.means << -1.0, 2.0;
  spec.variances = Eigen::MatrixXd(2, 1);
  spec.variances << 0.5, 1.5;
  spec.weights = Eigen::Vector2d(0.3, 0.7);
  const GaussianMixture model(spec);
  double total = 0.0;
  const double h = 1e-3;
  for (double x = -15.0; x <= 15.0; x += h) total += std::exp(model.log_density(Eigen::VectorXd::Constant(1, x))) * h;
  EXPECT_NEAR(total, 1.0, 1e-6);
}

TEST(GaussianMixture, ResponsibilitiesAndCurvature) {
  std::mt19937_64 rng(22);
  const GaussianMixture model(random_mixture(rng, 3, 2));
  for (int k = 0; k < 20; ++k) {
    const Eigen::VectorXd x = random_vector(rng, 2, 2.0);
    const Eigen::VectorXd r = model.responsibilities(x);
    EXPECT_NEAR(r.sum(), 1.0, 1e-12);
    EXPECT_GE(r.minCoeff(), 0.0);
    const DensityCurvature c = model.density_curvature(x);
    const double p = std::exp(model.log_density(x));
    EXPECT_NEAR(c.density, p, 1e-12 * std::max(1.0, p));
    // grad p = p s and d2 p = p (h + s^2)
    const Eigen::VectorXd s = model.score(x);
    const Eigen::VectorXd h = model.hess_diag_log(x);
    for (Eigen::Index j = 0; j < 2; ++j) {
      EXPECT_NEAR(c.grad[j], p * s[j], 1e-12);
      EXPECT_NEAR(c.hess_diag[j], p * (h[j] + s[j] * s[j]), 1e-12);
    }
  }
}

TEST(GaussianMixture, FarTailsStayFinite) {
  const GaussianMixture model(GaussianMixtureSpec::symmetric_pair(2, 3.0, 1.0, 0.2));
  const Eigen::Vector2d far(1e3, -1e3);
  EXPECT_TRUE(std::isfinite(model.log_density(far)));
  EXPECT_TRUE(model.score(far).allFinite());
  EXPECT_TRUE(model.hess_diag_log(far).allFinite());
}

TEST(GaussianMixture, SymmetricPairScoreClosedForm) {
  const double mu = 2.0;
  const double sigma = 1.0;
  const GaussianMixture model(GaussianMixtureSpec::symmetric_pair(2, mu, sigma, 0.5));
  for (double z = -4.0; z <= 4.0; z += 0.25) {
    const Eigen::Vector2d x(z, 0.0);
    EXPECT_NEAR(model.score(x)[0], symmetric_pair_score_first(z, mu, sigma), 1e-12);
  }
  EXPECT_NEAR(symmetric_pair_score_first(0.0, mu, sigma), 0.0, 1e-15);
}

TEST(GaussianMixture, RejectsInvalidSpecs) {
  GaussianMixtureSpec spec = GaussianMixtureSpec::symmetric_pair(2, 1.0, 1.0, 0.5);
  spec.weights = Eigen::Vector2d(0.7, 0.7);
  EXPECT_THROW(GaussianMixture{spec}, std::invalid_argument);
  spec = GaussianMixtureSpec::symmetric_pair(2, 1.0, 1.0, 0.5);
  spec.variances(0, 0) = -1.0;
  EXPECT_THROW(GaussianMixture{spec}, std::invalid_argument);
  const GaussianMixture ok(GaussianMixtureSpec::standard_normal(2));
  EXPECT_THROW(ok.score(Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST(BananaTMixture, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(23);
  for (const Eigen::Index d : {2, 3, 5}) {
    const BananaTMixture model(BananaTMixtureSpec::two_bananas(d));
    check_derivatives(model, rng, 6.0, 20, 1e-6, 1e-3);
  }
}

TEST(BananaTMixture, DensityIntegratesToOneIn2d) {
  BananaTMixtureSpec spec = BananaTMixtureSpec::two_bananas(2);
  spec.scale_first = 2.0;
  spec.dof = 30.0;
  const BananaTMixture model(spec);
  double total = 0.0;
  const double h = 0.05;
  for (double x1 = -25.0; x1 <= 25.0; x1 += h) {
    for (double x2 = -40.0; x2 <= 40.0; x2 += h) total += std::exp(model.log_density(Eigen::Vector2d(x1, x2))) * h * h;
  }
  EXPECT_NEAR(total, 1.0, 2e-3);
}

TEST(BananaTMixture, UnshearInvertsShear) {
  const BananaTMixture model(BananaTMixtureSpec::two_bananas(3));
  const auto& spec = model.spec();
  std::mt19937_64 rng(24);
  for (int k = 0; k < 10; ++k) {
    const Eigen::VectorXd z = random_vector(rng, 3, 3.0);
    Eigen::VectorXd x = z;
    x[1] += spec.b * z[0] * z[0] - 100.0 * spec.b;
    x += spec.centers[1];
    const Eigen::VectorXd back = model.unshear(x, 1);
    for (Eigen::Index j = 0; j < 3; ++j) EXPECT_NEAR(back[j], z[j], 1e-12);
  }
}

TEST(LogisticPosterior, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(25);
  Dataset data;
  data.features = Eigen::MatrixXd(40, 3);
  data.labels = Eigen::VectorXd(40);
  std::bernoulli_distribution coin(0.5);
  for (Eigen::Index i = 0; i < 40; ++i) {
    data.features.row(i) = random_vector(rng, 3).transpose();
    data.labels[i] = coin(rng) ? 1.0 : 0.0;
  }
  for (const bool on_intercept : {true, false}) {
    const LogisticPosterior model(data, LogisticPrior{1.5, 0.7, on_intercept});
    EXPECT_EQ(model.dim(), 4);
    check_derivatives(model, rng, 1.0, 20, 1e-6, 1e-4);
  }
}

TEST(LogisticPosterior, LogSigmoidIsStable) {
  EXPECT_NEAR(log_sigmoid(0.0), std::log(0.5), 1e-15);
  EXPECT_NEAR(log_sigmoid(-800.0), -800.0, 1e-9);
  EXPECT_NEAR(log_sigmoid(800.0), 0.0, 1e-15);
  EXPECT_NEAR(sigmoid(3.0) + sigmoid(-3.0), 1.0, 1e-15);
  EXPECT_TRUE(std::isfinite(log_sigmoid(-1e6)));
}
