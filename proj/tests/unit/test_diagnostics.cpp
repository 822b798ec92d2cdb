#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "steinthin/diagnostics.hpp"
#include "steinthin/samplers.hpp"
#include "steinthin/thinning.hpp"

using namespace steinthin;
using steinthin::testing::random_points;

namespace {

double energy_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return x.norm() + y.norm() - (x - y).norm();
}

double naive_mmd2(const PointMatrix& a, const PointMatrix& b, bool unbiased) {
  auto self = [&](const PointMatrix& p) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      for (Eigen::Index j = 0; j < p.rows(); ++j) {
        if (unbiased && i == j) continue;
        s += energy_kernel(p.row(i).transpose(), p.row(j).transpose());
      }
    }
    const auto n = static_cast<double>(p.rows());
    return unbiased ? s / (n * (n - 1.0)) : s / (n * n);
  };
  double cross = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) cross += energy_kernel(a.row(i).transpose(), b.row(j).transpose());
  }
  cross /= static_cast<double>(a.rows() * b.rows());
  return self(a) + self(b) - 2.0 * cross;
}

double mean_distance(const PointMatrix& a, const PointMatrix& b) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) s += (a.row(i) - b.row(j)).norm();
  }
  return s / static_cast<double>(a.rows() * b.rows());
}

}  // namespace

TEST(CompensatedSum, RecoversCancellation) {
  CompensatedSum s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  EXPECT_EQ(s.value(), 1.0);
}

TEST(EnergyMmd, MatchesDoubleLoopOracle) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    const PointMatrix a = random_points(rng, 2 + trial % 9, 3);
    const PointMatrix b = random_points(rng, 2 + (trial * 5) % 9, 3, 1.5);
    for (const bool unbiased : {false, true}) {
      const double expected = std::sqrt(std::max(0.0, naive_mmd2(a, b, unbiased)));
      EXPECT_NEAR(energy_mmd(a, b, MmdOptions{unbiased}), expected, 1e-12);
      EXPECT_NEAR(energy_mmd(a, MmdReference(b), MmdOptions{unbiased}), expected, 1e-12);
    }
  }
}

TEST(EnergyMmd, VStatisticIsEnergyDistance) {
  std::mt19937_64 rng(52);
  const PointMatrix a = random_points(rng, 10, 2);
  const PointMatrix b = random_points(rng, 7, 2, 2.0);
  const double energy = 2.0 * mean_distance(a, b) - mean_distance(a, a) - mean_distance(b, b);
  EXPECT_NEAR(energy_mmd(a, b) * energy_mmd(a, b), energy, 1e-12);
}

TEST(EnergyMmd, ZeroForIdenticalSamplesAndSymmetric) {
  std::mt19937_64 rng(53);
  const PointMatrix a = random_points(rng, 15, 2);
  const PointMatrix b = random_points(rng, 11, 2);
  EXPECT_NEAR(energy_mmd(a, a), 0.0, 1e-6);
  EXPECT_NEAR(energy_mmd(a, b), energy_mmd(b, a), 1e-12);
  EXPECT_THROW(energy_mmd(a, PointMatrix(0, 2)), std::invalid_argument);
  EXPECT_THROW(energy_mmd(a, random_points(rng, 3, 3)), std::invalid_argument);
  EXPECT_THROW(energy_mmd(a, random_points(rng, 1, 2), MmdOptions{true}), std::invalid_argument);
}

TEST(ModeProportions, NearestCenterWithLowestIndexTies) {
  Eigen::MatrixXd centers(2, 2);
  centers << -1.0, 0.0, 1.0, 0.0;
  PointMatrix pts(4, 2);
  pts << -2.0, 0.0, 0.0, 5.0, 0.5, 0.0, 3.0, 1.0;
  const Eigen::VectorXd p = mode_proportions(pts, centers);
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_DOUBLE_EQ(p[1], 0.5);
  EXPECT_NEAR(p.sum(), 1.0, 1e-15);
}

TEST(MeanAndSe, MatchesTextbookFormula) {
  const std::vector<double> v{1.0, 2.0, 4.0, 7.0};
  const MeanSe s = mean_and_se(v);
  EXPECT_DOUBLE_EQ(s.mean, 3.5);
  const double var = ((2.5 * 2.5) + (1.5 * 1.5) + (0.5 * 0.5) + (3.5 * 3.5)) / 3.0;
  EXPECT_NEAR(s.se, std::sqrt(var / 4.0), 1e-15);
  EXPECT_EQ(mean_and_se({3.0}).se, 0.0);
}

TEST(PathologyClosedForms, ScoreThresholdAndBandWidth) {
  EXPECT_NEAR(*score_threshold(3.0, 1.0), 2.2409, 1e-4);
  EXPECT_NEAR(*saddle_band_half_width(3.0, 1.0), 0.58758, 1e-5);
  EXPECT_NEAR(*saddle_band_half_width(2.0, 1.0), std::acosh(2.0) / 2.0, 1e-15);
  EXPECT_FALSE(score_threshold(1.0, 1.0).has_value());
  EXPECT_FALSE(saddle_band_half_width(0.5, 1.0).has_value());
}

TEST(PathologyClosedForms, BandEdgeIsWhereCurvatureChangesSign) {
  const double mu = 2.0;
  const double sigma = 1.0;
  const GaussianMixture model(GaussianMixtureSpec::symmetric_pair(2, mu, sigma, 0.5));
  const double z = *saddle_band_half_width(mu, sigma);
  EXPECT_GT(model.hess_diag_log(Eigen::Vector2d(z - 1e-3, 0.0))[0], 0.0);
  EXPECT_LT(model.hess_diag_log(Eigen::Vector2d(z + 1e-3, 0.0))[0], 0.0);
}

TEST(PathologyBounds, StandardNormalMoments) {
  const GaussianMixtureSpec spec = GaussianMixtureSpec::standard_normal(3);
  const SteinKernelParams params{1.5, 0.5, 1.0};
  const PathologyBounds b = pathology_bounds(spec, params, 0.0, 50000, 3);
  EXPECT_NEAR(b.e_score_sq.mean, 3.0, 4.0 * b.e_score_sq.se);
  EXPECT_EQ(b.e_lap_plus.mean, 0.0);
  EXPECT_NEAR(b.m_threshold, 1.0 + b.e_score_sq.mean / (2.0 * 0.5 * 3.0 / 2.25), 1e-12);
  EXPECT_FALSE(b.s0_max.has_value());
}

TEST(PathologyBounds, SymmetricPairReportsThresholds) {
  const GaussianMixtureSpec spec = GaussianMixtureSpec::symmetric_pair(2, 3.0, 1.0, 0.5);
  const PathologyBounds b = pathology_bounds(spec, SteinKernelParams{2.0, 0.5, 1.0}, 0.5, 1000, 1);
  ASSERT_TRUE(b.s0_max.has_value());
  EXPECT_NEAR(*b.z_max, 0.58758, 1e-5);
  const double denom = 2.0 * 0.5 * 2.0 / 4.0 + 2.0 * 0.5 * 0.5 / 2.0 + 0.25;
  EXPECT_NEAR(b.m_threshold, 1.0 + (b.e_score_sq.mean - 0.25) / denom, 1e-12);
}

TEST(IidKsdSquared, MatchesExpectedDiagonal) {
  // E KSD^2 of m iid draws is E k_p(X, X) / m = (2 beta d / ell^2 + d) / m for N(0, I)
  const GaussianMixtureSpec spec = GaussianMixtureSpec::standard_normal(2);
  const SteinKernelParams params{1.0, 0.5, 1.0};
  for (const std::size_t m : {2u, 5u, 20u}) {
    const MeanSe s = iid_ksd_squared(spec, params, m, 4000, 17 + m, false);
    EXPECT_NEAR(s.mean, 4.0 / static_cast<double>(m), 4.0 * s.se);
    const MeanSe l = iid_ksd_squared(spec, params, m, 200, 17 + m, true);
    EXPECT_GT(l.mean, 0.0);
  }
}

TEST(TruncatedModeSamples, StayWithinRadius) {
  const GaussianMixtureSpec spec = GaussianMixtureSpec::symmetric_pair(2, 3.0, 1.0, 0.2);
  const auto [left, right] = truncated_mode_samples(spec, 400, 600, 2.0, 5);
  ASSERT_EQ(left.rows(), 400);
  ASSERT_EQ(right.rows(), 600);
  for (Eigen::Index i = 0; i < left.rows(); ++i) EXPECT_LE((left.row(i) - spec.means.row(0)).norm(), 2.0 + 1e-12);
  for (Eigen::Index i = 0; i < right.rows(); ++i) EXPECT_LE((right.row(i) - spec.means.row(1)).norm(), 2.0 + 1e-12);
}

TEST(WeightSweep, QuadraticMatchesDirectWeightedSum) {
  const GaussianMixtureSpec spec = GaussianMixtureSpec::symmetric_pair(2, 3.0, 1.0, 0.2);
  const GaussianMixture model(spec);
  const auto [left, right] = truncated_mode_samples(spec, 30, 40, 2.0, 6);
  const SteinKernelParams params{2.0, 0.5, 1.0};
  const std::vector<double> grid = linear_grid(0.1, 0.9, 0.05);
  ASSERT_EQ(grid.size(), 17u);
  const double lambda = 0.05;
  const WeightSweepResult sweep = weight_sweep(left, right, model, grid, lambda, params);

  PointMatrix all(70, 2);
  all << left, right;
  const CandidatePool pool = make_pool(model, all, params);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    Eigen::VectorXd w(70);
    w.head(30).setConstant(grid[k] / 30.0);
    w.tail(40).setConstant((1.0 - grid[k]) / 40.0);
    EXPECT_NEAR(sweep.ksd_values[k], entropic_ksd_squared(pool, w, lambda), 1e-10);
  }
  const WeightSweepResult plain = reweight_sweep(sweep, 0.0);
  const WeightSweepResult direct = weight_sweep(left, right, model, grid, 0.0, params);
  for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_NEAR(plain.ksd_values[k], direct.ksd_values[k], 1e-12);
  EXPECT_EQ(plain.argmin_w, direct.argmin_w);
  EXPECT_NEAR(sweep.eta_estimate, std::abs(sweep.a_ll / sweep.a_rr - 1.0), 1e-15);
}

TEST(WeightSweep, ArgminTiesGoToSmallestWeight) {
  WeightSweepResult r;
  r.weights = {0.2, 0.4, 0.6, 0.8};
  r.a_ll = 0.0;
  r.a_rr = 0.0;
  r.a_lr = 0.0;
  const WeightSweepResult flat = reweight_sweep(r, 0.0);
  EXPECT_EQ(flat.argmin_w, 0.2);
}

TEST(LinearGrid, IncludesEndpoint) {
  const auto g = linear_grid(0.0, 1.0, 0.25);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_DOUBLE_EQ(g.back(), 1.0);
  EXPECT_THROW(linear_grid(1.0, 0.0, 0.1), std::invalid_argument);
}
