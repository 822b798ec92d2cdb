#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "steinthin/thinning.hpp"
#include "steinthin/types.hpp"

namespace steinthin::testing {

inline PointMatrix random_points(std::mt19937_64& rng, Eigen::Index n, Eigen::Index d, double scale = 1.0) {
  std::normal_distribution<double> z(0.0, scale);
  PointMatrix p(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) p(i, j) = z(rng);
  }
  return p;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index d, double scale = 1.0) {
  std::normal_distribution<double> z(0.0, scale);
  Eigen::VectorXd v(d);
  for (Eigen::Index j = 0; j < d; ++j) v[j] = z(rng);
  return v;
}

/// Central difference of f along coordinate j.
inline double central_diff(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x,
                           Eigen::Index j, double h) {
  const double x0 = x[j];
  x[j] = x0 + h;
  const double fp = f(x);
  x[j] = x0 - h;
  const double fm = f(x);
  return (fp - fm) / (2.0 * h);
}

/// Second central difference of f along coordinate j.
inline double second_diff(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x,
                          Eigen::Index j, double h) {
  const double f0 = f(x);
  const double x0 = x[j];
  x[j] = x0 + h;
  const double fp = f(x);
  x[j] = x0 - h;
  const double fm = f(x);
  return (fp - 2.0 * f0 + fm) / (h * h);
}

/// Plain IMQ kernel (c + |x - y|^2 / ell^2)^(-beta).
inline double imq_plain(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double ell, double beta, double c = 1.0) {
  return std::pow(c + (x - y).squaredNorm() / (ell * ell), -beta);
}

/// Langevin Stein kernel assembled from the plain IMQ kernel by finite
/// differences: div_x div_y k + <grad_x k, s_y> + <grad_y k, s_x> + k <s_x, s_y>.
inline double stein_kernel_fd(const Eigen::VectorXd& x, const Eigen::VectorXd& sx, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& sy, double ell, double beta) {
  const Eigen::Index d = x.size();
  const double h = 1e-4;
  auto k_of_x = [&](const Eigen::VectorXd& a) { return imq_plain(a, y, ell, beta); };
  auto k_of_y = [&](const Eigen::VectorXd& b) { return imq_plain(x, b, ell, beta); };
  double cross = 0.0;
  double gx_sy = 0.0;
  double gy_sx = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    gx_sy += central_diff(k_of_x, x, j, h) * sy[j];
    gy_sx += central_diff(k_of_y, y, j, h) * sx[j];
    auto dk_dyj = [&](const Eigen::VectorXd& a) {
      return central_diff([&](const Eigen::VectorXd& b) { return imq_plain(a, b, ell, beta); }, y, j, h);
    };
    cross += central_diff(dk_dyj, x, j, h);
  }
  return cross + gx_sy + gy_sx + imq_plain(x, y, ell, beta) * sx.dot(sy);
}

/// Langevin Stein kernel assembled from explicit IMQ gradients (c = 1).
inline double stein_kernel_grad_form(const Eigen::VectorXd& x, const Eigen::VectorXd& sx, const Eigen::VectorXd& y,
                                     const Eigen::VectorXd& sy, double ell, double beta) {
  const Eigen::VectorXd u = x - y;
  const double l2 = ell * ell;
  const double a = 1.0 + u.squaredNorm() / l2;
  const double k = std::pow(a, -beta);
  const Eigen::VectorXd grad_x = -2.0 * beta / l2 * std::pow(a, -beta - 1.0) * u;
  const Eigen::VectorXd grad_y = -grad_x;
  const double cross = 2.0 * beta * static_cast<double>(x.size()) / l2 * std::pow(a, -beta - 1.0) -
                       4.0 * beta * (beta + 1.0) / (l2 * l2) * std::pow(a, -beta - 2.0) * u.squaredNorm();
  return cross + grad_x.dot(sy) + grad_y.dot(sx) + k * sx.dot(sy);
}

inline double pool_kernel(const CandidatePool& pool, Eigen::Index i, Eigen::Index j) {
  return stein_kernel_grad_form(pool.points.row(i).transpose(), pool.scores.row(i).transpose(),
                                pool.points.row(j).transpose(), pool.scores.row(j).transpose(), pool.kernel.ell,
                                pool.kernel.beta);
}

/// V-statistic over an index multiset by the double loop.
inline double naive_ksd_squared(const CandidatePool& pool, const std::vector<Eigen::Index>& idx, bool laplacian) {
  double total = 0.0;
  for (const Eigen::Index i : idx) {
    for (const Eigen::Index j : idx) total += pool_kernel(pool, i, j);
    if (laplacian) total += pool.lap_plus[i];
  }
  const auto m = static_cast<double>(idx.size());
  return total / (m * m);
}

/// Greedy Stein thinning recomputing the full objective at every step.
/// With lambda == 0 and laplacian == false this is plain Stein thinning.
inline std::vector<Eigen::Index> naive_greedy(const CandidatePool& pool, std::size_t m, double lambda,
                                              bool laplacian) {
  std::vector<Eigen::Index> chosen;
  for (std::size_t t = 0; t < m; ++t) {
    Eigen::Index best = -1;
    double best_val = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < pool.size(); ++i) {
      if (!pool.valid[static_cast<std::size_t>(i)]) continue;
      double v = pool_kernel(pool, i, i);
      if (laplacian) v += pool.lap_plus[i];
      v -= lambda * static_cast<double>(t + 1) * pool.log_p[i];
      for (const Eigen::Index j : chosen) v += 2.0 * pool_kernel(pool, j, i);
      if (v < best_val) {
        best_val = v;
        best = i;
      }
    }
    chosen.push_back(best);
  }
  return chosen;
}

}  // namespace steinthin::testing
