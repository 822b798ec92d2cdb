#include "steinthin/stein_kernels.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace steinthin {

void SteinKernelParams::validate() const {
  if (!(ell > 0.0) || !std::isfinite(ell)) {
    throw std::invalid_argument("kernel bandwidth ell must be positive, got " + std::to_string(ell));
  }
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("IMQ exponent beta must lie in (0, 1), got " + std::to_string(beta));
  }
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw std::invalid_argument("IMQ offset c must be positive, got " + std::to_string(c));
  }
}

void SteinKernelParams::validate_closed_form() const {
  validate();
  if (c != 1.0) {
    throw std::invalid_argument("closed-form Stein kernel requires c == 1, got " + std::to_string(c));
  }
}

namespace {

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b || a < 1) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

KernelEval imq_eval(ConstVec x, ConstVec y, const SteinKernelParams& params) {
  params.validate();
  require_same_dim(x.size(), y.size(), "imq_eval");
  const double inv_ell2 = 1.0 / (params.ell * params.ell);
  const Eigen::VectorXd u = x - y;
  const double r2 = u.squaredNorm();
  const double a = params.c + r2 * inv_ell2;
  const double base = std::pow(a, -params.beta);
  const double base1 = base / a;
  const double base2 = base1 / a;
  const double beta = params.beta;
  const auto d = static_cast<double>(x.size());

  KernelEval out;
  out.value = base;
  out.grad_x = (-2.0 * beta * inv_ell2 * base1) * u;
  out.grad_y = -out.grad_x;
  out.cross_div = 2.0 * beta * d * inv_ell2 * base1 -
                  4.0 * beta * (beta + 1.0) * inv_ell2 * inv_ell2 * r2 * base2;
  return out;
}

double langevin_stein_kernel(ConstVec x, ConstVec sx, ConstVec y, ConstVec sy,
                             const SteinKernelParams& params) {
  params.validate_closed_form();
  require_same_dim(x.size(), y.size(), "langevin_stein_kernel");
  require_same_dim(x.size(), sx.size(), "langevin_stein_kernel");
  require_same_dim(y.size(), sy.size(), "langevin_stein_kernel");
  return detail::stein_kernel_raw(x.data(), sx.data(), y.data(), sy.data(), x.size(),
                                  1.0 / (params.ell * params.ell), params.beta);
}

double stein_kernel_diag(ConstVec sx, const SteinKernelParams& params) {
  params.validate_closed_form();
  if (sx.size() < 1) throw std::invalid_argument("stein_kernel_diag: empty score");
  return 2.0 * params.beta * static_cast<double>(sx.size()) / (params.ell * params.ell) +
         sx.squaredNorm();
}

BandwidthEstimate median_heuristic(const PointMatrix& points, std::size_t cap, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (n < 2) throw std::invalid_argument("median_heuristic needs at least two points");
  if (cap < 2) throw std::invalid_argument("median_heuristic cap must be at least 2");

  std::vector<Eigen::Index> idx(n);
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  const std::size_t used = std::min(n, cap);
  if (used < n) {
    // partial Fisher-Yates: the first `used` slots become a uniform subset
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < used; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(used);
  }

  std::vector<double> dist;
  dist.reserve(used * (used - 1) / 2);
  for (std::size_t i = 0; i < used; ++i) {
    for (std::size_t j = i + 1; j < used; ++j) {
      dist.push_back((points.row(idx[i]) - points.row(idx[j])).norm());
    }
  }
  const std::size_t half = dist.size() / 2;
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(half), dist.end());
  double median = dist[half];
  if (dist.size() % 2 == 0) {
    const double lower = *std::max_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(half));
    median = 0.5 * (median + lower);
  }

  BandwidthEstimate est;
  est.points_used = used;
  if (!(median > 0.0) || !std::isfinite(median)) {
    est.ell = 1.0;
    est.degenerate = true;
  } else {
    est.ell = median;
  }
  return est;
}

double laplacian_stein_kernel(ConstVec x, ConstVec y, const DensityCurvature& at_x,
                              const DensityCurvature& at_y, const SteinKernelParams& params) {
  params.validate_closed_form();
  if (params.beta != 0.5) {
    throw std::invalid_argument("laplacian_stein_kernel is closed-form only for beta = 1/2");
  }
  const Eigen::Index d = x.size();
  require_same_dim(d, y.size(), "laplacian_stein_kernel");
  require_same_dim(d, at_x.grad.size(), "laplacian_stein_kernel");
  require_same_dim(d, at_x.hess_diag.size(), "laplacian_stein_kernel");
  require_same_dim(d, at_y.grad.size(), "laplacian_stein_kernel");
  require_same_dim(d, at_y.hess_diag.size(), "laplacian_stein_kernel");
  if (!(at_x.density > 0.0) || !(at_y.density > 0.0)) {
    throw std::domain_error("laplacian_stein_kernel: density vanishes at an evaluation point");
  }

  const double l2 = params.ell * params.ell;
  const double l4 = l2 * l2;
  const double l6 = l4 * l2;
  const double l8 = l4 * l4;
  const double k = 1.0 / std::sqrt(1.0 + (x - y).squaredNorm() / l2);
  const double k3 = k * k * k;
  const double k5 = k3 * k * k;
  const double k7 = k5 * k * k;
  const double k9 = k7 * k * k;

  double total = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double u = x[j] - y[j];
    const double u2 = u * u;
    // derivatives of k in coordinate j only
    const double dy = u * k3 / l2;
    const double dx = -dy;
    const double dyy = -k3 / l2 + 3.0 * u2 * k5 / l4;
    const double dxx = dyy;
    const double dxdy = -dyy;
    const double dxxy = -9.0 * u * k5 / l4 + 15.0 * u2 * u * k7 / l6;
    const double dxyy = -dxxy;
    const double dxxyy = 9.0 * k5 / l4 - 90.0 * u2 * k7 / l6 + 105.0 * u2 * u2 * k9 / l8;

    // density derivatives relative to the density itself
    const double gx = at_x.grad[j] / at_x.density;
    const double gy = at_y.grad[j] / at_y.density;
    const double hx = at_x.hess_diag[j] / at_x.density;
    const double hy = at_y.hess_diag[j] / at_y.density;

    total += hx * hy * k + 2.0 * hx * gy * dy + hx * dyy + 2.0 * gx * hy * dx +
             4.0 * gx * gy * dxdy + 2.0 * gx * dxyy + hy * dxx + 2.0 * gy * dxxy + dxxyy;
  }
  return total;
}

}  // namespace steinthin
