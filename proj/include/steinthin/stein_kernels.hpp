#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Core>

#include "steinthin/types.hpp"

namespace steinthin {

/// Parameters of the inverse multi-quadratic base kernel
/// k(x, y) = (c + |x - y|^2 / ell^2)^(-beta).
///
/// The closed-form Stein kernel paths (langevin_stein_kernel,
/// stein_kernel_diag, the Laplacian operator kernel) require c == 1.
struct SteinKernelParams {
  double ell = 1.0;
  double beta = 0.5;
  double c = 1.0;

  /// Throws std::invalid_argument unless ell > 0, 0 < beta < 1, c > 0.
  void validate() const;
  /// validate() plus c == 1.
  void validate_closed_form() const;
};

/// Base-kernel value with its first derivatives and the cross divergence
/// <grad_x, grad_y> k.
struct KernelEval {
  double value = 0.0;
  Eigen::VectorXd grad_x;
  Eigen::VectorXd grad_y;
  double cross_div = 0.0;
};

KernelEval imq_eval(ConstVec x, ConstVec y, const SteinKernelParams& params);

/// Langevin Stein kernel built on the IMQ kernel (c = 1). The scores are
/// supplied by the caller so the kernel stays independent of the target.
double langevin_stein_kernel(ConstVec x, ConstVec sx, ConstVec y, ConstVec sy,
                             const SteinKernelParams& params);

/// k_p(x, x) = 2 beta d / ell^2 + |s_p(x)|^2.
double stein_kernel_diag(ConstVec sx, const SteinKernelParams& params);

struct BandwidthEstimate {
  double ell = 1.0;
  bool degenerate = false;  // all sampled points identical; ell fell back to 1
  std::size_t points_used = 0;
};

/// Median of the pairwise Euclidean distances of at most `cap` points drawn
/// uniformly without replacement (seeded) from `points`.
BandwidthEstimate median_heuristic(const PointMatrix& points, std::size_t cap = 1000,
                                   std::uint64_t seed = 0);

/// Density p, its gradient and the diagonal of its Hessian at one point, all
/// on the raw (not log) scale.
struct DensityCurvature {
  double density = 0.0;
  Eigen::VectorXd grad;
  Eigen::VectorXd hess_diag;
};

/// Stein kernel of the second-order operator T_p g = Laplacian(p g) / p with
/// the IMQ kernel at beta = 1/2, c = 1. Experimental; only Gaussian mixtures
/// expose the raw-density curvature it needs.
double laplacian_stein_kernel(ConstVec x, ConstVec y, const DensityCurvature& at_x,
                              const DensityCurvature& at_y, const SteinKernelParams& params);

namespace detail {

/// Hot-loop form of the Langevin Stein kernel on raw rows. No validation.
inline double stein_kernel_raw(const double* x, const double* sx, const double* y,
                               const double* sy, Eigen::Index d, double inv_ell2,
                               double beta) {
  double r2 = 0.0;
  double score_dot_diff = 0.0;
  double score_dot = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double u = x[j] - y[j];
    r2 += u * u;
    score_dot_diff += (sx[j] - sy[j]) * u;
    score_dot += sx[j] * sy[j];
  }
  const double a = 1.0 + r2 * inv_ell2;
  const double base = (beta == 0.5) ? 1.0 / std::sqrt(a) : std::pow(a, -beta);
  const double base1 = base / a;
  const double base2 = base1 / a;
  return -4.0 * beta * (beta + 1.0) * inv_ell2 * inv_ell2 * r2 * base2 +
         2.0 * beta * inv_ell2 * (static_cast<double>(d) + score_dot_diff) * base1 +
         score_dot * base;
}

}  // namespace detail

}  // namespace steinthin
