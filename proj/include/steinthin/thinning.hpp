#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "steinthin/stein_kernels.hpp"
#include "steinthin/target_models.hpp"
#include "steinthin/types.hpp"

namespace steinthin {

/// Candidate points with everything the thinning objectives read per point.
/// `valid[i]` is false for rows with a non-finite point, score or diagonal;
/// such rows are never selected.
struct CandidatePool {
  PointMatrix points;  // n x d
  PointMatrix scores;  // n x d, s_p per point
  Eigen::VectorXd log_p;     // log p up to a constant
  Eigen::VectorXd lap_plus;  // truncated Laplacian of log p, >= 0
  SteinKernelParams kernel;
  std::vector<bool> valid;

  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }
  std::size_t invalid_count() const;
  /// Shape and sign checks; throws std::invalid_argument.
  void validate() const;

  double kernel_at(Eigen::Index i, Eigen::Index j) const;
  double diag_at(Eigen::Index i) const;
};

/// Evaluates scores, log densities and truncated Laplacians of `model` at
/// every row of `points`.
CandidatePool make_pool(const TargetModel& model, PointMatrix points, SteinKernelParams kernel);

/// V-statistic (1/m^2) sum_{i,j} k_p over an index multiset.
double ksd_squared(const CandidatePool& pool, const std::vector<Eigen::Index>& indices);
/// sum_{i,j} w_i w_j k_p(x_i, x_j) for a weight vector over the whole pool.
double ksd_squared(const CandidatePool& pool, const Eigen::VectorXd& weights);

/// KSD^2 minus lambda * sum_i w_i log p(x_i). Only differences over the same
/// pool are meaningful (log p carries an unknown constant). +inf when a
/// positively weighted point has log p = -inf.
double entropic_ksd_squared(const CandidatePool& pool, const Eigen::VectorXd& weights, double lambda);

/// KSD^2 V-statistic with the truncated Laplacian of log p added to the
/// diagonal terms.
double l_ksd_squared(const CandidatePool& pool, const std::vector<Eigen::Index>& indices);

struct ThinningResult {
  std::vector<Eigen::Index> indices;  // 0-based, repeats allowed
  std::vector<double> objective_trace;
  std::vector<double> ksd_trace;  // KSD^2 of the first t selections
  std::size_t masked = 0;         // candidates excluded as non-finite
};

/// Regularization strength used by regularized_stein_thin. At iteration t
/// the entropic term enters as -lambda * t * log p.
struct Regularization {
  double lambda = 0.0;
  bool laplacian = true;

  /// lambda = 1/m, Laplacian correction on.
  static Regularization default_for(std::size_t m);
};

struct ThinningOptions {
  /// Workers for the per-iteration candidate scan; results do not depend on it.
  unsigned threads = 1;
};

ThinningResult stein_thin(const CandidatePool& pool, std::size_t m, ThinningOptions opts = {});

ThinningResult regularized_stein_thin(const CandidatePool& pool, std::size_t m,
                                      Regularization reg, ThinningOptions opts = {});

struct GreedyBoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// Compares the KSD^2 of a regularized thinning output with the greedy
/// error bound. The optimal simplex-weight KSD^2 is replaced by the
/// uniform-weight KSD^2 over the pool, which can only enlarge the bound.
GreedyBoundCheck greedy_bound_check(const CandidatePool& pool, const ThinningResult& result, double lambda);

}  // namespace steinthin
