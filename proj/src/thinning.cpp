#include "steinthin/thinning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

namespace steinthin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Best {
  double value = kInf;
  Eigen::Index index = -1;

  void offer(double v, Eigen::Index i) {
    // ties go to the lowest index; +inf and NaN are never taken
    if (v < value || (v == value && index >= 0 && i < index)) {
      value = v;
      index = i;
    }
  }
  void merge(const Best& other) {
    if (other.index < 0) return;
    offer(other.value, other.index);
  }
};

double inv_ell2(const CandidatePool& pool) { return 1.0 / (pool.kernel.ell * pool.kernel.ell); }

// Greedy minimisation of diag[i] + extra_t(i) + 2 * running[i]. The running
// sums of k_p against the current selection are the only O(n) state kept
// between iterations.
template <typename Extra>
ThinningResult greedy(const CandidatePool& pool, std::size_t m, const std::vector<bool>& selectable,
                      Extra extra, ThinningOptions opts) {
  pool.validate();
  if (m == 0) throw std::invalid_argument("thinning size m must be at least 1");
  const Eigen::Index n = pool.size();
  const Eigen::Index d = pool.dim();
  if (std::none_of(selectable.begin(), selectable.end(), [](bool b) { return b; })) {
    throw std::runtime_error("thinning: no selectable candidate in the pool");
  }

  Eigen::VectorXd diag(n);
  for (Eigen::Index i = 0; i < n; ++i) diag[i] = selectable[static_cast<std::size_t>(i)] ? pool.diag_at(i) : kInf;
  Eigen::VectorXd running = Eigen::VectorXd::Zero(n);

  const double il2 = inv_ell2(pool);
  const double beta = pool.kernel.beta;
  const double* pts = pool.points.data();
  const double* scs = pool.scores.data();

  // One pass: optionally fold the newest selection into the running sums,
  // then evaluate the objective for iteration t and keep the argmin.
  auto scan = [&](Eigen::Index begin, Eigen::Index end, Eigen::Index newest, std::size_t t) {
    Best best;
    const double* xn = newest >= 0 ? pts + newest * d : nullptr;
    const double* sn = newest >= 0 ? scs + newest * d : nullptr;
    for (Eigen::Index i = begin; i < end; ++i) {
      if (!selectable[static_cast<std::size_t>(i)]) continue;
      if (newest >= 0) {
        running[i] += detail::stein_kernel_raw(xn, sn, pts + i * d, scs + i * d, d, il2, beta);
      }
      const double obj = diag[i] + extra(i, t) + 2.0 * running[i];
      best.offer(obj, i);
    }
    return best;
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(n / 2048 + 1)));
  auto run_scan = [&](Eigen::Index newest, std::size_t t) {
    if (workers == 1) return scan(0, n, newest, t);
    std::vector<Best> partial(workers);
    {
      std::vector<std::jthread> pool_threads;
      const Eigen::Index chunk = (n + workers - 1) / workers;
      for (unsigned w = 0; w < workers; ++w) {
        const Eigen::Index b = std::min<Eigen::Index>(n, w * chunk);
        const Eigen::Index e = std::min<Eigen::Index>(n, b + chunk);
        pool_threads.emplace_back([&, w, b, e] { partial[w] = scan(b, e, newest, t); });
      }
    }
    Best best;
    for (const auto& p : partial) best.merge(p);
    return best;
  };

  ThinningResult result;
  result.masked = static_cast<std::size_t>(std::count(selectable.begin(), selectable.end(), false));
  result.indices.reserve(m);
  result.objective_trace.reserve(m);
  result.ksd_trace.reserve(m);

  double ksd_accum = 0.0;  // t^2 * KSD^2 of the current selection
  Eigen::Index newest = -1;
  for (std::size_t t = 1; t <= m; ++t) {
    const Best best = run_scan(newest, t);
    if (best.index < 0) throw std::runtime_error("thinning: objective is infinite for every candidate");
    ksd_accum += diag[best.index] + 2.0 * running[best.index];
    result.indices.push_back(best.index);
    result.objective_trace.push_back(best.value);
    result.ksd_trace.push_back(ksd_accum / static_cast<double>(t * t));
    newest = best.index;
  }
  return result;
}

}  // namespace

std::size_t CandidatePool::invalid_count() const {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), false));
}

void CandidatePool::validate() const {
  kernel.validate_closed_form();
  const Eigen::Index n = points.rows();
  if (n < 1) throw std::invalid_argument("candidate pool is empty");
  if (scores.rows() != n || scores.cols() != points.cols()) {
    throw std::invalid_argument("candidate pool: scores must match points in shape");
  }
  if (log_p.size() != n || lap_plus.size() != n || static_cast<Eigen::Index>(valid.size()) != n) {
    throw std::invalid_argument("candidate pool: per-point vectors must have n entries");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (valid[static_cast<std::size_t>(i)] && lap_plus[i] < 0.0) {
      throw std::invalid_argument("candidate pool: truncated Laplacian must be nonnegative");
    }
  }
}

double CandidatePool::kernel_at(Eigen::Index i, Eigen::Index j) const {
  return detail::stein_kernel_raw(points.row(i).data(), scores.row(i).data(), points.row(j).data(),
                                  scores.row(j).data(), dim(), 1.0 / (kernel.ell * kernel.ell),
                                  kernel.beta);
}

double CandidatePool::diag_at(Eigen::Index i) const {
  return 2.0 * kernel.beta * static_cast<double>(dim()) / (kernel.ell * kernel.ell) +
         scores.row(i).squaredNorm();
}

CandidatePool make_pool(const TargetModel& model, PointMatrix points, SteinKernelParams kernel) {
  kernel.validate_closed_form();
  if (points.cols() != model.dim()) {
    throw std::invalid_argument("make_pool: points have dimension " + std::to_string(points.cols()) +
                                " but the target has dimension " + std::to_string(model.dim()));
  }
  CandidatePool pool;
  const Eigen::Index n = points.rows();
  pool.scores.resize(n, points.cols());
  pool.log_p.resize(n);
  pool.lap_plus.resize(n);
  pool.valid.assign(static_cast<std::size_t>(n), true);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd x = points.row(i).transpose();
    const Eigen::VectorXd s = model.score(x);
    pool.scores.row(i) = s.transpose();
    pool.log_p[i] = model.log_density(x);
    pool.lap_plus[i] = model.hess_diag_log(x).array().max(0.0).sum();
    const bool ok = x.allFinite() && s.allFinite() && std::isfinite(pool.lap_plus[i]) &&
                    !std::isnan(pool.log_p[i]);
    if (!ok) {
      pool.valid[static_cast<std::size_t>(i)] = false;
      pool.lap_plus[i] = 0.0;
    }
  }
  pool.points = std::move(points);
  pool.kernel = kernel;
  return pool;
}

double ksd_squared(const CandidatePool& pool, const std::vector<Eigen::Index>& indices) {
  if (indices.empty()) throw std::invalid_argument("ksd_squared: empty selection");
  double total = 0.0;
  for (const Eigen::Index i : indices) {
    if (i < 0 || i >= pool.size()) throw std::out_of_range("ksd_squared: index out of range");
  }
  const std::size_t m = indices.size();
  for (std::size_t a = 0; a < m; ++a) {
    total += pool.diag_at(indices[a]);
    for (std::size_t b = a + 1; b < m; ++b) total += 2.0 * pool.kernel_at(indices[a], indices[b]);
  }
  return total / static_cast<double>(m * m);
}

namespace {

void check_weights(const CandidatePool& pool, const Eigen::VectorXd& weights) {
  if (weights.size() != pool.size()) throw std::invalid_argument("weights must have one entry per point");
  if ((weights.array() < 0.0).any() || !weights.allFinite()) {
    throw std::invalid_argument("weights must be finite and nonnegative");
  }
  if (std::abs(weights.sum() - 1.0) > 1e-9) throw std::invalid_argument("weights must sum to 1");
}

}  // namespace

double ksd_squared(const CandidatePool& pool, const Eigen::VectorXd& weights) {
  check_weights(pool, weights);
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) support.push_back(i);
  }
  double total = 0.0;
  for (std::size_t a = 0; a < support.size(); ++a) {
    const Eigen::Index i = support[a];
    total += weights[i] * weights[i] * pool.diag_at(i);
    for (std::size_t b = a + 1; b < support.size(); ++b) {
      const Eigen::Index j = support[b];
      total += 2.0 * weights[i] * weights[j] * pool.kernel_at(i, j);
    }
  }
  return total;
}

double entropic_ksd_squared(const CandidatePool& pool, const Eigen::VectorXd& weights, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("entropic_ksd_squared: lambda must be nonnegative");
  const double ksd = ksd_squared(pool, weights);
  if (lambda == 0.0) return ksd;
  double entropy = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (weights[i] == 0.0) continue;
    if (pool.log_p[i] == -kInf) return kInf;
    entropy += weights[i] * pool.log_p[i];
  }
  return ksd - lambda * entropy;
}

double l_ksd_squared(const CandidatePool& pool, const std::vector<Eigen::Index>& indices) {
  const double ksd = ksd_squared(pool, indices);
  double lap = 0.0;
  for (const Eigen::Index i : indices) lap += pool.lap_plus[i];
  const auto m = static_cast<double>(indices.size());
  return ksd + lap / (m * m);
}

Regularization Regularization::default_for(std::size_t m) {
  if (m == 0) throw std::invalid_argument("thinning size m must be at least 1");
  return Regularization{1.0 / static_cast<double>(m), true};
}

ThinningResult stein_thin(const CandidatePool& pool, std::size_t m, ThinningOptions opts) {
  return greedy(pool, m, pool.valid, [](Eigen::Index, std::size_t) { return 0.0; }, opts);
}

ThinningResult regularized_stein_thin(const CandidatePool& pool, std::size_t m, Regularization reg,
                                      ThinningOptions opts) {
  if (!(reg.lambda >= 0.0) || !std::isfinite(reg.lambda)) {
    throw std::invalid_argument("regularized_stein_thin: lambda must be finite and nonnegative");
  }
  std::vector<bool> selectable = pool.valid;
  if (reg.lambda > 0.0) {
    for (Eigen::Index i = 0; i < pool.size(); ++i) {
      if (!std::isfinite(pool.log_p[i])) selectable[static_cast<std::size_t>(i)] = false;
    }
    if (std::none_of(selectable.begin(), selectable.end(), [](bool b) { return b; })) {
      throw std::runtime_error("regularized_stein_thin: every candidate has log p = -inf");
    }
  }
  const bool lap = reg.laplacian;
  const double lambda = reg.lambda;
  auto extra = [&pool, lap, lambda](Eigen::Index i, std::size_t t) {
    double e = lap ? pool.lap_plus[i] : 0.0;
    if (lambda != 0.0) e -= lambda * static_cast<double>(t) * pool.log_p[i];
    return e;
  };
  return greedy(pool, m, selectable, extra, opts);
}

GreedyBoundCheck greedy_bound_check(const CandidatePool& pool, const ThinningResult& result, double lambda) {
  if (result.indices.empty()) throw std::invalid_argument("greedy_bound_check: empty thinning result");
  GreedyBoundCheck out;
  out.lhs = ksd_squared(pool, result.indices);

  std::vector<Eigen::Index> usable;
  for (Eigen::Index i = 0; i < pool.size(); ++i) {
    if (pool.valid[static_cast<std::size_t>(i)] && std::isfinite(pool.log_p[i])) usable.push_back(i);
  }
  Eigen::VectorXd uniform = Eigen::VectorXd::Zero(pool.size());
  for (const Eigen::Index i : usable) uniform[i] = 1.0 / static_cast<double>(usable.size());

  double max_diag = 0.0;
  double max_lap = 0.0;
  double max_abs_logp = 0.0;
  for (const Eigen::Index i : usable) {
    max_diag = std::max(max_diag, pool.diag_at(i));
    max_lap = std::max(max_lap, pool.lap_plus[i]);
    max_abs_logp = std::max(max_abs_logp, std::abs(pool.log_p[i]));
  }
  const auto m = static_cast<double>(result.indices.size());
  out.rhs = ksd_squared(pool, uniform) + (1.0 + std::log(m)) / m * (max_diag + max_lap) +
            2.0 * lambda * max_abs_logp;
  out.holds = out.lhs <= out.rhs;
  return out;
}

}  // namespace steinthin
