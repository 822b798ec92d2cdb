#include "steinthin/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "steinthin/samplers.hpp"
#include "steinthin/thinning.hpp"

namespace steinthin {

void CompensatedSum::add(double v) {
  const double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v)) {
    comp_ += (sum_ - t) + v;
  } else {
    comp_ += (v - t) + sum_;
  }
  sum_ = t;
}

namespace {

Eigen::VectorXd row_norms(const PointMatrix& p) { return p.rowwise().norm(); }

double energy_kernel(const PointMatrix& a, Eigen::Index i, double na, const PointMatrix& b,
                     Eigen::Index j, double nb) {
  return na + nb - (a.row(i) - b.row(j)).norm();
}

struct SelfTerms {
  double v = 0.0;
  double u = 0.0;
};

SelfTerms self_terms(const PointMatrix& p, const Eigen::VectorXd& norms) {
  const Eigen::Index n = p.rows();
  CompensatedSum off;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) off.add(energy_kernel(p, i, norms[i], p, j, norms[j]));
  }
  CompensatedSum diag;
  for (Eigen::Index i = 0; i < n; ++i) diag.add(2.0 * norms[i]);
  const auto nd = static_cast<double>(n);
  SelfTerms out;
  out.v = (2.0 * off.value() + diag.value()) / (nd * nd);
  out.u = n > 1 ? 2.0 * off.value() / (nd * (nd - 1.0)) : std::numeric_limits<double>::quiet_NaN();
  return out;
}

double cross_term(const PointMatrix& a, const Eigen::VectorXd& na, const PointMatrix& b,
                  const Eigen::VectorXd& nb) {
  CompensatedSum s;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) s.add(energy_kernel(a, i, na[i], b, j, nb[j]));
  }
  return s.value() / (static_cast<double>(a.rows()) * static_cast<double>(b.rows()));
}

void check_mmd_inputs(const PointMatrix& a, const PointMatrix& b, const MmdOptions& opts) {
  if (a.rows() == 0 || b.rows() == 0) throw std::invalid_argument("energy_mmd: empty sample");
  if (a.cols() != b.cols()) throw std::invalid_argument("energy_mmd: dimension mismatch");
  if (opts.unbiased && (a.rows() < 2 || b.rows() < 2)) {
    throw std::invalid_argument("energy_mmd: the unbiased estimate needs two points per sample");
  }
}

}  // namespace

MmdReference::MmdReference(PointMatrix reference) : points(std::move(reference)) {
  if (points.rows() == 0) throw std::invalid_argument("MMD reference sample is empty");
  norms = row_norms(points);
  const SelfTerms t = self_terms(points, norms);
  self_term_v = t.v;
  self_term_u = t.u;
}

double energy_mmd(const PointMatrix& a, const PointMatrix& b, MmdOptions opts) {
  check_mmd_inputs(a, b, opts);
  return energy_mmd(a, MmdReference(b), opts);
}

double energy_mmd(const PointMatrix& a, const MmdReference& ref, MmdOptions opts) {
  check_mmd_inputs(a, ref.points, opts);
  const Eigen::VectorXd na = row_norms(a);
  const SelfTerms sa = self_terms(a, na);
  const double cross = cross_term(a, na, ref.points, ref.norms);
  const double mmd2 = opts.unbiased ? sa.u + ref.self_term_u - 2.0 * cross
                                    : sa.v + ref.self_term_v - 2.0 * cross;
  return std::sqrt(std::max(0.0, mmd2));
}

Eigen::VectorXd mode_proportions(const PointMatrix& points, const Eigen::MatrixXd& centers) {
  if (centers.rows() < 1) throw std::invalid_argument("mode_proportions: need at least one center");
  if (points.rows() == 0) throw std::invalid_argument("mode_proportions: empty sample");
  if (centers.cols() != points.cols()) throw std::invalid_argument("mode_proportions: dimension mismatch");
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(centers.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    Eigen::Index best = 0;
    double best_d = (centers.row(0) - points.row(i)).squaredNorm();
    for (Eigen::Index k = 1; k < centers.rows(); ++k) {
      const double dk = (centers.row(k) - points.row(i)).squaredNorm();
      if (dk < best_d) {
        best_d = dk;
        best = k;
      }
    }
    counts[best] += 1.0;
  }
  return counts / static_cast<double>(points.rows());
}

MeanSe mean_and_se(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("mean_and_se: no values");
  const auto n = static_cast<double>(values.size());
  CompensatedSum s;
  for (double v : values) s.add(v);
  MeanSe out;
  out.mean = s.value() / n;
  if (values.size() > 1) {
    CompensatedSum ss;
    for (double v : values) ss.add((v - out.mean) * (v - out.mean));
    out.se = std::sqrt(ss.value() / (n - 1.0) / n);
  }
  return out;
}

std::optional<SymmetricPair> as_symmetric_pair(const GaussianMixtureSpec& spec) {
  if (spec.components() != 2) return std::nullopt;
  const double mu = spec.means(1, 0);
  if (!(mu > 0.0) || spec.means(0, 0) != -mu) return std::nullopt;
  for (Eigen::Index j = 1; j < spec.dim(); ++j) {
    if (spec.means(0, j) != 0.0 || spec.means(1, j) != 0.0) return std::nullopt;
  }
  const double v = spec.variances(0, 0);
  if ((spec.variances.array() != v).any()) return std::nullopt;
  return SymmetricPair{mu, std::sqrt(v)};
}

std::optional<double> score_threshold(double mu, double sigma) {
  if (!(mu > 0.0) || !(sigma > 0.0)) throw std::invalid_argument("score_threshold: mu and sigma must be positive");
  const double nu = mu / sigma;
  if (nu <= 1.0) return std::nullopt;
  const double root = std::sqrt(nu * nu - 1.0);
  return (nu * root - std::log(nu + root)) / mu;
}

std::optional<double> saddle_band_half_width(double mu, double sigma) {
  if (!(mu > 0.0) || !(sigma > 0.0)) {
    throw std::invalid_argument("saddle_band_half_width: mu and sigma must be positive");
  }
  if (mu / sigma <= 1.0) return std::nullopt;
  return sigma * sigma / mu * std::acosh(mu / sigma);
}

PathologyBounds pathology_bounds(const GaussianMixtureSpec& spec, const SteinKernelParams& params,
                                 double s0, std::size_t mc_n, std::uint64_t seed) {
  params.validate_closed_form();
  if (!(s0 >= 0.0)) throw std::invalid_argument("pathology_bounds: s0 must be nonnegative");
  if (mc_n < 2) throw std::invalid_argument("pathology_bounds: need at least two Monte Carlo draws");
  const GaussianMixture model(spec);
  const SampleSet draws = exact_mixture_sample(spec, mc_n, seed);

  std::vector<double> score_sq(mc_n);
  std::vector<double> lap(mc_n);
  for (std::size_t i = 0; i < mc_n; ++i) {
    const Eigen::VectorXd x = draws.points.row(static_cast<Eigen::Index>(i)).transpose();
    score_sq[i] = model.score(x).squaredNorm();
    lap[i] = model.hess_diag_log(x).array().max(0.0).sum();
  }

  PathologyBounds out;
  out.e_score_sq = mean_and_se(score_sq);
  out.e_lap_plus = mean_and_se(lap);
  const double beta = params.beta;
  const double ell = params.ell;
  const auto d = static_cast<double>(spec.dim());
  out.m_threshold = 1.0 + (out.e_score_sq.mean - s0 * s0) /
                              (2.0 * beta * d / (ell * ell) + 2.0 * beta * s0 / ell + s0 * s0);
  if (const auto pair = as_symmetric_pair(spec)) {
    out.s0_max = score_threshold(pair->mu, pair->sigma);
    out.z_max = saddle_band_half_width(pair->mu, pair->sigma);
  }
  return out;
}

MeanSe iid_ksd_squared(const GaussianMixtureSpec& spec, const SteinKernelParams& params,
                       std::size_t m, std::size_t replicates, std::uint64_t seed,
                       bool with_laplacian) {
  if (m < 1 || replicates < 2) throw std::invalid_argument("iid_ksd_squared: need m >= 1 and two replicates");
  const GaussianMixture model(spec);
  std::vector<Eigen::Index> all(m);
  for (std::size_t i = 0; i < m; ++i) all[i] = static_cast<Eigen::Index>(i);
  std::vector<double> values(replicates);
  for (std::size_t r = 0; r < replicates; ++r) {
    auto rng = make_rng(seed, r);
    const SampleSet s = exact_mixture_sample(spec, m, rng());
    const CandidatePool pool = make_pool(model, s.points, params);
    values[r] = with_laplacian ? l_ksd_squared(pool, all) : ksd_squared(pool, all);
  }
  return mean_and_se(values);
}

std::pair<PointMatrix, PointMatrix> truncated_mode_samples(const GaussianMixtureSpec& spec,
                                                           std::size_t n_left, std::size_t n_right,
                                                           double radius_sd, std::uint64_t seed) {
  spec.validate();
  if (spec.components() != 2) throw std::invalid_argument("truncated_mode_samples: need two components");
  if (n_left == 0 || n_right == 0) throw std::invalid_argument("truncated_mode_samples: empty cluster");
  if (!(radius_sd > 0.0)) throw std::invalid_argument("truncated_mode_samples: radius must be positive");
  const Eigen::Index d = spec.dim();
  auto draw = [&](Eigen::Index k, std::size_t n) {
    auto rng = make_rng(seed, static_cast<std::uint64_t>(k));
    std::normal_distribution<double> normal(0.0, 1.0);
    PointMatrix out(static_cast<Eigen::Index>(n), d);
    Eigen::VectorXd z(d);
    for (Eigen::Index i = 0; i < out.rows();) {
      for (Eigen::Index j = 0; j < d; ++j) z[j] = normal(rng);
      if (z.norm() > radius_sd) continue;
      for (Eigen::Index j = 0; j < d; ++j) {
        out(i, j) = spec.means(k, j) + std::sqrt(spec.variances(k, j)) * z[j];
      }
      ++i;
    }
    return out;
  };
  return {draw(0, n_left), draw(1, n_right)};
}

namespace {

void fill_sweep_values(WeightSweepResult& r) {
  r.ksd_values.clear();
  r.ksd_values.reserve(r.weights.size());
  double best = std::numeric_limits<double>::infinity();
  for (const double w : r.weights) {
    const double v = w * w * r.a_ll + (1.0 - w) * (1.0 - w) * r.a_rr + 2.0 * w * (1.0 - w) * r.a_lr -
                     r.lambda * (w * r.mean_log_p_left + (1.0 - w) * r.mean_log_p_right);
    r.ksd_values.push_back(v);
    if (v < best || (v == best && w < r.argmin_w)) {
      best = v;
      r.argmin_w = w;
    }
  }
}

}  // namespace

WeightSweepResult weight_sweep(const PointMatrix& left, const PointMatrix& right,
                               const TargetModel& target, const std::vector<double>& grid,
                               double lambda, const SteinKernelParams& params) {
  if (left.rows() == 0 || right.rows() == 0) throw std::invalid_argument("weight_sweep: empty cluster");
  if (left.cols() != right.cols()) throw std::invalid_argument("weight_sweep: cluster dimensions differ");
  if (grid.empty()) throw std::invalid_argument("weight_sweep: empty weight grid");
  for (const double w : grid) {
    if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("weight_sweep: weights must lie in [0, 1]");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("weight_sweep: lambda must be finite and nonnegative");
  }

  PointMatrix all(left.rows() + right.rows(), left.cols());
  all.topRows(left.rows()) = left;
  all.bottomRows(right.rows()) = right;
  const CandidatePool pool = make_pool(target, std::move(all), params);
  if (pool.invalid_count() > 0) throw std::invalid_argument("weight_sweep: non-finite score in a cluster");
  const Eigen::Index nl = left.rows();
  const Eigen::Index n = pool.size();

  CompensatedSum ll, rr, lr;
  for (Eigen::Index i = 0; i < n; ++i) {
    (i < nl ? ll : rr).add(pool.diag_at(i));
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double k = 2.0 * pool.kernel_at(i, j);
      if (j < nl) {
        ll.add(k);
      } else if (i >= nl) {
        rr.add(k);
      } else {
        lr.add(0.5 * k);
      }
    }
  }
  const auto dl = static_cast<double>(nl);
  const auto dr = static_cast<double>(n - nl);

  WeightSweepResult r;
  r.weights = grid;
  r.lambda = lambda;
  r.a_ll = ll.value() / (dl * dl);
  r.a_rr = rr.value() / (dr * dr);
  r.a_lr = lr.value() / (dl * dr);
  r.mean_log_p_left = pool.log_p.head(nl).mean();
  r.mean_log_p_right = pool.log_p.tail(n - nl).mean();
  r.eta_estimate = std::abs(r.a_ll / r.a_rr - 1.0);
  r.argmin_w = grid.front();
  fill_sweep_values(r);
  return r;
}

WeightSweepResult reweight_sweep(const WeightSweepResult& base, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("reweight_sweep: lambda must be finite and nonnegative");
  }
  WeightSweepResult r = base;
  r.lambda = lambda;
  r.argmin_w = r.weights.front();
  fill_sweep_values(r);
  return r;
}

std::vector<double> linear_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw std::invalid_argument("linear_grid: need step > 0 and hi >= lo");
  std::vector<double> out;
  for (int k = 0;; ++k) {
    const double v = lo + k * step;
    if (v > hi + 1e-9) break;
    out.push_back(std::min(v, hi));
  }
  return out;
}

}  // namespace steinthin
