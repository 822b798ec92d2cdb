#include "steinthin/samplers.hpp"

#include <cmath>
#include <stdexcept>

namespace steinthin {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Eigen::Index draw_component(std::mt19937_64& rng, const Eigen::VectorXd& weights) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double acc = 0.0;
  Eigen::Index last_positive = 0;
  for (Eigen::Index k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    last_positive = k;
    acc += weights[k];
    if (u < acc) return k;
  }
  return last_positive;
}

}  // namespace

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream + 0x5851f42d4c957f2dULL)));
}

SampleSet exact_mixture_sample(const GaussianMixtureSpec& spec, std::size_t n, std::uint64_t seed) {
  spec.validate();
  auto rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SampleSet out;
  out.points.resize(static_cast<Eigen::Index>(n), spec.dim());
  for (Eigen::Index i = 0; i < out.points.rows(); ++i) {
    const Eigen::Index k = draw_component(rng, spec.weights);
    for (Eigen::Index j = 0; j < spec.dim(); ++j) {
      out.points(i, j) = spec.means(k, j) + std::sqrt(spec.variances(k, j)) * normal(rng);
    }
  }
  out.meta = SampleMeta{"exact", seed, 0.0, 1.0};
  return out;
}

SampleSet exact_mixture_sample(const BananaTMixtureSpec& spec, std::size_t n, std::uint64_t seed) {
  spec.validate();
  auto rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::chi_squared_distribution<double> chi2(spec.dof);
  SampleSet out;
  out.points.resize(static_cast<Eigen::Index>(n), spec.dim);
  Eigen::VectorXd z(spec.dim);
  for (Eigen::Index i = 0; i < out.points.rows(); ++i) {
    const Eigen::Index k = draw_component(rng, spec.weights);
    for (Eigen::Index j = 0; j < spec.dim; ++j) z[j] = normal(rng);
    z[0] *= spec.scale_first;
    z /= std::sqrt(chi2(rng) / spec.dof);
    z[1] += spec.b * z[0] * z[0] - 100.0 * spec.b;
    out.points.row(i) = (z + spec.centers[static_cast<std::size_t>(k)]).transpose();
  }
  out.meta = SampleMeta{"exact", seed, 0.0, 1.0};
  return out;
}

void ChainConfig::validate() const {
  if (n_steps < 1) throw std::invalid_argument("MALA: n_steps must be at least 1");
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw std::invalid_argument("MALA: step size must be positive");
  }
}

SampleSet mala_sample(const TargetModel& model, const ChainConfig& cfg) {
  cfg.validate();
  const Eigen::Index d = model.dim();
  Eigen::VectorXd x = cfg.init.size() == 0 ? Eigen::VectorXd::Zero(d) : cfg.init;
  if (x.size() != d) throw std::invalid_argument("MALA: init has the wrong dimension");
  if (!x.allFinite()) throw std::invalid_argument("MALA: init contains non-finite values");

  double logp = model.log_density(x);
  Eigen::VectorXd grad = model.score(x);
  if (!std::isfinite(logp)) throw std::invalid_argument("MALA: log density is not finite at init");
  if (!grad.allFinite()) throw std::invalid_argument("MALA: score is not finite at init");

  auto rng = make_rng(cfg.seed, cfg.stream);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double eps = cfg.step_size;
  const double half_eps2 = 0.5 * eps * eps;
  const double inv_2eps2 = 1.0 / (2.0 * eps * eps);

  SampleSet out;
  out.points.resize(static_cast<Eigen::Index>(cfg.n_steps), d);
  std::size_t accepted = 0;
  Eigen::VectorXd noise(d);
  for (std::size_t step = 0; step < cfg.n_steps; ++step) {
    for (Eigen::Index j = 0; j < d; ++j) noise[j] = normal(rng);
    const Eigen::VectorXd proposal = x + half_eps2 * grad + eps * noise;
    const double logp_new = model.log_density(proposal);
    const double u = unif(rng);
    if (std::isfinite(logp_new)) {
      const Eigen::VectorXd grad_new = model.score(proposal);
      if (grad_new.allFinite()) {
        const double fwd = (proposal - x - half_eps2 * grad).squaredNorm() * inv_2eps2;
        const double bwd = (x - proposal - half_eps2 * grad_new).squaredNorm() * inv_2eps2;
        const double log_alpha = logp_new - logp - bwd + fwd;
        if (std::log(u) < log_alpha) {
          x = proposal;
          logp = logp_new;
          grad = grad_new;
          ++accepted;
        }
      }
    }
    out.points.row(static_cast<Eigen::Index>(step)) = x.transpose();
  }
  out.meta = SampleMeta{"mala", cfg.seed, eps,
                        static_cast<double>(accepted) / static_cast<double>(cfg.n_steps)};
  return out;
}

}  // namespace steinthin
