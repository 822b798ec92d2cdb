#pragma once

#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Core>

#include "steinthin/target_models.hpp"
#include "steinthin/types.hpp"

namespace steinthin {

struct SampleMeta {
  std::string sampler;  // "exact" or "mala"
  std::uint64_t seed = 0;
  double step_size = 0.0;        // MALA only
  double acceptance_rate = 1.0;  // MALA only; 1 for exact draws
};

/// Ordered points, one per row, plus provenance.
struct SampleSet {
  PointMatrix points;
  SampleMeta meta;

  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }
};

/// Random engine for one stream. Streams for parallel chains derive from
/// (seed, stream) through splitmix64 so they never share state.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0);

SampleSet exact_mixture_sample(const GaussianMixtureSpec& spec, std::size_t n, std::uint64_t seed);
SampleSet exact_mixture_sample(const BananaTMixtureSpec& spec, std::size_t n, std::uint64_t seed);

struct ChainConfig {
  std::size_t n_steps = 1000;
  double step_size = 0.1;
  Eigen::VectorXd init;  // empty means the origin
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  void validate() const;
};

/// Metropolis-adjusted Langevin chain. Proposal
/// x' = x + (eps^2 / 2) s_p(x) + eps * xi. The output holds every state of
/// the chain including repeats from rejected proposals; there is no burn-in
/// removal.
SampleSet mala_sample(const TargetModel& model, const ChainConfig& cfg);

}  // namespace steinthin
