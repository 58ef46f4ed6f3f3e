#pragma once

#include <cstdint>

#include "quasipost/chains.hpp"
#include "quasipost/posterior.hpp"

namespace qp {

struct SamplerConfig {
  int chains = 3;
  int draws = 1500;   // iterations per chain, warmup included
  int warmup = 500;
  std::uint64_t seed = 0;
  double target_accept = 0.234;
  bool parallel_chains = true;
};

// Gaussian random-walk Metropolis. The proposal covariance starts at
// (2.38^2 / d) I(beta_hat)^{-1} (its hierarchical analogue includes the
// random-intercept blocks) and only its global scale is adapted during
// warmup, Robbins-Monro style, toward the target acceptance rate; the
// proposal is frozen afterwards. Chains run on independent RNG streams
// derived from the seed, so results are reproducible for any thread count.
ChainSet sample_rwmh(const PosteriorSpec& spec, const Dataset& data,
                     const SamplerConfig& config);

}  // namespace qp
