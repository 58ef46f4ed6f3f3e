#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace qp {

// Post-warmup draws across chains. draws[c] is (retained x dim); rhat/ess are
// filled by diagnostics() when at least two chains are present.
struct ChainSet {
  std::vector<Eigen::MatrixXd> draws;
  int warmup = 0;
  std::vector<double> acceptance_rate;  // per chain, post-warmup phase
  Eigen::VectorXd rhat;
  Eigen::VectorXd ess;
  std::uint64_t seed = 0;

  int n_chains() const { return static_cast<int>(draws.size()); }
  Eigen::Index n_draws() const { return draws.empty() ? 0 : draws[0].rows(); }
  Eigen::Index dim() const { return draws.empty() ? 0 : draws[0].cols(); }

  // All retained draws stacked in chain order.
  Eigen::MatrixXd pooled() const {
    Eigen::MatrixXd out(n_draws() * n_chains(), dim());
    for (int c = 0; c < n_chains(); ++c) {
      out.middleRows(c * n_draws(), n_draws()) = draws[c];
    }
    return out;
  }
};

}  // namespace qp
