#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "quasipost/chains.hpp"

namespace qp {

struct Diagnostics {
  Eigen::VectorXd rhat;  // split-Rhat; +inf for zero-variance parameters
  Eigen::VectorXd ess;   // autocorrelation ESS on split chains; 0 sentinel
  Eigen::VectorXd mcse;  // sd / sqrt(ess)
};

// Split-Rhat and Geyer initial-monotone-sequence effective sample size,
// computed per parameter on the post-warmup draws. Requires >= 2 chains and
// >= 4 draws per chain.
Diagnostics diagnostics(const ChainSet& chains);

enum class IntervalKind { EqualTailed, Hpd };

struct CredibleSet {
  double level = 0.0;
  IntervalKind kind = IntervalKind::EqualTailed;
  std::vector<std::pair<double, double>> intervals;  // per parameter
};

// Per-parameter credible intervals from the pooled post-warmup draws.
// EqualTailed uses the (rho/2, 1-rho/2) empirical quantiles; Hpd the shortest
// window containing a fraction rho of the sorted draws.
CredibleSet credible_sets(const ChainSet& chains, double level,
                          IntervalKind kind);

// Interpolated quantile (R type 7) of an unsorted copy of the values.
double empirical_quantile(Eigen::VectorXd values, double q);

}  // namespace qp
