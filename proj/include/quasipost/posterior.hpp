#pragma once

#include <Eigen/Core>
#include <optional>

#include "quasipost/data.hpp"
#include "quasipost/fit.hpp"
#include "quasipost/model.hpp"
#include "quasipost/prior.hpp"

namespace qp {

// Random-intercept extension: eta_i = x_i'beta + delta_{group(i)} with
// delta_j ~ N(0, sigma^2) and a prior on the scale sigma (as a standard
// deviation). Parameters are packed as [beta, delta_1..delta_J, log sigma].
struct HierarchySpec {
  Prior prior_sigma = Prior::half_normal(1.0);
  int n_groups = 0;  // J, must match Dataset.n_groups
};

struct PosteriorSpec {
  QuasiModel model;
  Prior prior_beta = Prior::flat();
  double psi = 1.0;  // plug-in loss scale, fixed before sampling
  std::optional<HierarchySpec> hierarchical;

  int dim(Eigen::Index p) const {
    return static_cast<int>(p) +
           (hierarchical ? hierarchical->n_groups + 1 : 0);
  }
};

struct ParamPack {
  Eigen::VectorXd beta;
  Eigen::VectorXd delta;     // empty unless hierarchical
  double log_sigma = 0.0;    // meaningful only when hierarchical
};

Eigen::VectorXd pack_params(const ParamPack& parts, bool hierarchical);
ParamPack unpack_params(const Eigen::VectorXd& params, Eigen::Index p,
                        int n_groups);

// Log quasi-posterior density up to a params-independent constant:
// log prior(beta) + quasi_loglik(beta; psi), plus for the hierarchical case
// the random-intercept log density, the sigma prior and the log-sigma
// transform Jacobian.
double log_quasi_posterior(const PosteriorSpec& spec, const Dataset& data,
                           const Eigen::VectorXd& params,
                           EvalCounters* counters = nullptr);

struct LaplaceApprox {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

// Normal approximation N(beta_hat, I(beta_hat)^{-1}) with the information
// evaluated at spec.psi. Requires a converged fit; fixed-effects specs only.
LaplaceApprox laplace_approx(const PosteriorSpec& spec, const Dataset& data,
                             const FitResult& fit);

}  // namespace qp
