#include "quasipost/posterior.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "quasipost/errors.hpp"

namespace qp {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {
constexpr double kLogTwoPi = 1.8378770664093454835606594728112;
}

Eigen::VectorXd pack_params(const ParamPack& parts, bool hierarchical) {
  if (!hierarchical) return parts.beta;
  VectorXd out(parts.beta.size() + parts.delta.size() + 1);
  out.head(parts.beta.size()) = parts.beta;
  out.segment(parts.beta.size(), parts.delta.size()) = parts.delta;
  out[out.size() - 1] = parts.log_sigma;
  return out;
}

ParamPack unpack_params(const VectorXd& params, Index p, int n_groups) {
  ParamPack parts;
  if (n_groups <= 0) {
    if (params.size() != p) {
      throw ValidationError("parameter vector has wrong dimension");
    }
    parts.beta = params;
    return parts;
  }
  if (params.size() != p + n_groups + 1) {
    throw ValidationError("packed parameter vector has wrong dimension");
  }
  parts.beta = params.head(p);
  parts.delta = params.segment(p, n_groups);
  parts.log_sigma = params[params.size() - 1];
  return parts;
}

double log_quasi_posterior(const PosteriorSpec& spec, const Dataset& data,
                           const VectorXd& params, EvalCounters* counters) {
  if (!(spec.psi > 0.0)) throw DomainError("posterior requires psi > 0");
  const Index p = data.p();

  if (!spec.hierarchical) {
    const ParamPack parts = unpack_params(params, p, 0);
    const double lp = spec.prior_beta.log_density(parts.beta);
    return lp + quasi_loglik(spec.model, data, parts.beta, spec.psi, counters);
  }

  const auto& hier = *spec.hierarchical;
  if (!data.grouped() || data.n_groups != hier.n_groups) {
    throw ValidationError("hierarchical spec requires matching group labels");
  }
  const ParamPack parts = unpack_params(params, p, hier.n_groups);
  const double sigma = std::exp(parts.log_sigma);

  VectorXd eta = data.X * parts.beta;
  for (Index i = 0; i < data.n(); ++i) {
    eta[i] += parts.delta[data.groups[i]];
  }
  double value = quasi_loglik_eta(spec.model, data.y, eta, spec.psi, counters);
  value += spec.prior_beta.log_density(parts.beta);
  // delta_j ~ N(0, sigma^2), sigma treated as a standard deviation
  const double J = static_cast<double>(hier.n_groups);
  value += -0.5 * parts.delta.squaredNorm() / (sigma * sigma) -
           J * parts.log_sigma - 0.5 * kLogTwoPi * J;
  // prior on sigma plus the Jacobian of the log transform
  value += hier.prior_sigma.log_density(sigma) + parts.log_sigma;
  return value;
}

LaplaceApprox laplace_approx(const PosteriorSpec& spec, const Dataset& data,
                             const FitResult& fit) {
  if (spec.hierarchical) {
    throw ValidationError("laplace_approx covers fixed-effects posteriors only");
  }
  if (!fit.converged) {
    throw ValidationError("laplace_approx requires a converged fit");
  }
  const MatrixXd info =
      expected_information(spec.model, data, fit.beta_hat, spec.psi);
  Eigen::LDLT<MatrixXd> ldlt(info);
  // isPositive() accepts semidefinite matrices, so check D explicitly
  const auto& D = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      !(D.minCoeff() > D.maxCoeff() * 1e-14)) {
    throw SingularError("expected information is singular");
  }
  LaplaceApprox out;
  out.mean = fit.beta_hat;
  out.covariance =
      ldlt.solve(MatrixXd::Identity(info.rows(), info.cols()));
  out.covariance = ((out.covariance + out.covariance.transpose()) * 0.5).eval();
  return out;
}

}  // namespace qp
