#include "quasipost/sampler.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <cmath>
#include <exception>
#include <limits>
#include <vector>

#include "quasipost/diagnostics.hpp"
#include "quasipost/parallel.hpp"
#include "quasipost/rng.hpp"

namespace qp {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log_posterior(const PosteriorSpec& spec, const Dataset& data,
                          const VectorXd& params) {
  try {
    const double lp = log_quasi_posterior(spec, data, params);
    return std::isfinite(lp) ? lp : kNegInf;
  } catch (const NumericalError&) {
    return kNegInf;
  } catch (const DomainError&) {
    return kNegInf;
  }
}

struct ProposalSetup {
  VectorXd center;  // packed parameter vector at the initialization point
  MatrixXd chol;    // lower Cholesky factor of the unscaled proposal covariance
};

MatrixXd cholesky_of_inverse(const MatrixXd& precision) {
  Eigen::LLT<MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) {
    throw SingularError("proposal precision matrix is not positive definite");
  }
  MatrixXd cov = llt.solve(MatrixXd::Identity(precision.rows(), precision.cols()));
  cov = ((cov + cov.transpose()) * 0.5).eval();
  Eigen::LLT<MatrixXd> cov_llt(cov);
  if (cov_llt.info() != Eigen::Success) {
    throw SingularError("proposal covariance is not positive definite");
  }
  return cov_llt.matrixL();
}

ProposalSetup setup_fixed_effects(const PosteriorSpec& spec,
                                  const Dataset& data) {
  if (spec.prior_beta.kind() == Prior::Kind::Flat && data.n() <= data.p()) {
    throw ValidationError(
        "flat-prior quasi-posterior needs n > p for an integrable target");
  }
  const FitResult fit = fit_mql(spec.model, data);
  ProposalSetup setup;
  setup.center = fit.beta_hat;
  setup.chol = cholesky_of_inverse(
      expected_information(spec.model, data, fit.beta_hat, spec.psi));
  return setup;
}

// Initialization for the random-intercept posterior: a fixed-effects fit on
// the design augmented with group indicators gives starting values for beta
// and delta; the proposal covariance is the inverse of the augmented
// information with the delta-prior precision added, extended with a
// curvature estimate for log sigma.
ProposalSetup setup_hierarchical(const PosteriorSpec& spec,
                                 const Dataset& data) {
  const Index n = data.n();
  const Index p = data.p();
  const int J = spec.hierarchical->n_groups;

  Dataset aug_data{data.y, group_augmented_design(data, true), {}, 0};
  const FitResult aug_fit = fit_mql(spec.model, aug_data);

  VectorXd gamma = VectorXd::Zero(J);
  gamma.tail(J - 1) = aug_fit.beta_hat.tail(J - 1);
  const double gamma_mean = gamma.mean();
  VectorXd delta0 = gamma.array() - gamma_mean;

  // least-squares projection of the group-free part of eta back onto X
  VectorXd eta_hat = aug_data.X * aug_fit.beta_hat;
  for (Index i = 0; i < n; ++i) eta_hat[i] -= delta0[data.groups[i]];
  VectorXd beta0 = data.X.colPivHouseholderQr().solve(eta_hat);

  double sigma0 = std::sqrt(delta0.squaredNorm() / std::max(1, J - 1));
  sigma0 = std::max(sigma0, 0.05);

  Dataset full_data{data.y, group_augmented_design(data, false), {}, 0};
  VectorXd packed_beta(p + J);
  packed_beta.head(p) = beta0;
  packed_beta.tail(J) = delta0;
  MatrixXd info =
      expected_information(spec.model, full_data, packed_beta, spec.psi);
  info.diagonal().tail(J).array() += 1.0 / (sigma0 * sigma0);

  const int d = static_cast<int>(p) + J + 1;
  MatrixXd precision = MatrixXd::Zero(d, d);
  precision.topLeftCorner(p + J, p + J) = info;
  precision(d - 1, d - 1) = 2.0 * static_cast<double>(J);

  ProposalSetup setup;
  ParamPack parts;
  parts.beta = beta0;
  parts.delta = delta0;
  parts.log_sigma = std::log(sigma0);
  setup.center = pack_params(parts, true);
  setup.chol = cholesky_of_inverse(precision);
  return setup;
}

struct ChainOutput {
  MatrixXd draws;
  double acceptance = 0.0;
};

ChainOutput run_chain(const PosteriorSpec& spec, const Dataset& data,
                      const SamplerConfig& config, const ProposalSetup& setup,
                      std::uint64_t chain_seed) {
  Rng rng(chain_seed);
  const Index d = setup.center.size();
  const double scale0 = 2.38 / std::sqrt(static_cast<double>(d));

  // jittered initialization, retried until the density is finite
  VectorXd state;
  double state_lp = kNegInf;
  for (int attempt = 0; attempt < 100; ++attempt) {
    VectorXd z(d);
    for (Index k = 0; k < d; ++k) z[k] = rng.normal();
    state = setup.center + 0.1 * (setup.chol * z);
    state_lp = safe_log_posterior(spec, data, state);
    if (std::isfinite(state_lp)) break;
  }
  if (!std::isfinite(state_lp)) {
    throw InitError("no valid chain initialization after 100 jitter attempts");
  }

  const int retained = config.draws - config.warmup;
  ChainOutput out;
  out.draws.resize(retained, d);

  double log_scale = std::log(scale0);
  long accepted_post = 0;
  VectorXd z(d), proposal(d);
  for (int t = 1; t <= config.draws; ++t) {
    for (Index k = 0; k < d; ++k) z[k] = rng.normal();
    proposal = state + std::exp(log_scale) * (setup.chol * z);
    const double prop_lp = safe_log_posterior(spec, data, proposal);
    const double log_ratio = prop_lp - state_lp;
    bool accept = false;
    if (log_ratio >= 0.0) {
      accept = true;
    } else if (std::isfinite(log_ratio)) {
      accept = std::log(rng.uniform()) < log_ratio;
    }
    if (accept) {
      state = proposal;
      state_lp = prop_lp;
    }
    if (t <= config.warmup) {
      const double alpha =
          log_ratio >= 0.0 ? 1.0 : (std::isfinite(log_ratio) ? std::exp(log_ratio) : 0.0);
      const double gain = std::pow(static_cast<double>(t), -0.66);
      log_scale += gain * (alpha - config.target_accept);
      log_scale = std::min(std::max(log_scale, std::log(scale0) - 10.0),
                           std::log(scale0) + 10.0);
    } else {
      if (accept) ++accepted_post;
      out.draws.row(t - config.warmup - 1) = state;
    }
  }
  out.acceptance = static_cast<double>(accepted_post) /
                   static_cast<double>(std::max(1, retained));
  return out;
}

}  // namespace

ChainSet sample_rwmh(const PosteriorSpec& spec, const Dataset& data,
                     const SamplerConfig& config) {
  data.validate();
  data.validate_response(spec.model.variance());
  if (config.chains < 1) throw ValidationError("need at least one chain");
  if (config.draws < 1) throw ValidationError("need draws >= 1");
  if (config.warmup < 0 || config.warmup >= config.draws) {
    throw ValidationError("need 0 <= warmup < draws");
  }
  if (spec.hierarchical &&
      (!data.grouped() || data.n_groups != spec.hierarchical->n_groups)) {
    throw ValidationError("hierarchical spec requires matching group labels");
  }

  const ProposalSetup setup = spec.hierarchical
                                  ? setup_hierarchical(spec, data)
                                  : setup_fixed_effects(spec, data);

  const int C = config.chains;
  std::vector<ChainOutput> outputs(static_cast<std::size_t>(C));
  std::vector<std::exception_ptr> errs(static_cast<std::size_t>(C));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) \
    if (config.parallel_chains && !in_parallel_region() && C > 1)
#endif
  for (int c = 0; c < C; ++c) {
    try {
      outputs[static_cast<std::size_t>(c)] =
          run_chain(spec, data, config, setup,
                    derive_seed(config.seed, static_cast<std::uint64_t>(c)));
    } catch (...) {
      errs[static_cast<std::size_t>(c)] = std::current_exception();
    }
  }
  for (const auto& e : errs) {
    if (e) std::rethrow_exception(e);
  }

  ChainSet set;
  set.warmup = config.warmup;
  set.seed = config.seed;
  set.draws.reserve(static_cast<std::size_t>(C));
  for (auto& o : outputs) {
    set.draws.push_back(std::move(o.draws));
    set.acceptance_rate.push_back(o.acceptance);
  }
  if (C >= 2 && set.n_draws() >= 4) {
    const Diagnostics diag = diagnostics(set);
    set.rhat = diag.rhat;
    set.ess = diag.ess;
  }
  return set;
}

}  // namespace qp
