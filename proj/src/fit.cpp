#include "quasipost/fit.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/QR>
#include <cmath>
#include <limits>
#include <string>

namespace qp {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Response pulled to the domain interior before applying the link, so the
// least-squares initialization is defined for every family.
double clamp_for_init(const LinkFunction& link, double y) {
  switch (link.kind()) {
    case LinkKind::Identity: return y;
    case LinkKind::Log: return std::max(y, 0.1);
    case LinkKind::Logit: return std::min(std::max(y, 0.02), 0.98);
  }
  return y;
}

VectorXd initial_beta(const QuasiModel& model, const Dataset& data,
                      const ScoringConfig& config) {
  switch (config.init) {
    case ScoringConfig::Init::Zeros:
      return VectorXd::Zero(data.p());
    case ScoringConfig::Init::User:
      if (config.init_beta.size() != data.p()) {
        throw ValidationError("user initialization has wrong dimension");
      }
      return config.init_beta;
    case ScoringConfig::Init::LinkOfMean: {
      VectorXd z(data.n());
      for (Index i = 0; i < data.n(); ++i) {
        z[i] = model.link().g(clamp_for_init(model.link(), data.y[i]));
      }
      return data.X.colPivHouseholderQr().solve(z);
    }
  }
  return VectorXd::Zero(data.p());
}

double try_loglik(const QuasiModel& model, const Dataset& data,
                  const VectorXd& beta, double psi, EvalCounters* counters) {
  try {
    return quasi_loglik(model, data, beta, psi, counters);
  } catch (const NumericalError&) {
    return -std::numeric_limits<double>::infinity();
  } catch (const DomainError&) {
    return -std::numeric_limits<double>::infinity();
  }
}

}  // namespace

FitResult fit_mql(const QuasiModel& model, const Dataset& data,
                  const ScoringConfig& config) {
  data.validate();
  data.validate_response(model.variance());
  if (config.max_iter < 1) throw ValidationError("max_iter must be >= 1");
  if (!(config.score_tol > 0.0)) throw ValidationError("score_tol must be > 0");
  if (data.n() < data.p()) {
    throw ValidationError("need n >= p observations to fit");
  }
  if (data.X.colPivHouseholderQr().rank() < data.p()) {
    throw SingularError("design matrix is rank deficient");
  }

  const double psi = config.psi;
  EvalCounters counters;
  FitResult result;
  VectorXd beta = initial_beta(model, data, config);
  double loglik = try_loglik(model, data, beta, psi, &counters);
  if (!std::isfinite(loglik)) {
    // fall back to zero start if the initialization is infeasible
    beta.setZero();
    loglik = try_loglik(model, data, beta, psi, &counters);
  }

  // Convergence is checked on the psi-free score so that the iteration path
  // is the same for every dispersion value.
  const auto unit_norm = [psi](const VectorXd& s) {
    return (s * psi).lpNorm<Eigen::Infinity>();
  };
  VectorXd score = quasi_score(model, data, beta, psi, &counters);
  int iter = 0;
  while (iter < config.max_iter && unit_norm(score) >= config.score_tol) {
    ++iter;
    const MatrixXd info = expected_information(model, data, beta, psi, &counters);
    Eigen::LDLT<MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw SingularError("expected information is singular at iteration " +
                          std::to_string(iter));
    }
    const VectorXd direction = ldlt.solve(score);

    // Once the predicted quadratic gain drops below the floating-point
    // resolution of the objective, the monotonicity check only samples
    // rounding noise and would reject genuine Newton polish steps; take the
    // full scoring step in that regime.
    const double predicted_gain = 0.5 * score.dot(direction);
    const double objective_noise =
        64.0 * std::numeric_limits<double>::epsilon() * std::abs(loglik);
    bool improved = false;
    if (!std::isfinite(loglik) || predicted_gain <= objective_noise) {
      beta += direction;
      loglik = try_loglik(model, data, beta, psi, &counters);
      improved = true;
    } else {
      // step halving keeps the ascent monotone for non-canonical pairs
      double step = 1.0;
      for (int h = 0; h <= config.step_halvings; ++h) {
        const VectorXd candidate = beta + step * direction;
        const double cand_loglik =
            try_loglik(model, data, candidate, psi, &counters);
        if (cand_loglik >= loglik) {
          beta = candidate;
          loglik = cand_loglik;
          improved = true;
          break;
        }
        step *= 0.5;
      }
    }
    score = quasi_score(model, data, beta, psi, &counters);
    if (!improved) break;
  }

  result.beta_hat = beta;
  result.iterations = iter;
  result.score_norm =
      quasi_score(model, data, beta, 1.0).lpNorm<Eigen::Infinity>();
  result.converged = result.score_norm < config.score_tol;
  result.clamp_events = counters.clamps;
  if (!result.converged) {
    throw DivergedError("Fisher scoring did not converge after " +
                            std::to_string(iter) + " iterations (|score| = " +
                            std::to_string(result.score_norm) + ")",
                        result);
  }
  result.psi_hat =
      estimate_dispersion_mom(model, data, beta, &result.perfect_fit);
  const double psi_info = result.perfect_fit ? 1.0 : result.psi_hat;
  result.information = expected_information(model, data, beta, psi_info);
  return result;
}

double estimate_dispersion_mom(const QuasiModel& model, const Dataset& data,
                               const VectorXd& beta_hat, bool* perfect_fit) {
  if (data.n() <= data.p()) {
    throw DofError("method-of-moments dispersion requires n > p");
  }
  const VectorXd mu = mean_vector(model, data.X, beta_hat);
  double ss = 0.0;
  for (Index i = 0; i < data.n(); ++i) {
    const double r = data.y[i] - mu[i];
    ss += r * r / model.variance()(mu[i]);
  }
  const double psi = ss / static_cast<double>(data.n() - data.p());
  if (perfect_fit) *perfect_fit = (psi == 0.0);
  return psi;
}

double estimate_dispersion_mom_grouped(const QuasiModel& model,
                                       const Dataset& data) {
  Dataset aug{data.y, group_augmented_design(data, true), {}, 0};
  const FitResult fit = fit_mql(model, aug);
  return fit.psi_hat;
}

double estimate_dispersion_llb(const QuasiModel& model, const Dataset& data,
                               const VectorXd& beta_hat) {
  const Index n = data.n();
  const VectorXd mu = mean_vector(model, data.X, beta_hat);
  const VectorXd u = score_weights(model, data.y, mu);
  const VectorXd w = loss_hessian_weights(model, data.y, mu);
  const MatrixXd j = (data.X.transpose() * w.asDiagonal() * data.X) /
                     static_cast<double>(n);
  const MatrixXd h =
      (data.X.transpose() * u.array().square().matrix().asDiagonal() * data.X) /
      static_cast<double>(n);
  Eigen::FullPivLU<MatrixXd> lu(h);
  if (!lu.isInvertible()) {
    throw SingularError("loss gradient outer-product matrix h_n is singular");
  }
  const MatrixXd jhj = j * lu.solve(j);
  const double denom = jhj.trace();
  if (!(std::abs(denom) > 0.0) || !std::isfinite(denom)) {
    throw SingularError("tr(j h^{-1} j) is not invertible");
  }
  return j.trace() / denom;
}

CoarseningAlpha coarsening_alpha(double psi, Index n) {
  if (!(psi > 0.0)) throw DomainError("coarsening_alpha requires psi > 0");
  CoarseningAlpha out;
  if (psi == 1.0) {
    out.alpha = std::numeric_limits<double>::infinity();
    out.infinite = true;
    return out;
  }
  out.alpha = static_cast<double>(n) / (psi - 1.0);
  out.underdispersed = psi < 1.0;
  return out;
}

double psi_from_alpha(double alpha, Index n) {
  if (std::isinf(alpha)) return 1.0;
  if (alpha == 0.0) throw DomainError("psi_from_alpha requires alpha != 0");
  return (alpha + static_cast<double>(n)) / alpha;
}

}  // namespace qp
