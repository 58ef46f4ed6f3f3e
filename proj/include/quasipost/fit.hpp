#pragma once

#include <Eigen/Core>

#include "quasipost/errors.hpp"
#include "quasipost/model.hpp"

namespace qp {

struct ScoringConfig {
  enum class Init { Zeros, LinkOfMean, User };

  int max_iter = 100;
  double score_tol = 1e-8;
  int step_halvings = 30;
  Init init = Init::LinkOfMean;
  Eigen::VectorXd init_beta;  // used when init == User
  // The score root does not depend on psi; it only rescales the internal
  // objective, so beta_hat is identical for any value here.
  double psi = 1.0;
};

struct FitResult {
  Eigen::VectorXd beta_hat;
  double psi_hat = 1.0;           // method-of-moments dispersion at beta_hat
  Eigen::MatrixXd information;    // expected information at (beta_hat, psi_hat)
  int iterations = 0;
  bool converged = false;
  double score_norm = 0.0;        // sup-norm of the unit-psi score at beta_hat
  long clamp_events = 0;
  bool perfect_fit = false;       // all residuals zero, psi_hat reported as 0
};

// Thrown when scoring fails to reach the tolerance; carries the last iterate.
struct DivergedError : NumericalError {
  DivergedError(const std::string& what, FitResult partial)
      : NumericalError(what), last(std::move(partial)) {}
  FitResult last;
};

// Maximum quasi-likelihood via Fisher scoring with step halving. Convergence
// is declared on the sup-norm of the score, not on parameter change.
FitResult fit_mql(const QuasiModel& model, const Dataset& data,
                  const ScoringConfig& config = {});

// Method-of-moments dispersion: sum of squared Pearson residuals / (n - p).
// Requires n > p. A perfect fit yields 0 and sets *perfect_fit.
double estimate_dispersion_mom(const QuasiModel& model, const Dataset& data,
                               const Eigen::VectorXd& beta_hat,
                               bool* perfect_fit = nullptr);

// Plug-in dispersion for grouped data: the method of moments applied to a
// fixed-effects fit on the design augmented with group indicators.
double estimate_dispersion_mom_grouped(const QuasiModel& model,
                                       const Dataset& data);

// Loss-likelihood bootstrap dispersion: tr(j_n) / tr(j_n h_n^{-1} j_n) with
// j_n the mean per-observation loss Hessian and h_n the uncentered mean outer
// product of per-observation loss gradients, both at beta_hat.
double estimate_dispersion_llb(const QuasiModel& model, const Dataset& data,
                               const Eigen::VectorXd& beta_hat);

// Mapping between dispersion and the coarsening parameter of a power
// posterior: alpha = n / (psi - 1), psi = (alpha + n) / alpha.
struct CoarseningAlpha {
  double alpha = 0.0;
  bool infinite = false;        // psi == 1: standard posterior
  bool underdispersed = false;  // psi < 1: alpha returned negative, mapping
                                // outside the power-posterior interpretation
};

CoarseningAlpha coarsening_alpha(double psi, Eigen::Index n);
double psi_from_alpha(double alpha, Eigen::Index n);

}  // namespace qp
