#pragma once

#include <Eigen/Core>

#include "quasipost/data.hpp"
#include "quasipost/link.hpp"
#include "quasipost/variance.hpp"

namespace qp {

// Running counters filled by the evaluation kernels; surfaced in fit metadata.
struct EvalCounters {
  long clamps = 0;
};

// Second-order model: mean mu = g^{-1}(x'beta) with var(Y) = psi V(mu).
// The variance domain must coincide with the range of the inverse link, so a
// logit link pairs with the binomial-type families, a log link with the
// positive-mean families, and the identity link with families defined on R.
class QuasiModel {
 public:
  QuasiModel(LinkFunction link, VarianceFunction variance);

  const LinkFunction& link() const { return link_; }
  const VarianceFunction& variance() const { return variance_; }

 private:
  LinkFunction link_;
  VarianceFunction variance_;
};

// mu_i = g^{-1}(x_i'beta), clamped per the link policy.
Eigen::VectorXd mean_vector(const QuasiModel& model, const Eigen::MatrixXd& X,
                            const Eigen::VectorXd& beta,
                            EvalCounters* counters = nullptr);

// Sum of per-observation quasi-log-likelihood contributions divided by psi.
// Families without a closed form are integrated numerically. Throws EvalError
// with the observation index when a contribution is not finite.
double quasi_loglik(const QuasiModel& model, const Dataset& data,
                    const Eigen::VectorXd& beta, double psi,
                    EvalCounters* counters = nullptr);

// Gradient of quasi_loglik with respect to beta.
Eigen::VectorXd quasi_score(const QuasiModel& model, const Dataset& data,
                            const Eigen::VectorXd& beta, double psi,
                            EvalCounters* counters = nullptr);

// I(beta) = psi^{-1} X' D X with d_i = 1 / (V(mu_i) g'(mu_i)^2).
Eigen::MatrixXd expected_information(const QuasiModel& model,
                                     const Dataset& data,
                                     const Eigen::VectorXd& beta, double psi,
                                     EvalCounters* counters = nullptr);

// Variants on a precomputed linear predictor; the random-intercept path adds
// group offsets to eta before calling these.
Eigen::VectorXd mean_from_eta(const QuasiModel& model,
                              const Eigen::VectorXd& eta,
                              EvalCounters* counters = nullptr);
double quasi_loglik_eta(const QuasiModel& model, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& eta, double psi,
                        EvalCounters* counters = nullptr);

// Per-observation weights at given means (unit dispersion):
//   score weight   u_i = (y_i - mu_i) / (V(mu_i) g'(mu_i))
//   info weight    d_i = 1 / (V(mu_i) g'(mu_i)^2)
//   loss Hessian weight w_i such that the per-observation loss Hessian is
//   w_i x_i x_i'; includes the residual term, E[w_i] = d_i.
Eigen::VectorXd score_weights(const QuasiModel& model, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& mu);
Eigen::VectorXd info_weights(const QuasiModel& model, const Eigen::VectorXd& mu);
Eigen::VectorXd loss_hessian_weights(const QuasiModel& model,
                                     const Eigen::VectorXd& y,
                                     const Eigen::VectorXd& mu);

}  // namespace qp
