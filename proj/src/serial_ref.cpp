#include "quasipost/serial_ref.hpp"

#include <cmath>
#include <string>

#include "quasipost/errors.hpp"
#include "quasipost/quad.hpp"

namespace qp::serial {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

Eigen::VectorXd mean_vector(const QuasiModel& model, const MatrixXd& X,
                            const VectorXd& beta) {
  VectorXd mu(X.rows());
  for (Index i = 0; i < X.rows(); ++i) {
    mu[i] = model.link().inverse(X.row(i).dot(beta));
  }
  return mu;
}

double quasi_loglik(const QuasiModel& model, const Dataset& data,
                    const VectorXd& beta, double psi) {
  const auto& V = model.variance();
  double total = 0.0;
  for (Index i = 0; i < data.n(); ++i) {
    const double mu = model.link().inverse(data.X.row(i).dot(beta));
    const double term = V.has_closed_form()
                            ? V.loglik_term(data.y[i], mu)
                            : quasi_loglik_quadrature(V, data.y[i], mu, 1.0);
    if (!std::isfinite(term)) {
      throw EvalError("non-finite quasi-log-likelihood contribution at observation " +
                          std::to_string(i + 1),
                      i);
    }
    total += term;
  }
  return total / psi;
}

Eigen::VectorXd quasi_score(const QuasiModel& model, const Dataset& data,
                            const VectorXd& beta, double psi) {
  const auto& V = model.variance();
  const auto& link = model.link();
  VectorXd score = VectorXd::Zero(data.p());
  for (Index i = 0; i < data.n(); ++i) {
    const double mu = link.inverse(data.X.row(i).dot(beta));
    const double u = (data.y[i] - mu) / (V(mu) * link.deriv(mu));
    score += u * data.X.row(i).transpose();
  }
  return score / psi;
}

Eigen::MatrixXd expected_information(const QuasiModel& model,
                                     const Dataset& data, const VectorXd& beta,
                                     double psi) {
  const auto& V = model.variance();
  const auto& link = model.link();
  MatrixXd info = MatrixXd::Zero(data.p(), data.p());
  for (Index i = 0; i < data.n(); ++i) {
    const double mu = link.inverse(data.X.row(i).dot(beta));
    const double gp = link.deriv(mu);
    const double d = 1.0 / (V(mu) * gp * gp);
    info.noalias() += d * data.X.row(i).transpose() * data.X.row(i);
  }
  return info / psi;
}

}  // namespace qp::serial
