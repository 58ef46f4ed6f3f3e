#pragma once

#include <functional>
#include <optional>
#include <string>

#include "quasipost/link.hpp"

namespace qp {

enum class VarianceKind {
  Constant,  // V = 1
  Mu,        // V = mu
  MuSq,      // V = mu^2
  MuPow,     // V = mu^p, p > 2
  ExpMu,     // V = exp(mu)
  Binom,     // V = mu(1-mu)
  BinomSq,   // V = mu^2 (1-mu)^2
  BinomPow,  // V = mu^q (1-mu)^q, q > 0; no closed form, quadrature path
  NegBin,    // V = mu + mu^2/k, k > 0
  Custom,    // user-supplied positive map on an explicit domain
};

// Variance function of the second-order specification var(Y) = psi V(mu),
// together with its mean domain and the baseline used as the lower limit of
// the quasi-likelihood integral. Baselines are fixed per family so the
// closed forms drop the same beta-independent constants; quasi-log-likelihood
// values are comparable only within a fixed model.
class VarianceFunction {
 public:
  static VarianceFunction constant();
  static VarianceFunction mu();
  static VarianceFunction mu_sq();
  static VarianceFunction mu_pow(double p);    // requires p > 2
  static VarianceFunction exp_mu();
  static VarianceFunction binom();
  static VarianceFunction binom_sq();
  static VarianceFunction binom_pow(double q); // requires q > 0
  static VarianceFunction neg_bin(double k);   // requires k > 0
  static VarianceFunction custom(std::function<double(double)> v,
                                 MeanDomain domain, double baseline);
  static VarianceFunction parse(const std::string& name,
                                std::optional<double> param = std::nullopt);

  VarianceKind kind() const { return kind_; }
  double param() const { return param_; }  // p, q, or k
  const MeanDomain& domain() const { return domain_; }
  double baseline() const { return baseline_; }
  std::string name() const;

  double operator()(double mu) const;
  double deriv(double mu) const;  // V'; central difference for Custom

  bool has_closed_form() const {
    return kind_ != VarianceKind::BinomPow && kind_ != VarianceKind::Custom;
  }
  // Unit-dispersion log-quasi-likelihood contribution in closed form.
  // Valid only when has_closed_form().
  double loglik_term(double y, double mu) const;

  bool admissible_response(double y) const;
  std::string response_restriction() const;

 private:
  VarianceFunction(VarianceKind kind, double param, MeanDomain domain,
                   double baseline)
      : kind_(kind), param_(param), domain_(domain), baseline_(baseline) {}

  VarianceKind kind_;
  double param_ = 0.0;
  MeanDomain domain_;
  double baseline_ = 0.0;
  std::function<double(double)> custom_;
};

}  // namespace qp
