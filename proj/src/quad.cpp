#include "quasipost/quad.hpp"

namespace qp {

double quasi_loglik_quadrature(const VarianceFunction& variance, double y,
                               double mu, double psi, QuadratureOptions opt) {
  if (!(psi > 0.0)) throw DomainError("quadrature requires psi > 0");
  const double a = variance.baseline();
  if (mu != a && !variance.domain().contains(mu)) {
    throw DomainError("quadrature endpoint mu outside the mean domain");
  }
  auto integrand = [&](double t) { return (y - t) / variance(t); };
  return adaptive_simpson(integrand, a, mu, opt) / psi;
}

}  // namespace qp
