#include "quasipost/rng.hpp"

#include <cmath>

#include "quasipost/errors.hpp"

namespace qp {

double Rng::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw DomainError("gamma variate requires shape > 0 and rate > 0");
  }
  if (shape < 1.0) {
    // Ga(a) = Ga(a+1) * U^{1/a}
    double g = gamma(shape + 1.0, 1.0);
    double u = uniform();
    return g * std::pow(u, 1.0 / shape) / rate;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    double v = t * t * t;
    double u = uniform();
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

}  // namespace qp
