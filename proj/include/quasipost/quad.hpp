#pragma once

#include <cmath>

#include "quasipost/errors.hpp"
#include "quasipost/variance.hpp"

namespace qp {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  int max_depth = 60;
};

namespace detail {

template <class F>
double simpson_step(F& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth, int max_depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double h = b - a;
  const double left = (h / 12.0) * (fa + 4.0 * flm + fm);
  const double right = (h / 12.0) * (fm + 4.0 * frm + fb);
  const double err = (left + right - whole) / 15.0;
  if (std::abs(err) <= tol) return left + right + err;
  if (depth >= max_depth) {
    throw QuadratureError("adaptive Simpson failed to converge at max depth");
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, max_depth) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace detail

// Adaptive Simpson with interval bisection. The integrand must be finite on
// [a, b]; a > b is handled by sign flip.
template <class F>
double adaptive_simpson(F&& f, double a, double b, QuadratureOptions opt = {}) {
  if (a == b) return 0.0;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fm) || !std::isfinite(fb)) {
    throw QuadratureError("integrand not finite on the integration interval");
  }
  const double whole = ((b - a) / 6.0) * (fa + 4.0 * fm + fb);
  return sign * detail::simpson_step(f, a, b, fa, fm, fb, whole, opt.abs_tol, 0,
                                     opt.max_depth);
}

// One observation's quasi-log-likelihood integral from the family baseline to
// mu, evaluated numerically. Used for families without a closed form and as
// an independent route for checking the closed forms.
double quasi_loglik_quadrature(const VarianceFunction& variance, double y,
                               double mu, double psi,
                               QuadratureOptions opt = {});

}  // namespace qp
