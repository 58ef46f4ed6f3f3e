#include "quasipost/variance.hpp"

#include <cmath>

#include "quasipost/errors.hpp"

namespace qp {

VarianceFunction VarianceFunction::constant() {
  return {VarianceKind::Constant, 0.0, MeanDomain::reals(), 0.0};
}
VarianceFunction VarianceFunction::mu() {
  return {VarianceKind::Mu, 0.0, MeanDomain::positive(), 1.0};
}
VarianceFunction VarianceFunction::mu_sq() {
  return {VarianceKind::MuSq, 0.0, MeanDomain::positive(), 1.0};
}
VarianceFunction VarianceFunction::mu_pow(double p) {
  if (!(p > 2.0)) throw ValidationError("mu_pow requires p > 2");
  return {VarianceKind::MuPow, p, MeanDomain::positive(), 1.0};
}
VarianceFunction VarianceFunction::exp_mu() {
  return {VarianceKind::ExpMu, 0.0, MeanDomain::reals(), 0.0};
}
VarianceFunction VarianceFunction::binom() {
  return {VarianceKind::Binom, 0.0, MeanDomain::unit(), 0.5};
}
VarianceFunction VarianceFunction::binom_sq() {
  return {VarianceKind::BinomSq, 0.0, MeanDomain::unit(), 0.5};
}
VarianceFunction VarianceFunction::binom_pow(double q) {
  if (!(q > 0.0)) throw ValidationError("binom_pow requires q > 0");
  return {VarianceKind::BinomPow, q, MeanDomain::unit(), 0.5};
}
VarianceFunction VarianceFunction::neg_bin(double k) {
  if (!(k > 0.0)) throw ValidationError("nb requires k > 0");
  return {VarianceKind::NegBin, k, MeanDomain::positive(), 1.0};
}
VarianceFunction VarianceFunction::custom(std::function<double(double)> v,
                                          MeanDomain domain, double baseline) {
  if (!v) throw ValidationError("custom variance function is empty");
  if (!domain.contains(baseline)) {
    throw ValidationError("custom variance baseline lies outside the domain");
  }
  VarianceFunction out{VarianceKind::Custom, 0.0, domain, baseline};
  out.custom_ = std::move(v);
  return out;
}

VarianceFunction VarianceFunction::parse(const std::string& name,
                                         std::optional<double> param) {
  auto need = [&](const char* which) -> double {
    if (!param) {
      throw ValidationError(std::string("variance '") + name +
                            "' requires parameter " + which);
    }
    return *param;
  };
  if (name == "constant") return constant();
  if (name == "mu") return mu();
  if (name == "mu_sq") return mu_sq();
  if (name == "mu_pow") return mu_pow(need("p"));
  if (name == "exp_mu") return exp_mu();
  if (name == "binom") return binom();
  if (name == "binom_sq") return binom_sq();
  if (name == "binom_pow") return binom_pow(need("q"));
  if (name == "nb") return neg_bin(need("k"));
  throw ValidationError("unknown variance function '" + name + "'");
}

std::string VarianceFunction::name() const {
  switch (kind_) {
    case VarianceKind::Constant: return "constant";
    case VarianceKind::Mu: return "mu";
    case VarianceKind::MuSq: return "mu_sq";
    case VarianceKind::MuPow: return "mu_pow";
    case VarianceKind::ExpMu: return "exp_mu";
    case VarianceKind::Binom: return "binom";
    case VarianceKind::BinomSq: return "binom_sq";
    case VarianceKind::BinomPow: return "binom_pow";
    case VarianceKind::NegBin: return "nb";
    case VarianceKind::Custom: return "custom";
  }
  return "?";
}

double VarianceFunction::operator()(double mu) const {
  switch (kind_) {
    case VarianceKind::Constant: return 1.0;
    case VarianceKind::Mu: return mu;
    case VarianceKind::MuSq: return mu * mu;
    case VarianceKind::MuPow: return std::pow(mu, param_);
    case VarianceKind::ExpMu: return std::exp(mu);
    case VarianceKind::Binom: return mu * (1.0 - mu);
    case VarianceKind::BinomSq: {
      double s = mu * (1.0 - mu);
      return s * s;
    }
    case VarianceKind::BinomPow:
      return std::pow(mu * (1.0 - mu), param_);
    case VarianceKind::NegBin: return mu + mu * mu / param_;
    case VarianceKind::Custom: return custom_(mu);
  }
  return 0.0;
}

double VarianceFunction::deriv(double mu) const {
  switch (kind_) {
    case VarianceKind::Constant: return 0.0;
    case VarianceKind::Mu: return 1.0;
    case VarianceKind::MuSq: return 2.0 * mu;
    case VarianceKind::MuPow: return param_ * std::pow(mu, param_ - 1.0);
    case VarianceKind::ExpMu: return std::exp(mu);
    case VarianceKind::Binom: return 1.0 - 2.0 * mu;
    case VarianceKind::BinomSq:
      return 2.0 * mu * (1.0 - mu) * (1.0 - 2.0 * mu);
    case VarianceKind::BinomPow:
      return param_ * std::pow(mu * (1.0 - mu), param_ - 1.0) * (1.0 - 2.0 * mu);
    case VarianceKind::NegBin: return 1.0 + 2.0 * mu / param_;
    case VarianceKind::Custom: {
      // step scaled to stay inside the domain near its edges
      double h = 1e-6 * std::max(1.0, std::abs(mu));
      double lo = mu - h, hi = mu + h;
      if (!domain_.contains(lo) || !domain_.contains(hi)) {
        h = 0.5 * std::min(mu - domain_.lo, domain_.hi - mu);
        lo = mu - h;
        hi = mu + h;
      }
      return (custom_(hi) - custom_(lo)) / (hi - lo);
    }
  }
  return 0.0;
}

double VarianceFunction::loglik_term(double y, double mu) const {
  switch (kind_) {
    case VarianceKind::Constant:
      return y * mu - 0.5 * mu * mu;
    case VarianceKind::Mu:
      return (y > 0.0 ? y * std::log(mu) : 0.0) - mu;
    case VarianceKind::MuSq:
      return -y / mu - std::log(mu);
    case VarianceKind::MuPow: {
      const double p = param_;
      return y * std::pow(mu, 1.0 - p) / (1.0 - p) -
             std::pow(mu, 2.0 - p) / (2.0 - p);
    }
    case VarianceKind::ExpMu:
      return (mu - y + 1.0) * std::exp(-mu);
    case VarianceKind::Binom: {
      double t = 0.0;
      if (y > 0.0) t += y * std::log(mu);
      if (y < 1.0) t += (1.0 - y) * std::log(1.0 - mu);
      return t;
    }
    case VarianceKind::BinomSq: {
      const double w = 2.0 * y - 1.0;
      return w * std::log(mu / (1.0 - mu)) + w / (1.0 - mu) -
             y / (mu * (1.0 - mu));
    }
    case VarianceKind::NegBin: {
      const double k = param_;
      return (y > 0.0 ? y * std::log(mu / (k + mu)) : 0.0) -
             k * std::log(k + mu);
    }
    case VarianceKind::BinomPow:
    case VarianceKind::Custom:
      throw Error("loglik_term: family has no closed form");
  }
  return 0.0;
}

bool VarianceFunction::admissible_response(double y) const {
  switch (kind_) {
    case VarianceKind::Constant:
    case VarianceKind::ExpMu:
      return std::isfinite(y);
    case VarianceKind::Mu:
    case VarianceKind::MuSq:
    case VarianceKind::MuPow:
    case VarianceKind::NegBin:
      return std::isfinite(y) && y >= 0.0;
    case VarianceKind::Binom:
    case VarianceKind::BinomSq:
    case VarianceKind::BinomPow:
      return std::isfinite(y) && y >= 0.0 && y <= 1.0;
    case VarianceKind::Custom:
      return std::isfinite(y);
  }
  return false;
}

std::string VarianceFunction::response_restriction() const {
  switch (kind_) {
    case VarianceKind::Constant:
    case VarianceKind::ExpMu:
    case VarianceKind::Custom:
      return "y finite";
    case VarianceKind::Mu:
    case VarianceKind::MuSq:
    case VarianceKind::MuPow:
    case VarianceKind::NegBin:
      return "y >= 0";
    case VarianceKind::Binom:
    case VarianceKind::BinomSq:
    case VarianceKind::BinomPow:
      return "y in [0, 1]";
  }
  return "";
}

}  // namespace qp
