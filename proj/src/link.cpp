#include "quasipost/link.hpp"

#include <cmath>

#include "quasipost/errors.hpp"

namespace qp {

LinkFunction LinkFunction::parse(const std::string& name) {
  if (name == "identity") return identity();
  if (name == "log") return log();
  if (name == "logit") return logit();
  throw ValidationError("unknown link function '" + name + "'");
}

std::string LinkFunction::name() const {
  switch (kind_) {
    case LinkKind::Identity: return "identity";
    case LinkKind::Log: return "log";
    case LinkKind::Logit: return "logit";
  }
  return "?";
}

double LinkFunction::g(double mu) const {
  switch (kind_) {
    case LinkKind::Identity: return mu;
    case LinkKind::Log: return std::log(mu);
    case LinkKind::Logit: return std::log(mu / (1.0 - mu));
  }
  return 0.0;
}

double LinkFunction::inverse(double eta, bool* clamped) const {
  switch (kind_) {
    case LinkKind::Identity:
      return eta;
    case LinkKind::Log:
      if (eta > kEtaMax || eta < -kEtaMax) {
        if (clamped) *clamped = true;
        eta = eta > kEtaMax ? kEtaMax : -kEtaMax;
      }
      return std::exp(eta);
    case LinkKind::Logit: {
      double mu = 1.0 / (1.0 + std::exp(-eta));
      if (mu < kMuEps || mu > 1.0 - kMuEps) {
        if (clamped) *clamped = true;
        mu = mu < kMuEps ? kMuEps : 1.0 - kMuEps;
      }
      return mu;
    }
  }
  return 0.0;
}

double LinkFunction::deriv(double mu) const {
  switch (kind_) {
    case LinkKind::Identity: return 1.0;
    case LinkKind::Log: return 1.0 / mu;
    case LinkKind::Logit: return 1.0 / (mu * (1.0 - mu));
  }
  return 0.0;
}

double LinkFunction::deriv2(double mu) const {
  switch (kind_) {
    case LinkKind::Identity: return 0.0;
    case LinkKind::Log: return -1.0 / (mu * mu);
    case LinkKind::Logit: {
      double s = mu * (1.0 - mu);
      return (2.0 * mu - 1.0) / (s * s);
    }
  }
  return 0.0;
}

MeanDomain LinkFunction::range() const {
  switch (kind_) {
    case LinkKind::Identity: return MeanDomain::reals();
    case LinkKind::Log: return MeanDomain::positive();
    case LinkKind::Logit: return MeanDomain::unit();
  }
  return MeanDomain::reals();
}

}  // namespace qp
