#pragma once

#include <limits>
#include <string>

namespace qp {

// Open interval of admissible means.
struct MeanDomain {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double mu) const { return mu > lo && mu < hi; }
  bool operator==(const MeanDomain& other) const {
    return lo == other.lo && hi == other.hi;
  }

  static MeanDomain reals() { return {}; }
  static MeanDomain positive() { return {0.0, std::numeric_limits<double>::infinity()}; }
  static MeanDomain unit() { return {0.0, 1.0}; }
};

enum class LinkKind { Identity, Log, Logit };

// Clamping policy: logit means are pinned to [kMuEps, 1 - kMuEps]; log-link
// linear predictors to [-kEtaMax, kEtaMax] before exponentiation. Clamp
// events are counted by the evaluation kernels and surfaced in fit metadata.
inline constexpr double kMuEps = 1e-12;
inline constexpr double kEtaMax = 700.0;

class LinkFunction {
 public:
  static LinkFunction identity() { return LinkFunction(LinkKind::Identity); }
  static LinkFunction log() { return LinkFunction(LinkKind::Log); }
  static LinkFunction logit() { return LinkFunction(LinkKind::Logit); }
  static LinkFunction parse(const std::string& name);

  LinkKind kind() const { return kind_; }
  std::string name() const;

  double g(double mu) const;
  // Inverse link with the clamping policy applied; sets *clamped on clamp.
  double inverse(double eta, bool* clamped = nullptr) const;
  double deriv(double mu) const;   // g', positive on the domain interior
  double deriv2(double mu) const;  // g''

  // Range of the inverse link (identity: R, log: (0,inf), logit: (0,1)).
  MeanDomain range() const;

 private:
  explicit LinkFunction(LinkKind k) : kind_(k) {}
  LinkKind kind_;
};

}  // namespace qp
