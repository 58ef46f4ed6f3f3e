#include "quasipost/prior.hpp"

#include <cmath>
#include <limits>

#include "quasipost/errors.hpp"

namespace qp {

namespace {
constexpr double kLogTwoPi = 1.8378770664093454835606594728112;
}

Prior Prior::flat() { return Prior(Kind::Flat); }

Prior Prior::gaussian(Eigen::VectorXd mean, Eigen::VectorXd sd) {
  if (mean.size() != sd.size()) {
    throw ValidationError("gaussian prior mean/sd dimensions differ");
  }
  if ((sd.array() <= 0.0).any()) {
    throw ValidationError("gaussian prior requires sd > 0");
  }
  Prior p(Kind::Gaussian);
  p.mean_ = std::move(mean);
  p.sd_ = std::move(sd);
  return p;
}

Prior Prior::half_normal(double scale) {
  if (!(scale > 0.0)) throw ValidationError("half-normal prior requires scale > 0");
  Prior p(Kind::HalfNormal);
  p.scale_ = scale;
  return p;
}

std::string Prior::name() const {
  switch (kind_) {
    case Kind::Flat: return "flat";
    case Kind::Gaussian: return "gaussian";
    case Kind::HalfNormal: return "half_normal";
  }
  return "?";
}

double Prior::log_density(const Eigen::VectorXd& value) const {
  switch (kind_) {
    case Kind::Flat:
      return 0.0;
    case Kind::Gaussian: {
      if (value.size() != mean_.size()) {
        throw ValidationError("gaussian prior dimension mismatch");
      }
      const auto z = (value - mean_).array() / sd_.array();
      return -0.5 * z.square().sum() - sd_.array().log().sum() -
             0.5 * kLogTwoPi * static_cast<double>(value.size());
    }
    case Kind::HalfNormal: {
      if (value.size() != 1) {
        throw ValidationError("half-normal prior is univariate");
      }
      return log_density(value[0]);
    }
  }
  return 0.0;
}

double Prior::log_density(double value) const {
  switch (kind_) {
    case Kind::Flat:
      return 0.0;
    case Kind::Gaussian: {
      if (mean_.size() != 1) {
        throw ValidationError("gaussian prior dimension mismatch");
      }
      const double z = (value - mean_[0]) / sd_[0];
      return -0.5 * z * z - std::log(sd_[0]) - 0.5 * kLogTwoPi;
    }
    case Kind::HalfNormal: {
      if (value < 0.0) return -std::numeric_limits<double>::infinity();
      const double z = value / scale_;
      // density 2 N(value | 0, scale^2) on [0, inf)
      return std::log(2.0) - 0.5 * z * z - std::log(scale_) - 0.5 * kLogTwoPi;
    }
  }
  return 0.0;
}

}  // namespace qp
