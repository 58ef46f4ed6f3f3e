#pragma once

#include <Eigen/Core>
#include <string>

namespace qp {

// Prior over regression coefficients (Flat/Gaussian) or over the random
// intercept scale sigma (HalfNormal).
class Prior {
 public:
  enum class Kind { Flat, Gaussian, HalfNormal };

  static Prior flat();
  static Prior gaussian(Eigen::VectorXd mean, Eigen::VectorXd sd);
  static Prior half_normal(double scale);

  Kind kind() const { return kind_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::VectorXd& sd() const { return sd_; }
  double scale() const { return scale_; }
  std::string name() const;

  // Log density including normalizing constants; Flat contributes 0.
  double log_density(const Eigen::VectorXd& value) const;
  double log_density(double value) const;

 private:
  explicit Prior(Kind kind) : kind_(kind) {}
  Kind kind_;
  Eigen::VectorXd mean_, sd_;
  double scale_ = 1.0;
};

}  // namespace qp
