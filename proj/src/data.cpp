#include "quasipost/data.hpp"

#include <string>

#include "quasipost/errors.hpp"
#include "quasipost/variance.hpp"

namespace qp {

void Dataset::validate() const {
  if (y.size() < 1) throw ValidationError("dataset needs n >= 1 observations");
  if (X.cols() < 1) throw ValidationError("design matrix needs p >= 1 columns");
  if (X.rows() != y.size()) {
    throw ValidationError("design matrix rows do not match response length");
  }
  if (!groups.empty()) {
    if (static_cast<Eigen::Index>(groups.size()) != y.size()) {
      throw ValidationError("group labels do not match response length");
    }
    if (n_groups < 1) throw ValidationError("grouped data needs n_groups >= 1");
    std::vector<char> seen(static_cast<std::size_t>(n_groups), 0);
    for (int g : groups) {
      if (g < 0 || g >= n_groups) {
        throw ValidationError("group index out of range [0, J)");
      }
      seen[static_cast<std::size_t>(g)] = 1;
    }
    for (int j = 0; j < n_groups; ++j) {
      if (!seen[static_cast<std::size_t>(j)]) {
        throw ValidationError("group " + std::to_string(j + 1) +
                              " has no observations");
      }
    }
  }
}

void Dataset::validate_response(const VarianceFunction& variance) const {
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!variance.admissible_response(y[i])) {
      throw ValidationError("response at row " + std::to_string(i + 1) +
                            " violates variance family restriction '" +
                            variance.response_restriction() + "'");
    }
  }
}

Eigen::MatrixXd group_augmented_design(const Dataset& data, bool drop_first) {
  if (!data.grouped()) {
    throw ValidationError("augmented design requires grouped data");
  }
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();
  const int J = data.n_groups;
  const Eigen::Index extra = drop_first ? J - 1 : J;
  Eigen::MatrixXd aug(n, p + extra);
  aug.leftCols(p) = data.X;
  aug.rightCols(extra).setZero();
  for (Eigen::Index i = 0; i < n; ++i) {
    const int g = data.groups[static_cast<std::size_t>(i)];
    if (drop_first) {
      if (g > 0) aug(i, p + g - 1) = 1.0;
    } else {
      aug(i, p + g) = 1.0;
    }
  }
  return aug;
}

}  // namespace qp
