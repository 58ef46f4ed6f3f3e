#pragma once

#include <Eigen/Core>
#include <vector>

namespace qp {

class VarianceFunction;

// Responses, design matrix and optional group labels. Group indices are
// 0-based and every index in [0, n_groups) must occur at least once.
struct Dataset {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  std::vector<int> groups;  // empty when the data are not grouped
  int n_groups = 0;

  Eigen::Index n() const { return y.size(); }
  Eigen::Index p() const { return X.cols(); }
  bool grouped() const { return !groups.empty(); }

  // Shape/consistency checks; response restrictions are validated against a
  // variance family separately (validate_response).
  void validate() const;
  void validate_response(const VarianceFunction& variance) const;
};

// [X | group indicators]; dropping the first group's column keeps the matrix
// full rank when X carries an intercept.
Eigen::MatrixXd group_augmented_design(const Dataset& data, bool drop_first);

}  // namespace qp
