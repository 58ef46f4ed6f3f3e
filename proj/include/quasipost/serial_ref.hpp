#pragma once

#include <Eigen/Core>

#include "quasipost/model.hpp"

// Straight per-observation loops kept as the reference implementation for the
// blocked kernels in model.cpp. Tests compare the two routes; the benchmark
// tool times them against each other.
namespace qp::serial {

Eigen::VectorXd mean_vector(const QuasiModel& model, const Eigen::MatrixXd& X,
                            const Eigen::VectorXd& beta);

double quasi_loglik(const QuasiModel& model, const Dataset& data,
                    const Eigen::VectorXd& beta, double psi);

Eigen::VectorXd quasi_score(const QuasiModel& model, const Dataset& data,
                            const Eigen::VectorXd& beta, double psi);

Eigen::MatrixXd expected_information(const QuasiModel& model,
                                     const Dataset& data,
                                     const Eigen::VectorXd& beta, double psi);

}  // namespace qp::serial
