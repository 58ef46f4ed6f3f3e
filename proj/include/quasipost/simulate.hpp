#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>

#include "quasipost/data.hpp"
#include "quasipost/model.hpp"

namespace qp {

// Synthetic designs: first column of ones, remaining p-1 columns standard
// normal. HetGaussian draws y_i ~ N(x_i'beta0, psi0 exp(x_i'beta0));
// RoundedGammaCounts draws Ga(mu_i0/psi0, 1/psi0) with mu_i0 = exp(x_i'beta0)
// and rounds to the nearest integer, so E(y) = mu_i0 and var(y) is close to
// psi0 mu_i0.
struct GeneratorSpec {
  enum class Kind { HetGaussian, RoundedGammaCounts, Custom };
  Kind kind = Kind::HetGaussian;
  Eigen::VectorXd beta0;
  double psi0 = 1.0;
  Eigen::Index n = 0;
  // Custom only: arbitrary user generator keyed by the replicate seed.
  std::function<Dataset(std::uint64_t)> custom;
};

Dataset generate_het_gaussian(const GeneratorSpec& spec, std::uint64_t seed);
Dataset generate_rounded_gamma_counts(const GeneratorSpec& spec,
                                      std::uint64_t seed);
Dataset generate(const GeneratorSpec& spec, std::uint64_t seed);

// Quasi-model under which each generator is correctly specified.
QuasiModel generator_model(GeneratorSpec::Kind kind);

// Grouped counts with log-normal random intercepts: eta = x'beta + delta_j,
// delta_j ~ N(0, sigma0^2), responses rounded-gamma with dispersion psi0.
struct GroupedCountsSpec {
  Eigen::VectorXd beta0;
  double psi0 = 1.0;
  double sigma0 = 0.5;
  int n_groups = 0;
  int per_group = 0;
};

struct GroupedCountsData {
  Dataset data;
  Eigen::VectorXd delta0;  // realized group effects
};

GroupedCountsData generate_grouped_counts(const GroupedCountsSpec& spec,
                                          std::uint64_t seed);

}  // namespace qp
