#include "quasipost/simulate.hpp"

#include <cmath>

#include "quasipost/errors.hpp"
#include "quasipost/rng.hpp"

namespace qp {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

void check_spec(const GeneratorSpec& spec) {
  if (spec.beta0.size() < 1) throw ValidationError("generator needs beta0");
  if (!(spec.psi0 > 0.0)) throw ValidationError("generator needs psi0 > 0");
  if (spec.n < spec.beta0.size()) {
    throw ValidationError("generator needs n >= p");
  }
}

MatrixXd design_matrix(Index n, Index p, Rng& rng) {
  MatrixXd X(n, p);
  X.col(0).setOnes();
  for (Index i = 0; i < n; ++i) {
    for (Index j = 1; j < p; ++j) X(i, j) = rng.normal();
  }
  return X;
}

double rounded_gamma(Rng& rng, double mu, double psi) {
  // shape mu/psi, rate 1/psi: mean mu, variance psi*mu before rounding
  return std::round(rng.gamma(mu / psi, 1.0 / psi));
}

}  // namespace

Dataset generate_het_gaussian(const GeneratorSpec& spec, std::uint64_t seed) {
  check_spec(spec);
  Rng rng(seed);
  Dataset data;
  data.X = design_matrix(spec.n, spec.beta0.size(), rng);
  data.y.resize(spec.n);
  const VectorXd eta = data.X * spec.beta0;
  for (Index i = 0; i < spec.n; ++i) {
    const double sd = std::sqrt(spec.psi0 * std::exp(eta[i]));
    data.y[i] = eta[i] + sd * rng.normal();
  }
  return data;
}

Dataset generate_rounded_gamma_counts(const GeneratorSpec& spec,
                                      std::uint64_t seed) {
  check_spec(spec);
  Rng rng(seed);
  Dataset data;
  data.X = design_matrix(spec.n, spec.beta0.size(), rng);
  data.y.resize(spec.n);
  const VectorXd eta = data.X * spec.beta0;
  for (Index i = 0; i < spec.n; ++i) {
    data.y[i] = rounded_gamma(rng, std::exp(eta[i]), spec.psi0);
  }
  return data;
}

Dataset generate(const GeneratorSpec& spec, std::uint64_t seed) {
  switch (spec.kind) {
    case GeneratorSpec::Kind::HetGaussian:
      return generate_het_gaussian(spec, seed);
    case GeneratorSpec::Kind::RoundedGammaCounts:
      return generate_rounded_gamma_counts(spec, seed);
    case GeneratorSpec::Kind::Custom:
      if (!spec.custom) throw ValidationError("custom generator is empty");
      return spec.custom(seed);
  }
  throw ValidationError("unknown generator kind");
}

QuasiModel generator_model(GeneratorSpec::Kind kind) {
  switch (kind) {
    case GeneratorSpec::Kind::HetGaussian:
      return {LinkFunction::identity(), VarianceFunction::exp_mu()};
    case GeneratorSpec::Kind::RoundedGammaCounts:
      return {LinkFunction::log(), VarianceFunction::mu()};
    case GeneratorSpec::Kind::Custom:
      throw ValidationError("custom generators have no implied model");
  }
  throw ValidationError("unknown generator kind");
}

GroupedCountsData generate_grouped_counts(const GroupedCountsSpec& spec,
                                          std::uint64_t seed) {
  if (spec.n_groups < 1 || spec.per_group < 1) {
    throw ValidationError("grouped generator needs n_groups, per_group >= 1");
  }
  if (!(spec.psi0 > 0.0) || !(spec.sigma0 > 0.0)) {
    throw ValidationError("grouped generator needs psi0, sigma0 > 0");
  }
  Rng rng(seed);
  const Index n = static_cast<Index>(spec.n_groups) * spec.per_group;
  const Index p = spec.beta0.size();

  GroupedCountsData out;
  out.data.X = design_matrix(n, p, rng);
  out.data.y.resize(n);
  out.data.groups.resize(static_cast<std::size_t>(n));
  out.data.n_groups = spec.n_groups;
  out.delta0.resize(spec.n_groups);
  for (int j = 0; j < spec.n_groups; ++j) out.delta0[j] = spec.sigma0 * rng.normal();

  const VectorXd eta_fixed = out.data.X * spec.beta0;
  for (Index i = 0; i < n; ++i) {
    const int g = static_cast<int>(i / spec.per_group);
    out.data.groups[static_cast<std::size_t>(i)] = g;
    const double mu = std::exp(eta_fixed[i] + out.delta0[g]);
    out.data.y[i] = rounded_gamma(rng, mu, spec.psi0);
  }
  return out;
}

}  // namespace qp
