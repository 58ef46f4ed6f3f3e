#include "quasipost/coverage.hpp"

#include <cmath>
#include <exception>
#include <limits>

#include "quasipost/diagnostics.hpp"
#include "quasipost/fit.hpp"
#include "quasipost/parallel.hpp"
#include "quasipost/rng.hpp"

namespace qp {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ReplicateRecord {
  bool ok = false;
  // per level x coefficient
  MatrixXd covered;
  MatrixXd width;
  VectorXd post_mean;
  double psi_hat = kNaN;
};

PosteriorSpec make_spec(CoverageMethod method, GeneratorSpec::Kind kind,
                        double psi_hat_mom) {
  if (method == CoverageMethod::QuasiPosterior) {
    return PosteriorSpec{generator_model(kind), Prior::flat(), psi_hat_mom, {}};
  }
  switch (kind) {
    case GeneratorSpec::Kind::HetGaussian:
      // homoscedastic Gaussian linear model, variance plugged in from the
      // usual residual mean square (the constant-variance method of moments)
      return PosteriorSpec{{LinkFunction::identity(), VarianceFunction::constant()},
                           Prior::flat(),
                           psi_hat_mom,
                           {}};
    case GeneratorSpec::Kind::RoundedGammaCounts:
      // Poisson-type posterior: psi fixed at 1
      return PosteriorSpec{{LinkFunction::log(), VarianceFunction::mu()},
                           Prior::flat(),
                           1.0,
                           {}};
    case GeneratorSpec::Kind::Custom:
      break;  // no built-in reference model for user generators
  }
  throw ValidationError("coverage methods are defined for the built-in generators");
}

ReplicateRecord run_replicate(const CoverageStudyConfig& config,
                              CoverageMethod method, const Dataset& data,
                              std::uint64_t sample_seed) {
  const Index p = config.generator.beta0.size();
  const auto n_levels = static_cast<Index>(config.levels.size());

  const PosteriorSpec probe =
      make_spec(method, config.generator.kind, 1.0);
  const FitResult fit = fit_mql(probe.model, data);
  const double psi_plugin = fit.psi_hat;
  const PosteriorSpec spec =
      make_spec(method, config.generator.kind, psi_plugin);

  SamplerConfig sampler = config.sampler;
  sampler.seed = sample_seed;
  const ChainSet chains = sample_rwmh(spec, data, sampler);

  ReplicateRecord rec;
  rec.covered.resize(n_levels, p);
  rec.width.resize(n_levels, p);
  rec.post_mean = chains.pooled().colwise().mean();
  rec.psi_hat = spec.psi;
  for (Index l = 0; l < n_levels; ++l) {
    const CredibleSet set =
        credible_sets(chains, config.levels[static_cast<std::size_t>(l)],
                      IntervalKind::EqualTailed);
    for (Index j = 0; j < p; ++j) {
      const auto& iv = set.intervals[static_cast<std::size_t>(j)];
      const double b0 = config.generator.beta0[j];
      rec.covered(l, j) = (iv.first <= b0 && b0 <= iv.second) ? 1.0 : 0.0;
      rec.width(l, j) = iv.second - iv.first;
    }
  }
  rec.ok = true;
  return rec;
}

}  // namespace

std::string method_label(CoverageMethod method, GeneratorSpec::Kind kind) {
  if (method == CoverageMethod::QuasiPosterior) return "quasi_posterior";
  return kind == GeneratorSpec::Kind::HetGaussian ? "gaussian_lm" : "poisson";
}

std::vector<CoverageReport> run_coverage_study(const CoverageStudyConfig& config) {
  if (config.replicates < 1) throw ValidationError("need replicates >= 1");
  if (config.methods.empty()) throw ValidationError("need at least one method");
  if (config.levels.empty()) throw ValidationError("need at least one level");

  const int S = config.replicates;
  const auto n_methods = config.methods.size();
  const Index p = config.generator.beta0.size();
  const auto n_levels = static_cast<Index>(config.levels.size());

  std::vector<std::vector<ReplicateRecord>> records(
      n_methods, std::vector<ReplicateRecord>(static_cast<std::size_t>(S)));

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) \
    if (config.parallel_replicates && !in_parallel_region() && S > 1)
#endif
  for (int r = 0; r < S; ++r) {
    const std::uint64_t rep_seed =
        derive_seed(config.seed, static_cast<std::uint64_t>(r));
    Dataset data;
    bool generated = false;
    try {
      data = generate(config.generator, rep_seed);
      generated = true;
    } catch (...) {
      // generation failure marks every method as failed for this replicate
    }
    for (std::size_t m = 0; m < n_methods; ++m) {
      if (!generated) continue;
      try {
        records[m][static_cast<std::size_t>(r)] = run_replicate(
            config, config.methods[m], data,
            derive_seed(rep_seed, 1000 + static_cast<std::uint64_t>(m)));
      } catch (...) {
        // failed replicates stay marked and are excluded from the aggregate
      }
    }
  }

  std::vector<CoverageReport> reports;
  reports.reserve(n_methods);
  for (std::size_t m = 0; m < n_methods; ++m) {
    CoverageReport rep;
    rep.method = method_label(config.methods[m], config.generator.kind);
    rep.replicates = S;
    rep.levels = config.levels;
    rep.coverage = MatrixXd::Zero(n_levels, p);
    rep.mean_interval_width = MatrixXd::Zero(n_levels, p);
    rep.posterior_means = MatrixXd::Constant(S, p, kNaN);
    rep.mean_psi_hat_per_rep = VectorXd::Constant(S, kNaN);

    int ok = 0;
    for (int r = 0; r < S; ++r) {
      const auto& rec = records[m][static_cast<std::size_t>(r)];
      if (!rec.ok) continue;
      ++ok;
      rep.coverage += rec.covered;
      rep.mean_interval_width += rec.width;
      rep.posterior_means.row(r) = rec.post_mean.transpose();
      rep.mean_psi_hat_per_rep[r] = rec.psi_hat;
    }
    rep.failures = S - ok;
    if (rep.failures * 20 > S) {
      throw NumericalError("coverage study aborted: more than 5% of replicates "
                           "failed for method '" +
                           rep.method + "'");
    }
    if (ok > 0) {
      rep.coverage /= static_cast<double>(ok);
      rep.mean_interval_width /= static_cast<double>(ok);
    }

    rep.posterior_mean_spread.resize(p);
    for (Index j = 0; j < p; ++j) {
      double sum = 0.0, sum_sq = 0.0;
      for (int r = 0; r < S; ++r) {
        const double v = rep.posterior_means(r, j);
        if (std::isnan(v)) continue;
        sum += v;
        sum_sq += v * v;
      }
      const double mean = sum / std::max(1, ok);
      rep.posterior_mean_spread[j] =
          ok > 1 ? std::sqrt((sum_sq - mean * sum) / (ok - 1)) : 0.0;
    }
    reports.push_back(std::move(rep));
  }
  return reports;
}

double smse_pearson(const QuasiModel& model, const Dataset& data,
                    const VectorXd& mu_hat, double psi_hat) {
  if (!(psi_hat > 0.0)) throw DomainError("smse_pearson requires psi > 0");
  if (mu_hat.size() != data.n()) {
    throw ValidationError("fitted means do not match the data");
  }
  double acc = 0.0;
  for (Index i = 0; i < data.n(); ++i) {
    const double r = data.y[i] - mu_hat[i];
    acc += r * r / (psi_hat * model.variance()(mu_hat[i]));
  }
  return acc / static_cast<double>(data.n());
}

}  // namespace qp
