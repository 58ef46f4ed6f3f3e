#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "quasipost/coverage.hpp"
#include "quasipost/fit.hpp"
#include "quasipost/rng.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using qp::CoverageMethod;
using qp::CoverageReport;
using qp::CoverageStudyConfig;
using qp::Dataset;
using qp::GeneratorSpec;
using qp::LinkFunction;
using qp::QuasiModel;
using qp::VarianceFunction;

TEST_CASE("heteroscedastic generator matches its first two moments") {
  GeneratorSpec gen;
  gen.kind = GeneratorSpec::Kind::HetGaussian;
  gen.beta0.resize(2);
  gen.beta0 << 0.5, 1.2;
  gen.psi0 = 2.5;
  gen.n = 100000;
  const Dataset d = qp::generate_het_gaussian(gen, 12345);

  // condition on rows with x2 in a thin slab around 0.8
  std::vector<double> ys;
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    if (std::abs(d.X(i, 1) - 0.8) < 0.02) ys.push_back(d.y[i]);
  }
  REQUIRE(ys.size() > 500);
  const auto stats = oracle::mean_sd(ys);
  const double eta = 0.5 + 1.2 * 0.8;
  CHECK(std::abs(stats.mean - eta) < 4.0 * stats.se);
  const double target_var = gen.psi0 * std::exp(eta);
  const double var = stats.sd * stats.sd;
  const double var_se = var * std::sqrt(2.0 / (ys.size() - 1.0));
  // slab width contributes a small smearing on top of the sampling error
  CHECK(std::abs(var - target_var) < 4.0 * var_se + 0.05 * target_var);
}

TEST_CASE("heteroscedastic generator collapses when psi0 vanishes") {
  GeneratorSpec gen;
  gen.kind = GeneratorSpec::Kind::HetGaussian;
  gen.beta0.resize(2);
  gen.beta0 << 0.3, -0.4;
  gen.psi0 = 1e-8;
  gen.n = 500;
  const Dataset d = qp::generate_het_gaussian(gen, 9);
  const VectorXd eta = d.X * gen.beta0;
  CHECK((d.y - eta).lpNorm<Eigen::Infinity>() < 1e-3);
}

TEST_CASE("rounded gamma counts match the stated moments") {
  GeneratorSpec gen;
  gen.kind = GeneratorSpec::Kind::RoundedGammaCounts;
  gen.beta0.resize(2);
  gen.beta0 << 2.0, 0.7;
  gen.psi0 = 3.5;
  gen.n = 100000;
  const Dataset d = qp::generate_rounded_gamma_counts(gen, 54321);

  CHECK(d.y.minCoeff() >= 0.0);
  for (Eigen::Index i = 0; i < 50; ++i) {
    CHECK(d.y[i] == std::round(d.y[i]));
  }

  std::vector<double> ys;
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    if (std::abs(d.X(i, 1) - 0.5) < 0.02) ys.push_back(d.y[i]);
  }
  REQUIRE(ys.size() > 500);
  const auto stats = oracle::mean_sd(ys);
  const double mu = std::exp(2.0 + 0.7 * 0.5);
  CHECK(std::abs(stats.mean - mu) < 4.0 * stats.se + 0.01 * mu);
  const double var = stats.sd * stats.sd;
  const double var_se = var * std::sqrt(2.0 / (ys.size() - 1.0));
  CHECK(std::abs(var - gen.psi0 * mu) < 4.0 * var_se + 0.05 * gen.psi0 * mu);
}

TEST_CASE("unit dispersion counts are Poisson-like") {
  GeneratorSpec gen;
  gen.kind = GeneratorSpec::Kind::RoundedGammaCounts;
  gen.beta0 = VectorXd::Constant(1, 4.0);  // mu = e^4 ~ 54.6
  gen.psi0 = 1.0;
  gen.n = 50000;
  const Dataset d = qp::generate_rounded_gamma_counts(gen, 8);
  std::vector<double> ys(d.y.data(), d.y.data() + d.n());
  const auto stats = oracle::mean_sd(ys);
  CHECK(stats.sd * stats.sd / stats.mean == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("Pearson sMSE identity with the method-of-moments dispersion") {
  GeneratorSpec gen;
  gen.kind = GeneratorSpec::Kind::RoundedGammaCounts;
  gen.beta0.resize(3);
  gen.beta0 << 2.0, 0.5, -0.4;
  gen.psi0 = 2.0;
  gen.n = 200;
  const Dataset d = qp::generate_rounded_gamma_counts(gen, 71);
  QuasiModel model = qp::generator_model(gen.kind);
  const qp::FitResult fit = qp::fit_mql(model, d);
  const VectorXd mu = qp::mean_vector(model, d.X, fit.beta_hat);

  const double smse = qp::smse_pearson(model, d, mu, fit.psi_hat);
  const double identity = static_cast<double>(d.n() - d.p()) / d.n();
  CHECK(smse == doctest::Approx(identity).epsilon(1e-12));

  // halving psi doubles the sMSE
  CHECK(qp::smse_pearson(model, d, mu, fit.psi_hat / 2.0) ==
        doctest::Approx(2.0 * smse).epsilon(1e-12));
}

TEST_CASE("well-specified large-n sMSE calibrates to one") {
  GeneratorSpec gen;
  gen.kind = GeneratorSpec::Kind::HetGaussian;
  gen.beta0.resize(3);
  gen.beta0 << 0.5, 1.0, -0.7;
  gen.psi0 = 2.0;
  gen.n = 5000;
  const Dataset d = qp::generate_het_gaussian(gen, 17);
  QuasiModel model = qp::generator_model(gen.kind);
  const qp::FitResult fit = qp::fit_mql(model, d);
  const VectorXd mu = qp::mean_vector(model, d.X, fit.beta_hat);
  // the generating dispersion instead of the fitted one keeps this a real
  // calibration check rather than the algebraic identity above
  const double smse = qp::smse_pearson(model, d, mu, gen.psi0);
  CHECK(smse > 0.9);
  CHECK(smse < 1.1);
}

TEST_CASE("coverage study: determinism, monotonicity and the S=1 edge") {
  CoverageStudyConfig config;
  config.generator.kind = GeneratorSpec::Kind::HetGaussian;
  config.generator.beta0.resize(2);
  config.generator.beta0 << 0.5, 1.0;
  config.generator.psi0 = 2.0;
  config.generator.n = 120;
  config.replicates = 6;
  config.sampler.chains = 2;
  config.sampler.draws = 600;
  config.sampler.warmup = 200;
  config.seed = 4242;

  const auto a = qp::run_coverage_study(config);
  const auto b = qp::run_coverage_study(config);
  REQUIRE(a.size() == 2);
  CHECK(a[0].method == "quasi_posterior");
  CHECK(a[1].method == "gaussian_lm");
  for (std::size_t m = 0; m < a.size(); ++m) {
    CHECK(a[m].coverage == b[m].coverage);  // bit-identical reruns
    CHECK(a[m].posterior_means == b[m].posterior_means);
    CHECK(a[m].failures == 0);
    // nested equal-tailed intervals make coverage monotone in the level
    for (Eigen::Index j = 0; j < a[m].coverage.cols(); ++j) {
      CHECK(a[m].coverage(0, j) <= a[m].coverage(1, j));
      CHECK(a[m].coverage(1, j) <= a[m].coverage(2, j));
    }
  }

  config.replicates = 1;
  const auto single = qp::run_coverage_study(config);
  for (const auto& rep : single) {
    for (Eigen::Index l = 0; l < rep.coverage.rows(); ++l) {
      for (Eigen::Index j = 0; j < rep.coverage.cols(); ++j) {
        const double c = rep.coverage(l, j);
        CHECK((c == 0.0 || c == 1.0));
      }
    }
  }
}

TEST_CASE("parallel and serial replicate execution agree") {
  CoverageStudyConfig config;
  config.generator.kind = GeneratorSpec::Kind::RoundedGammaCounts;
  config.generator.beta0.resize(2);
  config.generator.beta0 << 2.5, 0.8;
  config.generator.psi0 = 3.0;
  config.generator.n = 150;
  config.methods = {CoverageMethod::QuasiPosterior};
  config.replicates = 4;
  config.sampler.chains = 2;
  config.sampler.draws = 400;
  config.sampler.warmup = 150;
  config.seed = 11;

  config.parallel_replicates = true;
  const auto par = qp::run_coverage_study(config);
  config.parallel_replicates = false;
  const auto ser = qp::run_coverage_study(config);
  CHECK(par[0].coverage == ser[0].coverage);
  CHECK(par[0].posterior_means == ser[0].posterior_means);
}

TEST_CASE("quasi intervals widen over the psi=1 posterior by sqrt(psi_hat)") {
  CoverageStudyConfig config;
  config.generator.kind = GeneratorSpec::Kind::RoundedGammaCounts;
  config.generator.beta0.resize(4);
  config.generator.beta0 << 3.5, 1.5, -1.0, 0.5;
  config.generator.psi0 = 3.5;
  config.generator.n = 1000;
  config.replicates = 2;
  config.sampler.chains = 3;
  config.sampler.draws = 1500;
  config.sampler.warmup = 500;
  config.seed = 606060;

  const auto reports = qp::run_coverage_study(config);
  const auto& qprep = reports[0];
  const auto& poisson = reports[1];
  double psi_mean = 0.0;
  int ok = 0;
  for (Eigen::Index r = 0; r < qprep.mean_psi_hat_per_rep.size(); ++r) {
    if (!std::isnan(qprep.mean_psi_hat_per_rep[r])) {
      psi_mean += qprep.mean_psi_hat_per_rep[r];
      ++ok;
    }
  }
  psi_mean /= ok;
  for (Eigen::Index l = 0; l < qprep.coverage.rows(); ++l) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      const double ratio = qprep.mean_interval_width(l, j) /
                           poisson.mean_interval_width(l, j) /
                           std::sqrt(psi_mean);
      CHECK(ratio == doctest::Approx(1.0).epsilon(0.20));
    }
  }
}

TEST_CASE("coverage study aborts once replicate failures pass 5%") {
  CoverageStudyConfig config;
  config.generator.kind = GeneratorSpec::Kind::HetGaussian;
  config.generator.beta0.resize(4);
  config.generator.beta0 << 0.5, 1.0, -0.5, 0.2;
  config.generator.psi0 = 1.0;
  config.generator.n = 2;  // fewer rows than coefficients: every replicate fails
  config.replicates = 4;
  CHECK_THROWS_AS(qp::run_coverage_study(config), qp::NumericalError);
}

TEST_CASE("custom generator kind passes the replicate seed through") {
  GeneratorSpec gen;
  gen.kind = GeneratorSpec::Kind::Custom;
  gen.custom = [](std::uint64_t seed) {
    Dataset d;
    d.X = Eigen::MatrixXd::Ones(3, 1);
    d.y = Eigen::VectorXd::Constant(3, static_cast<double>(seed % 7));
    return d;
  };
  const Dataset d = qp::generate(gen, 16);
  CHECK(d.y[0] == 2.0);
  GeneratorSpec empty;
  empty.kind = GeneratorSpec::Kind::Custom;
  CHECK_THROWS_AS(qp::generate(empty, 1), qp::ValidationError);
}

TEST_CASE("grouped counts generator covers every group") {
  qp::GroupedCountsSpec spec;
  spec.beta0.resize(2);
  spec.beta0 << 2.0, 0.3;
  spec.psi0 = 2.0;
  spec.sigma0 = 0.6;
  spec.n_groups = 12;
  spec.per_group = 7;
  const auto synth = qp::generate_grouped_counts(spec, 33);
  CHECK(synth.data.n() == 84);
  CHECK(synth.data.n_groups == 12);
  CHECK(synth.delta0.size() == 12);
  CHECK_NOTHROW(synth.data.validate());
  CHECK(synth.data.y.minCoeff() >= 0.0);
}
