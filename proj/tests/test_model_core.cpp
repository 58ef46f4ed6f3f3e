#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "quasipost/model.hpp"
#include "quasipost/quad.hpp"
#include "quasipost/rng.hpp"
#include "quasipost/serial_ref.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using qp::Dataset;
using qp::LinkFunction;
using qp::QuasiModel;
using qp::VarianceFunction;

namespace {

Dataset one_obs(double y, double x) {
  Dataset d;
  d.y = VectorXd::Constant(1, y);
  d.X = MatrixXd::Constant(1, 1, x);
  return d;
}

VectorXd vec1(double v) { return VectorXd::Constant(1, v); }

// random dataset whose responses respect the family restrictions
Dataset random_dataset(const QuasiModel& model, Eigen::Index n, Eigen::Index p,
                       qp::Rng& rng) {
  Dataset d;
  d.X.resize(n, p);
  d.X.col(0).setOnes();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 1; j < p; ++j) d.X(i, j) = 0.5 * rng.normal();
  }
  d.y.resize(n);
  VectorXd beta(p);
  for (Eigen::Index j = 0; j < p; ++j) beta[j] = 0.3 * rng.normal();
  const VectorXd mu = qp::mean_vector(model, d.X, beta);
  for (Eigen::Index i = 0; i < n; ++i) {
    switch (model.variance().kind()) {
      case qp::VarianceKind::Binom:
      case qp::VarianceKind::BinomSq:
      case qp::VarianceKind::BinomPow:
        d.y[i] = std::clamp(mu[i] + 0.2 * rng.normal(), 0.02, 0.98);
        break;
      case qp::VarianceKind::Mu:
      case qp::VarianceKind::MuSq:
      case qp::VarianceKind::MuPow:
      case qp::VarianceKind::NegBin:
        d.y[i] = mu[i] * (0.3 + rng.uniform());
        break;
      default:
        d.y[i] = mu[i] + 0.5 * rng.normal();
    }
  }
  return d;
}

VectorXd random_beta(Eigen::Index p, qp::Rng& rng, double scale = 0.3) {
  VectorXd b(p);
  for (Eigen::Index j = 0; j < p; ++j) b[j] = scale * rng.normal();
  return b;
}

std::vector<QuasiModel> named_pairs() {
  return {
      {LinkFunction::identity(), VarianceFunction::constant()},
      {LinkFunction::identity(), VarianceFunction::exp_mu()},
      {LinkFunction::log(), VarianceFunction::mu()},
      {LinkFunction::log(), VarianceFunction::mu_sq()},
      {LinkFunction::log(), VarianceFunction::mu_pow(2.5)},
      {LinkFunction::log(), VarianceFunction::neg_bin(3.0)},
      {LinkFunction::logit(), VarianceFunction::binom()},
      {LinkFunction::logit(), VarianceFunction::binom_sq()},
      {LinkFunction::logit(), VarianceFunction::binom_pow(2.25)},
  };
}

}  // namespace

TEST_CASE("mean_vector: zero coefficient and link inverses") {
  QuasiModel ident{LinkFunction::identity(), VarianceFunction::constant()};
  MatrixXd X(2, 1);
  X << 1, 2;
  CHECK(qp::mean_vector(ident, X, vec1(0.0)).isZero(0.0));

  QuasiModel pois{LinkFunction::log(), VarianceFunction::mu()};
  CHECK(qp::mean_vector(pois, MatrixXd::Constant(1, 1, 1.0), vec1(0.0))[0] ==
        doctest::Approx(1.0).epsilon(1e-14));

  QuasiModel logit{LinkFunction::logit(), VarianceFunction::binom()};
  const double mu =
      qp::mean_vector(logit, MatrixXd::Constant(1, 1, 1.0), vec1(2.0))[0];
  CHECK(std::abs(mu - 0.880797) < 5e-7);  // e^2 / (1 + e^2)
}

TEST_CASE("link round trip and monotonicity") {
  for (auto link : {LinkFunction::identity(), LinkFunction::log(),
                    LinkFunction::logit()}) {
    // the logit mean clamp at 1e-12 pins means past |eta| ~ 27.6, and the
    // stored mean near 0/1 limits the recoverable eta to ~eps * e^|eta|
    const double span = link.kind() == qp::LinkKind::Logit ? 27.0 : 30.0;
    for (double eta = -span; eta <= span; eta += 1.37) {
      const double mu = link.inverse(eta);
      double tol = 1e-12;
      if (link.kind() == qp::LinkKind::Logit) {
        tol = std::max(tol, 4.0 * 2.22e-16 * std::exp(std::abs(eta)));
      }
      CHECK(std::abs(link.g(mu) - eta) < tol);
      CHECK(link.deriv(mu) > 0.0);
    }
  }
  // beyond the clamp the logit mean is pinned to the boundary values
  bool clamped = false;
  const double hi = LinkFunction::logit().inverse(30.0, &clamped);
  CHECK(clamped);
  CHECK(hi == 1.0 - 1e-12);
}

TEST_CASE("quasi_loglik closed-form spot values") {
  QuasiModel gauss{LinkFunction::identity(), VarianceFunction::constant()};
  // y=2, mu=1: y*mu - mu^2/2 = 1.5
  CHECK(qp::quasi_loglik(gauss, one_obs(2.0, 1.0), vec1(1.0), 1.0) ==
        doctest::Approx(1.5).epsilon(1e-14));

  QuasiModel pois{LinkFunction::log(), VarianceFunction::mu()};
  // y=0, mu=1: y log mu - mu = -1
  CHECK(qp::quasi_loglik(pois, one_obs(0.0, 1.0), vec1(0.0), 1.0) ==
        doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("quasi_loglik: psi enters as a global factor") {
  qp::Rng rng(91);
  for (const auto& model : named_pairs()) {
    Dataset d = random_dataset(model, 13, 2, rng);
    VectorXd beta = random_beta(2, rng);
    const double l1 = qp::quasi_loglik(model, d, beta, 1.0);
    const double lc = qp::quasi_loglik(model, d, beta, 3.7);
    CHECK(lc == doctest::Approx(l1 / 3.7).epsilon(1e-12));
  }
}

TEST_CASE("quasi_score spot values") {
  QuasiModel gauss{LinkFunction::identity(), VarianceFunction::constant()};
  // (y - mu) x = (2 - 1) * 1
  CHECK(qp::quasi_score(gauss, one_obs(2.0, 1.0), vec1(1.0), 1.0)[0] ==
        doctest::Approx(1.0).epsilon(1e-14));

  // y = mu(beta) exactly -> zero score
  QuasiModel pois{LinkFunction::log(), VarianceFunction::mu()};
  Dataset d;
  d.X.resize(3, 1);
  d.X << 1.0, 0.5, -0.3;
  VectorXd beta = vec1(0.7);
  d.y = qp::mean_vector(pois, d.X, beta);
  CHECK(qp::quasi_score(pois, d, beta, 1.0).lpNorm<Eigen::Infinity>() < 1e-14);
}

TEST_CASE("expected_information closed forms and psi scaling") {
  qp::Rng rng(7);
  Dataset d;
  d.X.resize(6, 2);
  for (Eigen::Index i = 0; i < 6; ++i) {
    d.X(i, 0) = 1.0;
    d.X(i, 1) = rng.normal();
  }
  d.y = VectorXd::Zero(6);
  VectorXd beta(2);
  beta << 0.4, -0.2;

  QuasiModel gauss{LinkFunction::identity(), VarianceFunction::constant()};
  const double psi = 2.5;
  MatrixXd info = qp::expected_information(gauss, d, beta, psi);
  CHECK((info - d.X.transpose() * d.X / psi).norm() < 1e-12);

  QuasiModel pois{LinkFunction::log(), VarianceFunction::mu()};
  const VectorXd mu = qp::mean_vector(pois, d.X, beta);
  MatrixXd expected = d.X.transpose() * mu.asDiagonal() * d.X / psi;
  CHECK((qp::expected_information(pois, d, beta, psi) - expected).norm() <
        1e-12 * expected.norm());

  // doubling psi halves every entry
  MatrixXd half = qp::expected_information(pois, d, beta, 2.0 * psi);
  CHECK((2.0 * half - qp::expected_information(pois, d, beta, psi)).norm() <
        1e-12 * half.norm());
}

TEST_CASE("quadrature: spot values and degenerate interval") {
  // V = 1, a = 0, y = 2, mu = 1 -> 1.5
  CHECK(qp::quasi_loglik_quadrature(VarianceFunction::constant(), 2.0, 1.0, 1.0) ==
        doctest::Approx(1.5).epsilon(1e-10));
  // mu equal to the baseline -> empty interval
  CHECK(qp::quasi_loglik_quadrature(VarianceFunction::mu(), 3.0, 1.0, 1.0) == 0.0);
  // V(t) = t on [1, 2], y = 0 -> -1
  CHECK(qp::quasi_loglik_quadrature(VarianceFunction::mu(), 0.0, 2.0, 1.0) ==
        doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("quadrature: non-convergence raises") {
  // endpoint pushed against the integrable singularity at 0 exhausts the
  // refinement depth
  auto v = VarianceFunction::custom([](double t) { return t; },
                                    qp::MeanDomain::positive(), 1.0);
  CHECK_THROWS_AS(qp::quasi_loglik_quadrature(v, 1.0, 1e-60, 1.0),
                  qp::QuadratureError);
}

TEST_CASE("gradient consistency: score matches finite differences") {
  qp::Rng rng(1234);
  for (const auto& model : named_pairs()) {
    for (Eigen::Index n : {5, 20}) {
      Dataset d = random_dataset(model, n, 2, rng);
      VectorXd beta = random_beta(2, rng);
      const VectorXd score = qp::quasi_score(model, d, beta, 1.0);
      const VectorXd fd = oracle::fd_gradient(
          [&](const VectorXd& b) { return qp::quasi_loglik(model, d, b, 1.0); },
          beta);
      const double scale = std::max(1.0, score.lpNorm<Eigen::Infinity>());
      CHECK((score - fd).lpNorm<Eigen::Infinity>() / scale < 1e-5);
    }
  }
}

TEST_CASE("closed form and quadrature agree up to a constant per family") {
  qp::Rng rng(555);
  for (const auto& model : named_pairs()) {
    if (!model.variance().has_closed_form()) continue;
    Dataset d = random_dataset(model, 4, 2, rng);
    double reference = 0.0;
    bool have_reference = false;
    for (int rep = 0; rep < 20; ++rep) {
      VectorXd beta = random_beta(2, rng);
      const double closed = qp::quasi_loglik(model, d, beta, 1.0);
      const VectorXd mu = qp::mean_vector(model, d.X, beta);
      double quad = 0.0;
      for (Eigen::Index i = 0; i < d.n(); ++i) {
        quad += qp::quasi_loglik_quadrature(model.variance(), d.y[i], mu[i], 1.0);
      }
      const double diff = closed - quad;
      if (!have_reference) {
        reference = diff;
        have_reference = true;
      }
      CHECK(std::abs(diff - reference) < 1e-8);
    }
  }
}

TEST_CASE("curvature identity for canonical pairs") {
  qp::Rng rng(2024);
  const std::vector<QuasiModel> canonical = {
      {LinkFunction::identity(), VarianceFunction::constant()},
      {LinkFunction::log(), VarianceFunction::mu()},
      {LinkFunction::logit(), VarianceFunction::binom()},
  };
  for (const auto& model : canonical) {
    Dataset d = random_dataset(model, 15, 2, rng);
    VectorXd beta = random_beta(2, rng);
    const MatrixXd info = qp::expected_information(model, d, beta, 1.0);
    const MatrixXd neg_hess = -oracle::fd_jacobian(
        [&](const VectorXd& b) { return qp::quasi_score(model, d, b, 1.0); },
        beta);
    for (Eigen::Index r = 0; r < 2; ++r) {
      for (Eigen::Index c = 0; c < 2; ++c) {
        const double scale = std::max(1.0, std::abs(info(r, c)));
        CHECK(std::abs(info(r, c) - neg_hess(r, c)) / scale < 1e-5);
      }
    }
  }
}

TEST_CASE("Monte Carlo: score is centered at the generating parameters") {
  // identity link, V = exp(mu); the Gaussian generator matches the
  // second-order assumptions exactly
  QuasiModel model{LinkFunction::identity(), VarianceFunction::exp_mu()};
  const Eigen::Index n = 25;
  const double psi0 = 1.7;
  VectorXd beta0(2);
  beta0 << 0.3, 0.5;

  qp::Rng rng(31);
  Dataset d;
  d.X.resize(n, 2);
  d.X.col(0).setOnes();
  for (Eigen::Index i = 0; i < n; ++i) d.X(i, 1) = rng.normal();
  const VectorXd eta = d.X * beta0;

  const int R = 10000;
  std::vector<double> s0(R), s1(R);
  for (int r = 0; r < R; ++r) {
    d.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      d.y[i] = eta[i] + std::sqrt(psi0 * std::exp(eta[i])) * rng.normal();
    }
    const VectorXd score = qp::quasi_score(model, d, beta0, psi0);
    s0[r] = score[0];
    s1[r] = score[1];
  }
  const auto m0 = oracle::mean_sd(s0);
  const auto m1 = oracle::mean_sd(s1);
  CHECK(std::abs(m0.mean) < 4.0 * m0.se);
  CHECK(std::abs(m1.mean) < 4.0 * m1.se);
}

TEST_CASE("Monte Carlo: loss moment matrices satisfy H = psi0 J") {
  QuasiModel model{LinkFunction::identity(), VarianceFunction::exp_mu()};
  const Eigen::Index n = 25;
  const double psi0 = 1.7;
  VectorXd beta0(2);
  beta0 << 0.3, 0.5;

  qp::Rng rng(77);
  Dataset d;
  d.X.resize(n, 2);
  d.X.col(0).setOnes();
  for (Eigen::Index i = 0; i < n; ++i) d.X(i, 1) = rng.normal();
  const VectorXd eta = d.X * beta0;
  const VectorXd mu0 = qp::mean_vector(model, d.X, beta0);

  const int R = 10000;
  // accumulate the entrywise difference h_n - psi0 j_n across replicates
  MatrixXd diff_sum = MatrixXd::Zero(2, 2);
  MatrixXd diff_sq = MatrixXd::Zero(2, 2);
  for (int r = 0; r < R; ++r) {
    d.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      d.y[i] = eta[i] + std::sqrt(psi0 * std::exp(eta[i])) * rng.normal();
    }
    const VectorXd u = qp::score_weights(model, d.y, mu0);
    const VectorXd w = qp::loss_hessian_weights(model, d.y, mu0);
    const MatrixXd h =
        d.X.transpose() * u.array().square().matrix().asDiagonal() * d.X /
        static_cast<double>(n);
    const MatrixXd j =
        d.X.transpose() * w.asDiagonal() * d.X / static_cast<double>(n);
    const MatrixXd diff = h - psi0 * j;
    diff_sum += diff;
    diff_sq += diff.cwiseProduct(diff);
  }
  for (Eigen::Index r = 0; r < 2; ++r) {
    for (Eigen::Index c = 0; c < 2; ++c) {
      const double mean = diff_sum(r, c) / R;
      const double var = (diff_sq(r, c) - diff_sum(r, c) * mean) / (R - 1);
      const double se = std::sqrt(var / R);
      CHECK(std::abs(mean) < 4.0 * se);
    }
  }
}

TEST_CASE("blocked kernels match the serial reference") {
  qp::Rng rng(4096);
  for (const auto& model : named_pairs()) {
    if (!model.variance().has_closed_form()) continue;
    Dataset d = random_dataset(model, 20000, 3, rng);  // spans several blocks
    VectorXd beta = random_beta(3, rng, 0.2);

    const double l_par = qp::quasi_loglik(model, d, beta, 1.3);
    const double l_ser = qp::serial::quasi_loglik(model, d, beta, 1.3);
    CHECK(l_par == doctest::Approx(l_ser).epsilon(1e-11));

    const VectorXd s_par = qp::quasi_score(model, d, beta, 1.3);
    const VectorXd s_ser = qp::serial::quasi_score(model, d, beta, 1.3);
    CHECK((s_par - s_ser).lpNorm<Eigen::Infinity>() <
          1e-10 * std::max(1.0, s_ser.lpNorm<Eigen::Infinity>()));

    const MatrixXd i_par = qp::expected_information(model, d, beta, 1.3);
    const MatrixXd i_ser = qp::serial::expected_information(model, d, beta, 1.3);
    CHECK((i_par - i_ser).norm() < 1e-10 * i_ser.norm());

    const VectorXd m_par = qp::mean_vector(model, d.X, beta);
    const VectorXd m_ser = qp::serial::mean_vector(model, d.X, beta);
    CHECK((m_par - m_ser).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("model construction rejects incompatible pairs and bad parameters") {
  CHECK_THROWS_AS(QuasiModel(LinkFunction::logit(), VarianceFunction::mu()),
                  qp::ValidationError);
  CHECK_THROWS_AS(QuasiModel(LinkFunction::identity(), VarianceFunction::binom()),
                  qp::ValidationError);
  CHECK_THROWS_AS(VarianceFunction::mu_pow(2.0), qp::ValidationError);
  CHECK_THROWS_AS(VarianceFunction::neg_bin(0.0), qp::ValidationError);
  CHECK_THROWS_AS(VarianceFunction::binom_pow(-1.0), qp::ValidationError);
  CHECK_THROWS_AS(
      VarianceFunction::custom([](double) { return 1.0; },
                               qp::MeanDomain::unit(), 2.0),
      qp::ValidationError);  // baseline outside the domain
}

TEST_CASE("response restrictions are enforced") {
  Dataset d = one_obs(-1.0, 1.0);
  CHECK_THROWS_WITH_AS(d.validate_response(VarianceFunction::mu()),
                       doctest::Contains("y >= 0"), qp::ValidationError);
  Dataset d2 = one_obs(1.5, 1.0);
  CHECK_THROWS_WITH_AS(d2.validate_response(VarianceFunction::binom()),
                       doctest::Contains("y in [0, 1]"), qp::ValidationError);
}

TEST_CASE("group labels must cover 1..J") {
  Dataset d;
  d.y = VectorXd::Zero(3);
  d.X = MatrixXd::Ones(3, 1);
  d.groups = {0, 0, 2};
  d.n_groups = 3;
  CHECK_THROWS_AS(d.validate(), qp::ValidationError);
  d.groups = {0, 1, 2};
  CHECK_NOTHROW(d.validate());
}

TEST_CASE("non-finite contribution carries the observation index") {
  QuasiModel model{LinkFunction::identity(), VarianceFunction::exp_mu()};
  Dataset d;
  d.y = VectorXd::Zero(2);
  d.X.resize(2, 1);
  d.X << 1.0, 1.0;
  VectorXd beta = vec1(-800.0);  // exp(-mu) overflows
  try {
    qp::quasi_loglik(model, d, beta, 1.0);
    FAIL("expected EvalError");
  } catch (const qp::EvalError& e) {
    CHECK(e.index == 0);
  }
}

TEST_CASE("clamp events are counted") {
  QuasiModel model{LinkFunction::log(), VarianceFunction::mu()};
  Dataset d;
  d.y = VectorXd::Ones(3);
  d.X.resize(3, 1);
  d.X << 1.0, 1000.0, -1000.0;  // the last two push eta past +-700
  qp::EvalCounters counters;
  qp::quasi_loglik(model, d, VectorXd::Ones(1), 1.0, &counters);
  CHECK(counters.clamps == 2);
}
