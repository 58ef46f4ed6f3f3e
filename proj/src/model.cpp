#include "quasipost/model.hpp"

#include <cmath>
#include <string>

#include "quasipost/errors.hpp"
#include "quasipost/parallel.hpp"
#include "quasipost/quad.hpp"

namespace qp {

namespace {

using Eigen::ArrayXd;
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

using ConstSeg = Eigen::Ref<const ArrayXd>;

// Inverse link on a contiguous segment with clamp counting.
void mean_segment(const LinkFunction& link, const ConstSeg& eta,
                  Eigen::Ref<ArrayXd> mu, long& clamps) {
  switch (link.kind()) {
    case LinkKind::Identity:
      mu = eta;
      break;
    case LinkKind::Log:
      clamps += (eta.abs() > kEtaMax).count();
      mu = eta.min(kEtaMax).max(-kEtaMax).exp();
      break;
    case LinkKind::Logit:
      mu = 1.0 / (1.0 + (-eta).exp());
      clamps += ((mu < kMuEps) || (mu > 1.0 - kMuEps)).count();
      mu = mu.min(1.0 - kMuEps).max(kMuEps);
      break;
  }
}

// Unit-dispersion contributions on a segment. Closed forms are vectorized;
// the quadrature families fall back to per-observation integration.
void terms_segment(const VarianceFunction& V, const ConstSeg& y,
                   const ConstSeg& mu, Eigen::Ref<ArrayXd> out) {
  switch (V.kind()) {
    case VarianceKind::Constant:
      out = y * mu - 0.5 * mu.square();
      return;
    case VarianceKind::Mu:
      out = y * mu.log() - mu;
      return;
    case VarianceKind::MuSq:
      out = -y / mu - mu.log();
      return;
    case VarianceKind::MuPow: {
      const double p = V.param();
      out = y * mu.pow(1.0 - p) / (1.0 - p) - mu.pow(2.0 - p) / (2.0 - p);
      return;
    }
    case VarianceKind::ExpMu:
      out = (mu - y + 1.0) * (-mu).exp();
      return;
    case VarianceKind::Binom:
      out = y * mu.log() + (1.0 - y) * (1.0 - mu).log();
      return;
    case VarianceKind::BinomSq: {
      const ArrayXd w = 2.0 * y - 1.0;
      out = w * (mu / (1.0 - mu)).log() + w / (1.0 - mu) -
            y / (mu * (1.0 - mu));
      return;
    }
    case VarianceKind::NegBin: {
      const double k = V.param();
      out = y * (mu / (k + mu)).log() - k * (k + mu).log();
      return;
    }
    case VarianceKind::BinomPow:
    case VarianceKind::Custom:
      for (Index i = 0; i < y.size(); ++i) {
        out[i] = quasi_loglik_quadrature(V, y[i], mu[i], 1.0);
      }
      return;
  }
}

void weights_segment(const QuasiModel& model, const ConstSeg& y,
                     const ConstSeg& mu, ArrayXd* u, ArrayXd* d) {
  const auto& V = model.variance();
  const auto& link = model.link();
  const Index len = mu.size();
  ArrayXd v(len), gp(len);
  for (Index i = 0; i < len; ++i) {
    v[i] = V(mu[i]);
    gp[i] = link.deriv(mu[i]);
  }
  if (u) *u = (y - mu) / (v * gp);
  if (d) *d = 1.0 / (v * gp.square());
}

}  // namespace

QuasiModel::QuasiModel(LinkFunction link, VarianceFunction variance)
    : link_(link), variance_(std::move(variance)) {
  if (!(variance_.domain() == link_.range())) {
    throw ValidationError("variance domain must match the inverse-link range ('" +
                          link_.name() + "' link with '" + variance_.name() +
                          "' variance)");
  }
}

Eigen::VectorXd mean_from_eta(const QuasiModel& model, const VectorXd& eta,
                              EvalCounters* counters) {
  const Index n = eta.size();
  VectorXd mu(n);
  std::vector<long> clamps(static_cast<std::size_t>(num_blocks(n)), 0);
  for_each_block(n, [&](Index b, Index lo, Index len) {
    mean_segment(model.link(), eta.array().segment(lo, len),
                 mu.array().segment(lo, len), clamps[static_cast<std::size_t>(b)]);
  });
  if (counters) {
    for (long c : clamps) counters->clamps += c;
  }
  return mu;
}

Eigen::VectorXd mean_vector(const QuasiModel& model, const MatrixXd& X,
                            const VectorXd& beta, EvalCounters* counters) {
  if (beta.size() != X.cols()) {
    throw ValidationError("beta dimension does not match design matrix");
  }
  return mean_from_eta(model, X * beta, counters);
}

double quasi_loglik_eta(const QuasiModel& model, const VectorXd& y,
                        const VectorXd& eta, double psi,
                        EvalCounters* counters) {
  if (!(psi > 0.0)) throw DomainError("quasi_loglik requires psi > 0");
  if (y.size() != eta.size()) {
    throw ValidationError("response and linear predictor lengths differ");
  }
  const Index n = y.size();
  const Index nblocks = num_blocks(n);
  std::vector<double> part(static_cast<std::size_t>(nblocks), 0.0);
  std::vector<long> clamps(static_cast<std::size_t>(nblocks), 0);
  std::vector<Index> bad(static_cast<std::size_t>(nblocks), -1);

  for_each_block(n, [&](Index b, Index lo, Index len) {
    ArrayXd mu(len), terms(len);
    mean_segment(model.link(), eta.array().segment(lo, len), mu,
                 clamps[static_cast<std::size_t>(b)]);
    terms_segment(model.variance(), y.array().segment(lo, len), mu, terms);
    if (!terms.allFinite()) {
      for (Index i = 0; i < len; ++i) {
        if (!std::isfinite(terms[i])) {
          bad[static_cast<std::size_t>(b)] = lo + i;
          break;
        }
      }
    }
    part[static_cast<std::size_t>(b)] = terms.sum();
  });

  for (Index b = 0; b < nblocks; ++b) {
    if (bad[static_cast<std::size_t>(b)] >= 0) {
      throw EvalError("non-finite quasi-log-likelihood contribution at observation " +
                          std::to_string(bad[static_cast<std::size_t>(b)] + 1),
                      bad[static_cast<std::size_t>(b)]);
    }
  }
  if (counters) {
    for (long c : clamps) counters->clamps += c;
  }
  double total = 0.0;
  for (double v : part) total += v;
  return total / psi;
}

double quasi_loglik(const QuasiModel& model, const Dataset& data,
                    const VectorXd& beta, double psi, EvalCounters* counters) {
  if (beta.size() != data.X.cols()) {
    throw ValidationError("beta dimension does not match design matrix");
  }
  return quasi_loglik_eta(model, data.y, data.X * beta, psi, counters);
}

Eigen::VectorXd quasi_score(const QuasiModel& model, const Dataset& data,
                            const VectorXd& beta, double psi,
                            EvalCounters* counters) {
  if (!(psi > 0.0)) throw DomainError("quasi_score requires psi > 0");
  if (beta.size() != data.X.cols()) {
    throw ValidationError("beta dimension does not match design matrix");
  }
  const Index n = data.n();
  const Index p = data.p();
  const VectorXd eta = data.X * beta;
  const Index nblocks = num_blocks(n);
  MatrixXd part = MatrixXd::Zero(p, nblocks);
  std::vector<long> clamps(static_cast<std::size_t>(nblocks), 0);

  for_each_block(n, [&](Index b, Index lo, Index len) {
    ArrayXd mu(len), u;
    mean_segment(model.link(), eta.array().segment(lo, len), mu,
                 clamps[static_cast<std::size_t>(b)]);
    weights_segment(model, data.y.array().segment(lo, len), mu, &u, nullptr);
    part.col(b) = data.X.middleRows(lo, len).transpose() * u.matrix();
  });

  if (counters) {
    for (long c : clamps) counters->clamps += c;
  }
  VectorXd score = VectorXd::Zero(p);
  for (Index b = 0; b < nblocks; ++b) score += part.col(b);
  score /= psi;
  if (!score.allFinite()) {
    throw EvalError("non-finite quasi-score", -1);
  }
  return score;
}

Eigen::MatrixXd expected_information(const QuasiModel& model,
                                     const Dataset& data, const VectorXd& beta,
                                     double psi, EvalCounters* counters) {
  if (!(psi > 0.0)) throw DomainError("expected_information requires psi > 0");
  if (beta.size() != data.X.cols()) {
    throw ValidationError("beta dimension does not match design matrix");
  }
  const Index n = data.n();
  const Index p = data.p();
  const VectorXd eta = data.X * beta;
  const Index nblocks = num_blocks(n);
  std::vector<MatrixXd> part(static_cast<std::size_t>(nblocks),
                             MatrixXd::Zero(p, p));
  std::vector<long> clamps(static_cast<std::size_t>(nblocks), 0);

  for_each_block(n, [&](Index b, Index lo, Index len) {
    ArrayXd mu(len), d;
    mean_segment(model.link(), eta.array().segment(lo, len), mu,
                 clamps[static_cast<std::size_t>(b)]);
    weights_segment(model, data.y.array().segment(lo, len), mu, nullptr, &d);
    const auto Xb = data.X.middleRows(lo, len);
    part[static_cast<std::size_t>(b)] = Xb.transpose() * d.matrix().asDiagonal() * Xb;
  });

  if (counters) {
    for (long c : clamps) counters->clamps += c;
  }
  MatrixXd info = MatrixXd::Zero(p, p);
  for (const auto& m : part) info += m;
  info /= psi;
  // enforce exact symmetry against accumulated rounding
  info = ((info + info.transpose()) * 0.5).eval();
  if (!info.allFinite()) {
    throw EvalError("non-finite expected information", -1);
  }
  return info;
}

Eigen::VectorXd score_weights(const QuasiModel& model, const VectorXd& y,
                              const VectorXd& mu) {
  ArrayXd u;
  weights_segment(model, y.array(), mu.array(), &u, nullptr);
  return u.matrix();
}

Eigen::VectorXd info_weights(const QuasiModel& model, const VectorXd& mu) {
  ArrayXd d;
  weights_segment(model, ArrayXd::Zero(mu.size()), mu.array(), nullptr, &d);
  return d.matrix();
}

Eigen::VectorXd loss_hessian_weights(const QuasiModel& model, const VectorXd& y,
                                     const VectorXd& mu) {
  const auto& V = model.variance();
  const auto& link = model.link();
  const Index n = mu.size();
  VectorXd w(n);
  for (Index i = 0; i < n; ++i) {
    const double v = V(mu[i]);
    const double vp = V.deriv(mu[i]);
    const double gp = link.deriv(mu[i]);
    const double gpp = link.deriv2(mu[i]);
    const double vg = v * gp;
    w[i] = 1.0 / (v * gp * gp) + (y[i] - mu[i]) * (vp * gp + v * gpp) / (vg * vg * gp);
  }
  return w;
}

}  // namespace qp
