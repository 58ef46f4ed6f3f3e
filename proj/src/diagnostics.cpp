#include "quasipost/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "quasipost/errors.hpp"
#include "quasipost/parallel.hpp"

namespace qp {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Each chain split in half; columns are the split sequences for one parameter.
MatrixXd split_sequences(const ChainSet& chains, Index param) {
  const Index n_half = chains.n_draws() / 2;
  const int m = 2 * chains.n_chains();
  MatrixXd seq(n_half, m);
  for (int c = 0; c < chains.n_chains(); ++c) {
    seq.col(2 * c) = chains.draws[c].col(param).head(n_half);
    seq.col(2 * c + 1) = chains.draws[c].col(param).tail(n_half);
  }
  return seq;
}

struct Variogram {
  double w = 0.0;        // mean within-sequence variance
  double var_plus = 0.0; // marginal posterior variance estimate
  VectorXd seq_means;
};

Variogram within_between(const MatrixXd& seq) {
  const Index n = seq.rows();
  const Index m = seq.cols();
  Variogram v;
  v.seq_means = seq.colwise().mean();
  double w = 0.0;
  for (Index k = 0; k < m; ++k) {
    w += (seq.col(k).array() - v.seq_means[k]).square().sum() /
         static_cast<double>(n - 1);
  }
  v.w = w / static_cast<double>(m);
  const double grand = v.seq_means.mean();
  const double b = (v.seq_means.array() - grand).square().sum() /
                   static_cast<double>(m - 1) * static_cast<double>(n);
  v.var_plus = (static_cast<double>(n - 1) / static_cast<double>(n)) * v.w +
               b / static_cast<double>(n);
  return v;
}

// lag-t autocovariance averaged over sequences (biased, 1/n normalization)
double mean_autocov(const MatrixXd& seq, const VectorXd& means, Index t) {
  const Index n = seq.rows();
  const Index m = seq.cols();
  double acc = 0.0;
  for (Index k = 0; k < m; ++k) {
    double s = 0.0;
    const double mk = means[k];
    for (Index i = 0; i < n - t; ++i) {
      s += (seq(i, k) - mk) * (seq(i + t, k) - mk);
    }
    acc += s / static_cast<double>(n);
  }
  return acc / static_cast<double>(m);
}

double ess_one_param(const MatrixXd& seq, const Variogram& v) {
  const Index n = seq.rows();
  const Index m = seq.cols();
  if (!(v.var_plus > 0.0)) return 0.0;

  // Geyer initial positive and monotone sequence on paired autocorrelations
  double tau = 1.0;
  double prev_pair = kInf;
  for (Index t = 1; t + 1 < n; t += 2) {
    const double rho_a = 1.0 - (v.w - mean_autocov(seq, v.seq_means, t)) / v.var_plus;
    const double rho_b =
        1.0 - (v.w - mean_autocov(seq, v.seq_means, t + 1)) / v.var_plus;
    double pair = rho_a + rho_b;
    if (pair < 0.0) break;
    pair = std::min(pair, prev_pair);
    prev_pair = pair;
    tau += 2.0 * pair;
  }
  tau = std::max(tau, 1.0 / std::log10(static_cast<double>(n * m) + 10.0));
  return static_cast<double>(n * m) / tau;
}

}  // namespace

Diagnostics diagnostics(const ChainSet& chains) {
  if (chains.n_chains() < 2) {
    throw ValidationError("diagnostics require at least 2 chains");
  }
  if (chains.n_draws() < 4) {
    throw ValidationError("diagnostics require at least 4 draws per chain");
  }
  const Index d = chains.dim();
  Diagnostics out;
  out.rhat.resize(d);
  out.ess.resize(d);
  out.mcse.resize(d);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (!in_parallel_region() && d > 1)
#endif
  for (Index j = 0; j < d; ++j) {
    const MatrixXd seq = split_sequences(chains, j);
    const Variogram v = within_between(seq);
    if (!(v.w > 0.0)) {
      out.rhat[j] = kInf;
      out.ess[j] = 0.0;
      out.mcse[j] = kInf;
      continue;
    }
    out.rhat[j] = std::sqrt(v.var_plus / v.w);
    out.ess[j] = ess_one_param(seq, v);
    out.mcse[j] = out.ess[j] > 0.0 ? std::sqrt(v.var_plus / out.ess[j]) : kInf;
  }
  return out;
}

double empirical_quantile(VectorXd values, double q) {
  if (values.size() == 0) throw ValidationError("quantile of empty sample");
  std::sort(values.data(), values.data() + values.size());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<Index>(std::floor(h));
  if (lo + 1 >= values.size()) return values[values.size() - 1];
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

CredibleSet credible_sets(const ChainSet& chains, double level,
                          IntervalKind kind) {
  if (!(level > 0.0) || !(level < 1.0)) {
    throw DomainError("credible level must lie in (0, 1)");
  }
  const Index total = chains.n_draws() * chains.n_chains();
  if (total < 100) {
    throw ValidationError("credible sets need at least 100 post-warmup draws");
  }
  const MatrixXd pooled = chains.pooled();
  CredibleSet out;
  out.level = level;
  out.kind = kind;
  out.intervals.resize(static_cast<std::size_t>(pooled.cols()));

  for (Index j = 0; j < pooled.cols(); ++j) {
    VectorXd col = pooled.col(j);
    if (kind == IntervalKind::EqualTailed) {
      out.intervals[static_cast<std::size_t>(j)] = {
          empirical_quantile(col, 0.5 * (1.0 - level)),
          empirical_quantile(col, 1.0 - 0.5 * (1.0 - level))};
    } else {
      std::sort(col.data(), col.data() + col.size());
      const Index m = std::min<Index>(
          col.size(),
          std::max<Index>(1, static_cast<Index>(
                                 std::ceil(level * static_cast<double>(col.size())))));
      Index best = 0;
      double best_width = kInf;
      for (Index i = 0; i + m <= col.size(); ++i) {
        const double width = col[i + m - 1] - col[i];
        if (width < best_width) {
          best_width = width;
          best = i;
        }
      }
      out.intervals[static_cast<std::size_t>(j)] = {col[best], col[best + m - 1]};
    }
  }
  return out;
}

}  // namespace qp
