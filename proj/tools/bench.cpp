// Timing harness: blocked OpenMP kernels against the serial reference
// loops, and parallel against serial chain execution.

#include <chrono>
#include <cstdio>

#include "quasipost/model.hpp"
#include "quasipost/parallel.hpp"
#include "quasipost/sampler.hpp"
#include "quasipost/serial_ref.hpp"
#include "quasipost/simulate.hpp"

using Clock = std::chrono::steady_clock;
using Eigen::VectorXd;

namespace {

double seconds_per_call(const std::function<double()>& fn, int reps) {
  double sink = 0.0;
  const auto t0 = Clock::now();
  for (int r = 0; r < reps; ++r) sink += fn();
  const auto t1 = Clock::now();
  // keep the accumulated value observable so the calls are not elided
  volatile double guard = sink;
  (void)guard;
  return std::chrono::duration<double>(t1 - t0).count() / reps;
}

void bench_kernels(Eigen::Index n) {
  qp::GeneratorSpec gen;
  gen.kind = qp::GeneratorSpec::Kind::RoundedGammaCounts;
  gen.beta0.resize(4);
  gen.beta0 << 2.0, 0.8, -0.5, 0.3;
  gen.psi0 = 2.5;
  gen.n = n;
  const qp::Dataset data = qp::generate_rounded_gamma_counts(gen, 99);
  const qp::QuasiModel model = qp::generator_model(gen.kind);
  const VectorXd beta = gen.beta0 * 0.9;

  const int reps = n >= 1000000 ? 5 : 20;
  const double t_ll_par = seconds_per_call(
      [&] { return qp::quasi_loglik(model, data, beta, 1.0); }, reps);
  const double t_ll_ser = seconds_per_call(
      [&] { return qp::serial::quasi_loglik(model, data, beta, 1.0); }, reps);
  const double t_sc_par = seconds_per_call(
      [&] { return qp::quasi_score(model, data, beta, 1.0).sum(); }, reps);
  const double t_sc_ser = seconds_per_call(
      [&] { return qp::serial::quasi_score(model, data, beta, 1.0).sum(); },
      reps);
  const double t_in_par = seconds_per_call(
      [&] { return qp::expected_information(model, data, beta, 1.0).sum(); },
      reps);
  const double t_in_ser = seconds_per_call(
      [&] {
        return qp::serial::expected_information(model, data, beta, 1.0).sum();
      },
      reps);

  std::printf("n = %-8lld  loglik %8.3f / %8.3f ms  (x%.2f)"
              "  score %8.3f / %8.3f ms  (x%.2f)"
              "  info %8.3f / %8.3f ms  (x%.2f)\n",
              static_cast<long long>(n), 1e3 * t_ll_par, 1e3 * t_ll_ser,
              t_ll_ser / t_ll_par, 1e3 * t_sc_par, 1e3 * t_sc_ser,
              t_sc_ser / t_sc_par, 1e3 * t_in_par, 1e3 * t_in_ser,
              t_in_ser / t_in_par);
}

void bench_chains() {
  qp::GeneratorSpec gen;
  gen.kind = qp::GeneratorSpec::Kind::HetGaussian;
  gen.beta0.resize(4);
  gen.beta0 << -1.0, 1.0, 0.8, -0.5;
  gen.psi0 = 2.0;
  gen.n = 2000;
  const qp::Dataset data = qp::generate_het_gaussian(gen, 7);
  const qp::QuasiModel model = qp::generator_model(gen.kind);
  qp::PosteriorSpec spec{model, qp::Prior::flat(), 2.0, {}};

  qp::SamplerConfig config;
  config.chains = 4;
  config.draws = 2000;
  config.warmup = 500;
  config.seed = 12;

  config.parallel_chains = false;
  const auto t0 = Clock::now();
  qp::sample_rwmh(spec, data, config);
  const auto t1 = Clock::now();
  config.parallel_chains = true;
  qp::sample_rwmh(spec, data, config);
  const auto t2 = Clock::now();

  const double serial = std::chrono::duration<double>(t1 - t0).count();
  const double parallel = std::chrono::duration<double>(t2 - t1).count();
  std::printf("sampler, 4 chains x 2000 draws at n = 2000: %0.2f s serial, "
              "%0.2f s parallel  (x%.2f)\n",
              serial, parallel, serial / parallel);
}

}  // namespace

int main() {
  std::printf("threads available: %d\n", qp::hardware_threads());
  std::printf("kernel timings, blocked (parallel) / reference (serial):\n");
  for (Eigen::Index n : {10000, 100000, 1000000}) bench_kernels(n);
  bench_chains();
  return 0;
}
