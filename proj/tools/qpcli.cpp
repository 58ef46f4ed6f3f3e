// Command-line front end: fit, sample, laplace, dispersion and coverage
// runs over headered CSV inputs, with machine-readable JSON/CSV outputs.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "quasipost/coverage.hpp"
#include "quasipost/diagnostics.hpp"
#include "quasipost/fit.hpp"
#include "quasipost/io/csv.hpp"
#include "quasipost/io/json_writer.hpp"
#include "quasipost/posterior.hpp"
#include "quasipost/sampler.hpp"

namespace fs = std::filesystem;
using Eigen::VectorXd;

namespace {

struct Options {
  std::string command;
  std::string data_path;
  std::string response;
  std::vector<std::string> covariates;
  std::string group_column;
  bool intercept = false;
  std::string link = "identity";
  std::string variance = "constant";
  std::optional<double> variance_param;
  std::string psi_choice = "mom";
  std::string prior = "flat";
  double sigma_prior_scale = 1.0;
  int chains = 3;
  int draws = 1500;
  int warmup = 500;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  double score_tol = 1e-8;
  int max_iter = 100;
  // coverage options
  std::string generator = "het_gaussian";
  std::vector<double> beta0;
  double psi0 = 1.0;
  long n = 0;
  int replicates = 100;
  std::string methods = "both";
};

qp::QuasiModel make_model(const Options& opt) {
  return {qp::LinkFunction::parse(opt.link),
          qp::VarianceFunction::parse(opt.variance, opt.variance_param)};
}

qp::Dataset load_dataset(const Options& opt) {
  if (opt.data_path.empty()) throw qp::ValidationError("--data is required");
  if (opt.response.empty()) throw qp::ValidationError("--response is required");
  if (opt.covariates.empty() && !opt.intercept) {
    throw qp::ValidationError("--covariates (or --intercept) is required");
  }
  const qp::CsvFile csv = qp::read_csv(opt.data_path);
  qp::DatasetColumns cols;
  cols.response = opt.response;
  cols.covariates = opt.covariates;
  cols.group = opt.group_column;
  cols.add_intercept = opt.intercept;
  return qp::dataset_from_csv(csv, cols);
}

qp::Prior make_beta_prior(const Options& opt, Eigen::Index p) {
  if (opt.prior == "flat") return qp::Prior::flat();
  // gaussian:<mean>,<sd> broadcast over the p coefficients
  if (opt.prior.rfind("gaussian:", 0) == 0) {
    const std::string spec = opt.prior.substr(9);
    const auto comma = spec.find(',');
    if (comma == std::string::npos) {
      throw qp::ValidationError("--prior gaussian wants 'gaussian:<mean>,<sd>'");
    }
    const double mean = std::stod(spec.substr(0, comma));
    const double sd = std::stod(spec.substr(comma + 1));
    return qp::Prior::gaussian(VectorXd::Constant(p, mean),
                               VectorXd::Constant(p, sd));
  }
  throw qp::ValidationError("unknown prior '" + opt.prior + "'");
}

qp::ScoringConfig scoring_config(const Options& opt) {
  qp::ScoringConfig config;
  config.score_tol = opt.score_tol;
  config.max_iter = opt.max_iter;
  return config;
}

double choose_psi(const Options& opt, const qp::QuasiModel& model,
                  const qp::Dataset& data, const qp::FitResult* fit) {
  if (opt.psi_choice.rfind("fixed:", 0) == 0) {
    const double v = std::stod(opt.psi_choice.substr(6));
    if (!(v > 0.0)) throw qp::ValidationError("--psi fixed value must be > 0");
    return v;
  }
  if (opt.psi_choice == "mom") {
    if (data.grouped()) return qp::estimate_dispersion_mom_grouped(model, data);
    if (fit) return fit->psi_hat;
    return qp::fit_mql(model, data, scoring_config(opt)).psi_hat;
  }
  if (opt.psi_choice == "llb") {
    if (data.grouped()) {
      throw qp::ValidationError("--psi llb is not available with --groups");
    }
    const VectorXd beta =
        fit ? fit->beta_hat
            : qp::fit_mql(model, data, scoring_config(opt)).beta_hat;
    return qp::estimate_dispersion_llb(model, data, beta);
  }
  throw qp::ValidationError("--psi must be mom, llb or fixed:<value>");
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw qp::ValidationError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw qp::ValidationError("write failed for '" + path.string() + "'");
}

void append_alpha(qp::JsonWriter& json, double psi, Eigen::Index n) {
  const auto alpha = qp::coarsening_alpha(psi, n);
  json.key("alpha").begin_object();
  if (alpha.infinite) {
    json.key("value").null();
  } else {
    json.key("value").value(alpha.alpha);
  }
  json.key("infinite").value(alpha.infinite);
  json.key("underdispersed").value(alpha.underdispersed);
  json.end_object();
}

int cmd_fit(const Options& opt) {
  const qp::QuasiModel model = make_model(opt);
  const qp::Dataset data = load_dataset(opt);
  const qp::FitResult fit = qp::fit_mql(model, data, scoring_config(opt));
  const double psi_llb = qp::estimate_dispersion_llb(model, data, fit.beta_hat);

  qp::JsonWriter json;
  json.begin_object();
  json.key("n").value(static_cast<long long>(data.n()));
  json.key("p").value(static_cast<long long>(data.p()));
  json.key("link").value(opt.link);
  json.key("variance").value(opt.variance);
  if (opt.variance_param) json.key("variance_param").value(*opt.variance_param);
  json.key("beta_hat").value(fit.beta_hat);
  json.key("psi_mom").value(fit.psi_hat);
  json.key("psi_llb").value(psi_llb);
  json.key("perfect_fit").value(fit.perfect_fit);
  if (!fit.perfect_fit) append_alpha(json, fit.psi_hat, data.n());
  json.key("information").value(fit.information);
  json.key("iterations").value(fit.iterations);
  json.key("converged").value(fit.converged);
  json.key("score_norm").value(fit.score_norm);
  json.key("clamp_events").value(static_cast<long long>(fit.clamp_events));
  json.end_object();
  write_file(fs::path(opt.out_dir) / "fit.json", json.str());
  return 0;
}

int cmd_dispersion(const Options& opt) {
  const qp::QuasiModel model = make_model(opt);
  const qp::Dataset data = load_dataset(opt);
  const qp::FitResult fit = qp::fit_mql(model, data, scoring_config(opt));
  const double psi_llb = qp::estimate_dispersion_llb(model, data, fit.beta_hat);

  qp::JsonWriter json;
  json.begin_object();
  json.key("n").value(static_cast<long long>(data.n()));
  json.key("p").value(static_cast<long long>(data.p()));
  json.key("psi_mom").value(fit.psi_hat);
  json.key("psi_llb").value(psi_llb);
  json.key("perfect_fit").value(fit.perfect_fit);
  if (!fit.perfect_fit) append_alpha(json, fit.psi_hat, data.n());
  json.end_object();
  write_file(fs::path(opt.out_dir) / "dispersion.json", json.str());
  return 0;
}

int cmd_laplace(const Options& opt) {
  const qp::QuasiModel model = make_model(opt);
  const qp::Dataset data = load_dataset(opt);
  if (data.grouped()) {
    throw qp::ValidationError("laplace covers fixed-effects models only");
  }
  const qp::FitResult fit = qp::fit_mql(model, data, scoring_config(opt));
  const double psi = choose_psi(opt, model, data, &fit);
  qp::PosteriorSpec spec{model, qp::Prior::flat(), psi, {}};
  const qp::LaplaceApprox lap = qp::laplace_approx(spec, data, fit);

  qp::JsonWriter json;
  json.begin_object();
  json.key("psi").value(psi);
  json.key("mean").value(lap.mean);
  json.key("covariance").value(lap.covariance);
  json.end_object();
  write_file(fs::path(opt.out_dir) / "laplace.json", json.str());
  return 0;
}

std::string param_label(Eigen::Index j, Eigen::Index p, int n_groups) {
  if (j < p) return "beta_" + std::to_string(j + 1);
  if (j < p + n_groups) return "delta_" + std::to_string(j - p + 1);
  return "log_sigma";
}

int cmd_sample(const Options& opt) {
  const qp::QuasiModel model = make_model(opt);
  const qp::Dataset data = load_dataset(opt);

  qp::PosteriorSpec spec{model, make_beta_prior(opt, data.p()),
                         choose_psi(opt, model, data, nullptr),
                         {}};
  if (data.grouped()) {
    qp::HierarchySpec hier;
    hier.prior_sigma = qp::Prior::half_normal(opt.sigma_prior_scale);
    hier.n_groups = data.n_groups;
    spec.hierarchical = hier;
  }

  qp::SamplerConfig config;
  config.chains = opt.chains;
  config.draws = opt.draws;
  config.warmup = opt.warmup;
  config.seed = opt.seed;
  const qp::ChainSet chains = qp::sample_rwmh(spec, data, config);

  const fs::path out(opt.out_dir);
  qp::write_chains_csv((out / "chains.csv").string(), chains);

  const Eigen::MatrixXd pooled = chains.pooled();
  const VectorXd mean = pooled.colwise().mean();
  qp::Diagnostics diag;
  if (chains.n_chains() >= 2 && chains.n_draws() >= 4) {
    diag = qp::diagnostics(chains);
  }
  const std::vector<double> levels = {0.90, 0.95, 0.99};
  std::vector<qp::CredibleSet> equal_tailed, hpd;
  const bool have_sets = pooled.rows() >= 100;
  if (have_sets) {
    for (double level : levels) {
      equal_tailed.push_back(
          qp::credible_sets(chains, level, qp::IntervalKind::EqualTailed));
      hpd.push_back(qp::credible_sets(chains, level, qp::IntervalKind::Hpd));
    }
  }

  qp::JsonWriter json;
  json.begin_object();
  json.key("chains").value(chains.n_chains());
  json.key("draws_per_chain").value(static_cast<long long>(chains.n_draws()));
  json.key("warmup").value(chains.warmup);
  json.key("seed").value(static_cast<unsigned long long>(chains.seed));
  json.key("psi").value(spec.psi);
  json.key("acceptance_rate").begin_array();
  for (double r : chains.acceptance_rate) json.value(r);
  json.end_array();
  json.key("parameters").begin_array();
  for (Eigen::Index j = 0; j < pooled.cols(); ++j) {
    const double sd = std::sqrt(
        (pooled.col(j).array() - mean[j]).square().sum() / (pooled.rows() - 1.0));
    json.begin_object();
    json.key("name").value("param_" + std::to_string(j + 1));
    json.key("label").value(param_label(
        j, data.p(), spec.hierarchical ? spec.hierarchical->n_groups : 0));
    json.key("mean").value(mean[j]);
    json.key("sd").value(sd);
    json.key("rhat").value(diag.rhat.size() > j ? diag.rhat[j] : std::nan(""));
    json.key("ess").value(diag.ess.size() > j ? diag.ess[j] : std::nan(""));
    json.key("mcse").value(diag.mcse.size() > j ? diag.mcse[j] : std::nan(""));
    for (std::size_t l = 0; l < levels.size(); ++l) {
      char name[32];
      std::snprintf(name, sizeof(name), "equal_tailed_%.2f", levels[l]);
      json.key(name).begin_array();
      if (have_sets) {
        json.value(equal_tailed[l].intervals[j].first);
        json.value(equal_tailed[l].intervals[j].second);
      }
      json.end_array();
      std::snprintf(name, sizeof(name), "hpd_%.2f", levels[l]);
      json.key(name).begin_array();
      if (have_sets) {
        json.value(hpd[l].intervals[j].first);
        json.value(hpd[l].intervals[j].second);
      }
      json.end_array();
    }
    json.end_object();
  }
  json.end_array();
  json.end_object();
  write_file(out / "summary.json", json.str());
  return 0;
}

int cmd_coverage(const Options& opt) {
  qp::CoverageStudyConfig config;
  if (opt.generator == "het_gaussian") {
    config.generator.kind = qp::GeneratorSpec::Kind::HetGaussian;
  } else if (opt.generator == "rounded_gamma_counts") {
    config.generator.kind = qp::GeneratorSpec::Kind::RoundedGammaCounts;
  } else {
    throw qp::ValidationError("unknown generator '" + opt.generator + "'");
  }
  if (opt.beta0.empty()) throw qp::ValidationError("--beta0 is required");
  if (opt.n <= 0) throw qp::ValidationError("--n is required");
  config.generator.beta0 =
      Eigen::Map<const VectorXd>(opt.beta0.data(),
                                 static_cast<Eigen::Index>(opt.beta0.size()));
  config.generator.psi0 = opt.psi0;
  config.generator.n = opt.n;
  config.replicates = opt.replicates;
  config.seed = opt.seed;
  config.sampler.chains = opt.chains;
  config.sampler.draws = opt.draws;
  config.sampler.warmup = opt.warmup;
  if (opt.methods == "quasi") {
    config.methods = {qp::CoverageMethod::QuasiPosterior};
  } else if (opt.methods == "reference") {
    config.methods = {qp::CoverageMethod::MisspecifiedReference};
  } else if (opt.methods != "both") {
    throw qp::ValidationError("--methods must be both, quasi or reference");
  }

  const auto reports = qp::run_coverage_study(config);

  const fs::path out(opt.out_dir);
  {
    std::ofstream cov(out / "coverage.csv");
    if (!cov) throw qp::ValidationError("cannot write coverage.csv");
    cov << "method,level,coefficient,coverage,replicates,failures\n";
    char buf[64];
    for (const auto& rep : reports) {
      for (std::size_t l = 0; l < rep.levels.size(); ++l) {
        for (Eigen::Index j = 0; j < rep.coverage.cols(); ++j) {
          std::snprintf(buf, sizeof(buf), "%.17g",
                        rep.coverage(static_cast<Eigen::Index>(l), j));
          cov << rep.method << ',' << rep.levels[l] << ',' << (j + 1) << ','
              << buf << ',' << rep.replicates << ',' << rep.failures << "\n";
        }
      }
    }
  }
  {
    std::ofstream means(out / "posterior_means.csv");
    if (!means) throw qp::ValidationError("cannot write posterior_means.csv");
    means << "method,replicate,coefficient,posterior_mean\n";
    char buf[64];
    for (const auto& rep : reports) {
      for (Eigen::Index r = 0; r < rep.posterior_means.rows(); ++r) {
        if (std::isnan(rep.posterior_means(r, 0))) continue;
        for (Eigen::Index j = 0; j < rep.posterior_means.cols(); ++j) {
          std::snprintf(buf, sizeof(buf), "%.17g", rep.posterior_means(r, j));
          means << rep.method << ',' << (r + 1) << ',' << (j + 1) << ',' << buf
                << "\n";
        }
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"quasi-posterior inference for generalized linear models"};
  app.set_config("--config", "", "flat key=value file; command line wins");
  app.add_option("command", opt.command,
                 "fit | sample | laplace | dispersion | coverage")
      ->required()
      ->check(CLI::IsMember({"fit", "sample", "laplace", "dispersion", "coverage"}));
  app.add_option("--data", opt.data_path, "input CSV path");
  app.add_option("--response", opt.response, "response column name");
  app.add_option("--covariates", opt.covariates, "covariate column names")
      ->delimiter(',');
  app.add_option("--groups", opt.group_column, "group label column");
  app.add_flag("--intercept", opt.intercept, "prepend a column of ones");
  app.add_option("--link", opt.link, "identity | log | logit");
  app.add_option("--variance", opt.variance,
                 "constant | mu | mu_sq | mu_pow | exp_mu | binom | binom_sq | "
                 "binom_pow | nb");
  app.add_option("--variance-param", opt.variance_param,
                 "p for mu_pow, q for binom_pow, k for nb");
  app.add_option("--psi", opt.psi_choice, "mom | llb | fixed:<value>");
  app.add_option("--prior", opt.prior, "flat | gaussian:<mean>,<sd>");
  app.add_option("--sigma-prior-scale", opt.sigma_prior_scale,
                 "half-normal scale for the random-intercept sd");
  app.add_option("--chains", opt.chains);
  app.add_option("--draws", opt.draws, "iterations per chain incl. warmup");
  app.add_option("--warmup", opt.warmup);
  app.add_option("--seed", opt.seed);
  app.add_option("--out", opt.out_dir, "output directory");
  app.add_option("--score-tol", opt.score_tol, "scoring convergence tolerance");
  app.add_option("--max-iter", opt.max_iter, "scoring iteration cap");
  app.add_option("--generator", opt.generator,
                 "het_gaussian | rounded_gamma_counts");
  app.add_option("--beta0", opt.beta0, "true coefficients for coverage runs")
      ->delimiter(',');
  app.add_option("--psi0", opt.psi0, "true dispersion for coverage runs");
  app.add_option("--n", opt.n, "sample size per replicate");
  app.add_option("--replicates", opt.replicates, "coverage replicates");
  app.add_option("--methods", opt.methods, "both | quasi | reference");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    fs::create_directories(opt.out_dir);
    if (opt.command == "fit") return cmd_fit(opt);
    if (opt.command == "sample") return cmd_sample(opt);
    if (opt.command == "laplace") return cmd_laplace(opt);
    if (opt.command == "dispersion") return cmd_dispersion(opt);
    if (opt.command == "coverage") return cmd_coverage(opt);
    throw qp::ValidationError("unknown command '" + opt.command + "'");
  } catch (const qp::DivergedError& e) {
    std::ostringstream last;
    last << e.last.beta_hat.transpose();
    std::cerr << "error: " << e.what() << "\nlast iterate: " << last.str()
              << "\n";
    return 3;
  } catch (const qp::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const qp::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
