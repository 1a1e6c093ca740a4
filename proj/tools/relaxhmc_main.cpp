#include "relaxhmc/errors.hpp"
#include "relaxhmc/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace relaxhmc;

constexpr const char* kCsvDoc =
    "Output files (written to --out):\n"
    "  samples.csv          columns: lambda, replicate, iteration,\n"
    "                       theta_0..theta_{r-1}, distance, accepted.\n"
    "                       One row per stored draw; iteration counts from the\n"
    "                       start of the chain (burn-in included in the count,\n"
    "                       burn-in draws not stored); distance is the weighted\n"
    "                       constraint violation; accepted is 0/1.\n"
    "  summary.json         per-lambda statistics, oracle values, diagnostics.\n"
    "  config_resolved.json fully-resolved config; rerunning it replays the\n"
    "                       experiment bit-exactly.\n"
    "  density.csv          gaussian-inequality: theta, sharp, relaxed_lambda_*.\n"
    "  section.csv          sphere-*: lambda, replicate, s1, s2, s3, angle.\n"
    "  rate.csv             rate-*: lambda, sharp, relaxed, error, error_bound,\n"
    "                       ratio.\n"
    "\n"
    "Seed precedence: --seed, then config file, then RELAXHMC_SEED, then 0.\n"
    "Command-line values override config-file values.";

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool parse_lambda_list(const std::string& text, std::vector<double>& out, std::string& err) {
  out.clear();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t pos = 0;
      const double v = std::stod(item, &pos);
      while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
      if (pos != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      err = "--lambda: '" + item + "' is not a number";
      return false;
    }
  }
  if (out.empty()) {
    err = "--lambda: empty list";
    return false;
  }
  return true;
}

void print_report(const ExperimentResult& res) {
  const ExperimentConfig& cfg = res.config;
  std::printf("experiment  %s  (model %s, estimand %s)\n",
              experiment_name(cfg.experiment).c_str(), res.model.c_str(),
              res.estimand.c_str());
  std::printf("seed        %llu   replicates %d   output %s\n",
              static_cast<unsigned long long>(*cfg.seed), *cfg.replicates,
              cfg.output_dir.c_str());
  for (const LambdaStats& st : res.per_lambda) {
    std::printf("lambda %-8.3g", st.lambda);
    if (st.n_kept > 0) {
      std::printf("  accept %.2f  step %.3g  ESS/1000 %.0f  viol %.2e", st.accept_rate,
                  st.step_size, st.ess_per_1000, st.violation.mean);
      if (st.diff_mean) std::printf("  diff %.2e", *st.diff_mean);
    }
    if (st.quad_diff) std::printf("  oracle gap %.3e", *st.quad_diff);
    if (st.tail_fraction) std::printf("  tail %.4f", *st.tail_fraction);
    if (st.chi2_statistic) std::printf("  chi2 %.1f", *st.chi2_statistic);
    if (st.u_orthogonality) std::printf("  |U'U-I| %.3f", *st.u_orthogonality);
    if (st.auc) std::printf("  AUC %.3f", *st.auc);
    std::printf("\n");
  }
  if (res.rate_fit)
    std::printf("rate fit    slope %.3f  intercept %.3f  r^2 %.4f\n", res.rate_fit->slope,
                res.rate_fit->intercept, res.rate_fit->r_squared);
  if (res.baseline_mean)
    std::printf("exact-vs-exact baseline  diff %.3e  ci95 [%.3e, %.3e]\n",
                *res.baseline_mean, *res.baseline_lo, *res.baseline_hi);
}

struct RunFlags {
  std::string experiment;
  std::string config_path;
  std::string lambda_csv;
  std::string out_dir;
  std::uint64_t seed = 0;
  int iterations = 0, burnin = 0, thin = 0, replicates = 0, n_obs = 0, leapfrog = 0,
      grid = 0;
  double step_size = 0.0;
};

int do_run(const CLI::App& sub, const RunFlags& f) {
  const auto exp = experiment_from_name(f.experiment);
  if (!exp) {
    std::cerr << "relaxhmc: unknown experiment '" << f.experiment
              << "' (see 'relaxhmc list')\n";
    return 2;
  }

  ExperimentConfig cfg;
  cfg.experiment = *exp;
  if (sub.count("--config")) {
    const auto text = read_file(f.config_path);
    if (!text) {
      std::cerr << "relaxhmc: cannot read " << f.config_path << "\n";
      return 1;
    }
    std::vector<std::string> errs;
    auto parsed = config_from_json(*text, errs, *exp);
    if (!parsed) {
      for (const auto& e : errs) std::cerr << f.config_path << ": " << e << "\n";
      return 1;
    }
    cfg = *parsed;
    cfg.experiment = *exp;
  }

  if (sub.count("--lambda")) {
    std::vector<double> lams;
    std::string err;
    if (!parse_lambda_list(f.lambda_csv, lams, err)) {
      std::cerr << "relaxhmc: " << err << "\n";
      return 1;
    }
    cfg.lambda_grid = lams;
  }
  if (sub.count("--seed")) {
    cfg.seed = f.seed;
  } else if (!cfg.seed) {
    if (const char* env = std::getenv("RELAXHMC_SEED")) {
      try {
        size_t pos = 0;
        cfg.seed = std::stoull(env, &pos);
        if (pos != std::string(env).size()) throw std::invalid_argument(env);
      } catch (const std::exception&) {
        std::cerr << "relaxhmc: RELAXHMC_SEED must be a non-negative integer, got '"
                  << env << "'\n";
        return 1;
      }
    }
  }
  if (sub.count("--out")) cfg.output_dir = f.out_dir;
  if (sub.count("--iterations")) cfg.n_iterations = f.iterations;
  if (sub.count("--burnin")) cfg.n_burnin = f.burnin;
  if (sub.count("--thin")) cfg.thin = f.thin;
  if (sub.count("--replicates")) cfg.replicates = f.replicates;
  if (sub.count("--n")) cfg.n_obs = f.n_obs;
  if (sub.count("--step-size")) cfg.step_size = f.step_size;
  if (sub.count("--leapfrog")) {
    cfg.n_leapfrog = f.leapfrog;
    cfg.leapfrog_per_lambda.reset();
  }
  if (sub.count("--grid")) cfg.quad_grid = f.grid;
  if (sub.count("--iterations") || sub.count("--burnin")) {
    // Command-line budgets replace any per-lambda schedule from the file.
    cfg.iterations_per_lambda.reset();
    cfg.burnin_per_lambda.reset();
  }
  if (sub.count("--step-size")) cfg.step_size_per_lambda.reset();

  try {
    const ExperimentResult result = run_experiment(cfg);
    write_result_files(result);
    print_report(result);
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "relaxhmc: invalid configuration: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "relaxhmc: " << e.what() << "\n";
    return 1;
  }
}

int do_validate(const std::string& path) {
  const auto text = read_file(path);
  if (!text) {
    std::cerr << "relaxhmc: cannot read " << path << "\n";
    return 1;
  }
  std::vector<std::string> errs;
  auto parsed = config_from_json(*text, errs);
  if (parsed) {
    try {
      std::cout << config_to_json(resolve_config(*parsed));
      return 0;
    } catch (const std::invalid_argument& e) {
      errs.push_back(e.what());
    }
  }
  for (const auto& e : errs) std::cerr << path << ": " << e << "\n";
  return 1;
}

int do_list() {
  for (Experiment e : experiment_catalog()) {
    std::string lams;
    // Echo the default grid so users can see what run executes bare.
    ExperimentConfig cfg;
    cfg.experiment = e;
    const std::vector<double> grid = *resolve_config(cfg).lambda_grid;
    for (double v : grid) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%s%g", lams.empty() ? "" : ",", v);
      lams += buf;
    }
    std::printf("%-24s %s\n%-24s   default lambda: %s\n", experiment_name(e).c_str(),
                experiment_blurb(e).c_str(), "", lams.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relaxhmc: HMC sampling from constraint-relaxed posteriors"};
  app.require_subcommand(1);
  app.footer(kCsvDoc);

  RunFlags f;
  CLI::App* run = app.add_subcommand("run", "Run a named experiment and write its outputs");
  run->add_option("experiment", f.experiment, "Experiment name (see 'relaxhmc list')")
      ->required();
  run->add_option("--config", f.config_path, "JSON config file");
  run->add_option("--lambda", f.lambda_csv,
                  "Comma-separated relaxation levels, strictly decreasing");
  run->add_option("--seed", f.seed, "Base RNG seed; replicate k uses seed+k");
  run->add_option("--out", f.out_dir, "Output directory (default: current directory)");
  run->add_option("--iterations", f.iterations, "HMC iterations per chain, incl. burn-in");
  run->add_option("--burnin", f.burnin, "Warmup iterations (adapted, not stored)");
  run->add_option("--thin", f.thin, "Store every thin-th post-burn-in draw");
  run->add_option("--replicates", f.replicates, "Independent chains per lambda");
  run->add_option("--n", f.n_obs, "Observation count (gaussian-inequality family)");
  run->add_option("--step-size", f.step_size, "Leapfrog step size (fixed for all lambda)");
  run->add_option("--leapfrog", f.leapfrog, "Leapfrog steps per proposal");
  run->add_option("--grid", f.grid, "Quadrature oracle grid resolution");

  std::string validate_path;
  CLI::App* validate = app.add_subcommand(
      "validate", "Parse and resolve a config file without running anything");
  validate->add_option("file", validate_path, "JSON config file")->required();

  CLI::App* list = app.add_subcommand("list", "List available experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (*run) return do_run(*run, f);
  if (*validate) return do_validate(validate_path);
  if (*list) return do_list();
  return 1;
}
