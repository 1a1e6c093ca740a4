#pragma once

#include "relaxhmc/diagnostics.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace relaxhmc {

enum class Experiment {
  GaussianInequality,
  CircleBenchmark,
  SphereGaussian,
  SphereT,
  Torus,
  Simplex,
  FactorNetwork,
  RateZeroMeasure,
  RatePositiveMeasure,
};

// CLI spelling, e.g. "circle-benchmark".
std::string experiment_name(Experiment e);
std::optional<Experiment> experiment_from_name(const std::string& name);
const std::vector<Experiment>& experiment_catalog();
std::string experiment_blurb(Experiment e);

// Runner configuration. Unset fields take per-experiment defaults at resolve
// time; a resolved config has every field set and replays bit-exactly.
struct ExperimentConfig {
  Experiment experiment = Experiment::GaussianInequality;
  std::optional<std::vector<double>> lambda_grid;  // positive, strictly decreasing
  std::optional<int> replicates;                   // >= 1
  std::optional<std::uint64_t> seed;               // replicate k runs with seed + k
  std::string output_dir = ".";
  std::optional<int> n_obs;      // gaussian-inequality observation count
  std::optional<int> quad_grid;  // oracle grid override

  // HmcConfig overrides; iterations/burnin/step size may also be set per
  // lambda (resolution always pins the per-lambda arrays).
  std::optional<double> step_size;
  std::optional<std::vector<double>> step_size_per_lambda;
  std::optional<int> n_leapfrog;
  std::optional<std::vector<int>> leapfrog_per_lambda;
  std::optional<double> integration_time;
  std::optional<int> n_iterations;
  std::optional<int> n_burnin;
  std::optional<int> thin;
  std::optional<bool> adapt_step_size;
  std::optional<bool> adapt_mass;
  std::optional<double> target_accept;
  std::optional<std::vector<int>> iterations_per_lambda;
  std::optional<std::vector<int>> burnin_per_lambda;
};

// All invariant violations, empty when the config is usable. Messages are
// prefixed with the offending field name.
std::vector<std::string> validate_config(const ExperimentConfig& config);

// Copy with every optional filled from the experiment's defaults.
// Throws std::invalid_argument joining validate_config messages.
ExperimentConfig resolve_config(const ExperimentConfig& config);

// Parse a JSON config. Syntax problems are reported as "line N: ...",
// semantic ones by field name; returns nullopt iff errors is non-empty.
// A missing "experiment" key is an error unless a fallback is supplied
// (the run subcommand passes its positional argument).
std::optional<ExperimentConfig> config_from_json(
    const std::string& text, std::vector<std::string>& errors,
    std::optional<Experiment> fallback = std::nullopt);
std::string config_to_json(const ExperimentConfig& config);

struct LambdaStats {
  double lambda = 0.0;
  int n_iterations = 0;  // per replicate, incl. burn-in
  int n_burnin = 0;
  int n_kept = 0;  // stored draws per replicate
  double accept_rate = 0.0;
  double step_size = 0.0;
  int n_leapfrog = 0;
  int n_divergent = 0;
  int n_out_of_support = 0;
  Vector ess_per_component;    // replicate means
  Vector mean_per_component;   // replicate means
  double ess_per_1000 = 0.0;   // estimand series, per 1000 kept iterations
  ViolationSummary violation;  // pooled over replicates
  std::optional<OracleResult> sharp_oracle;
  std::optional<OracleResult> relaxed_oracle;
  std::optional<double> diff_mean, diff_lo, diff_hi;  // |chain mean - sharp|
  std::vector<double> diff_per_replicate;
  std::optional<double> quad_diff;        // |sharp - relaxed| oracle gap
  std::optional<double> tail_fraction;    // experiment-specific threshold
  std::optional<double> chi2_statistic;   // torus alpha_2 uniformity
  std::optional<double> u_orthogonality;  // mean l1 norm of U'U - I
  std::optional<double> auc;              // factor-network in-sample AUC
};

// Pearson chi-square test constants for the torus angular marginal.
inline constexpr int kChi2Bins = 20;
inline constexpr double kChi2Critical1pct = 36.19086912927005;  // df 19

struct ExperimentResult {
  ExperimentConfig config;  // resolved
  std::string model;
  std::string estimand;  // human-readable g
  int dim = 0;           // theta dimension r
  std::optional<double> tail_threshold;
  std::vector<LambdaStats> per_lambda;
  std::vector<std::vector<Chain>> chains;  // [lambda][replicate]; empty for rate fits
  std::optional<RateFit> rate_fit;
  // Exact-vs-exact sampling baseline (circle benchmark only).
  std::optional<double> baseline_mean, baseline_lo, baseline_hi;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

// Schema-stable summary document; every key is present for every experiment.
std::string summary_to_json(const ExperimentResult& result);

// samples.csv, summary.json, config_resolved.json and the per-experiment
// plot CSV under config.output_dir (created if missing).
void write_result_files(const ExperimentResult& result);

}  // namespace relaxhmc
