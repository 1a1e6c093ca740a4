#include "relaxhmc/experiments.hpp"

#include "relaxhmc/errors.hpp"

#include <Eigen/Geometry>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace relaxhmc {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kPi = 3.14159265358979323846;

// Synthetic network data is part of the experiment definition, not of the
// sampling seed, so repeated runs fit the same dataset.
constexpr std::uint64_t kFactorDataSeed = 1;

struct ExperimentInfo {
  Experiment id;
  const char* name;
  const char* blurb;
};

constexpr ExperimentInfo kInfo[] = {
    {Experiment::GaussianInequality, "gaussian-inequality",
     "Gaussian mean with relaxed inequality theta <= 1; density curves, oracle diffs"},
    {Experiment::CircleBenchmark, "circle-benchmark",
     "von Mises circle benchmark: per-lambda ESS, violations, expectation diffs"},
    {Experiment::SphereGaussian, "sphere-gaussian",
     "Gaussian parent on the unit sphere; sectional sample cloud, tail mass"},
    {Experiment::SphereT, "sphere-t",
     "t3 parent on the unit sphere; heavier tails than the Gaussian parent"},
    {Experiment::Torus, "torus",
     "uniform law on the curved torus (Jacobian factor on); point cloud, angular test"},
    {Experiment::Simplex, "simplex",
     "Dirichlet kernel on the probability simplex; oracle moment checks"},
    {Experiment::FactorNetwork, "factor-network",
     "synthetic Bernoulli-logit network factor model, Stiefel-relaxed loadings"},
    {Experiment::RateZeroMeasure, "rate-zero-measure",
     "quadrature convergence rate on the circle (measure-zero constraint)"},
    {Experiment::RatePositiveMeasure, "rate-positive-measure",
     "quadrature convergence rate for the Gaussian inequality (positive measure)"},
};

struct Defaults {
  std::vector<double> lambdas;
  int replicates = 1;
  int n_iterations = 2000;
  int n_burnin = 1000;
  int n_leapfrog = 50;
  bool adapt_mass = false;
  int quad_grid = 512;
  double target_accept = 0.65;
  int thin = 1;
  // Optional explicit schedules; must match lambdas in length. Empty means
  // constant fill (iterations, burn-in) or the scaled_leapfrog rule.
  std::vector<int> iterations_schedule, burnin_schedule, leapfrog_schedule;
};

// n_leapfrog is the base length at the first (largest) lambda of the grid;
// resolution scales it per lambda, see scaled_leapfrog. The 0.65 acceptance
// target sits near the effective-travel optimum for the kink-limited step
// size of the Laplace kernel (acceptance falls off steeply above it).
Defaults experiment_defaults(Experiment e) {
  switch (e) {
    case Experiment::GaussianInequality:
      return {{1e-1, 3e-2, 1e-2}, 1, 6000, 2000, 30, false, 512, 0.65, 1, {}, {}, {}};
    // Chains start at exact von Mises draws, so burn-in only has to settle
    // dual averaging; the budget shifts toward the small-lambda legs where
    // the kink-limited step size forces long trajectories.
    case Experiment::CircleBenchmark:
      return {{1e-3, 1e-4, 1e-5}, 10, 7000, 2000, 800, false, 512, 0.65, 1,
              {6500, 5800, 5500}, {1500, 800, 500}, {800, 6000, 35000}};
    case Experiment::SphereGaussian:
    case Experiment::SphereT:
      return {{1e-3}, 1, 15000, 3000, 4000, false, 128, 0.65, 1, {}, {}, {}};
    // The angular uniformity test at n = 10^4 needs near-iid alpha_2 draws.
    // Thinning collapses rejection repeats (which the chi-square statistic
    // counts as duplicates) and triples the travel between kept draws.
    case Experiment::Torus:
      return {{1e-1, 1e-2, 1e-3}, 1, 32500, 2500, 350, false, 128, 0.65, 3, {}, {}, {}};
    case Experiment::Simplex:
      return {{1e-2, 1e-3}, 1, 6000, 2000, 500, false, 256, 0.65, 1, {}, {}, {}};
    case Experiment::FactorNetwork:
      return {{1e-3}, 1, 40000, 15000, 300, true, 512, 0.6, 1, {}, {}, {}};
    case Experiment::RateZeroMeasure:
      return {{1e-2, 3e-3, 1e-3, 3e-4, 1e-4}, 1, 2000, 1000, 50, false, 512, 0.65, 1, {}, {}, {}};
    case Experiment::RatePositiveMeasure:
      return {{1e-1, 3e-2, 1e-2, 3e-3, 1e-3}, 1, 2000, 1000, 50, false, 512, 0.65, 1, {}, {}, {}};
  }
  throw std::invalid_argument("experiment_defaults: unknown experiment");
}

bool is_rate(Experiment e) {
  return e == Experiment::RateZeroMeasure || e == Experiment::RatePositiveMeasure;
}

bool uses_n_obs(Experiment e) {
  return e == Experiment::GaussianInequality || e == Experiment::RatePositiveMeasure;
}

// The relaxation gradient has magnitude w |grad nu| / lambda, so the momentum
// kick per leapfrog step stays O(1) only for eps of order lambda. Start a
// quarter under that; dual averaging settles the rest during warmup.
double auto_step_size(double lambda) { return std::min(0.1, 0.25 * lambda); }

// With eps of order lambda, fixed-length trajectories travel ~ eps L and
// mixing dies as lambda -> 0. Growing L like lambda^{-3/4} keeps the travel
// shrinking only like lambda^{1/4}: chains stay usable at small lambda while
// ESS still decreases monotonically along the grid.
int scaled_leapfrog(int base, double lambda0, double lambda) {
  const double L = base * std::pow(lambda0 / lambda, 0.75);
  return static_cast<int>(std::clamp(std::lround(L), 1l, 100000l));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Per-experiment plan: model, estimand, oracles, extras
// ---------------------------------------------------------------------------

struct Plan {
  ModelSpec model;
  ScalarFn g;
  std::string estimand;
  std::function<OracleResult(const RelaxedTarget&, int)> sharp;  // may be empty
  bool relaxed_oracle = true;
  std::optional<double> tail_threshold;
  std::function<double(const Vector&, double)> tail_metric;  // (theta, distance)
  bool chi2 = false;
  bool factor_metrics = false;
  bool baseline = false;
  bool exact_init = false;  // start replicates at exact circle draws
  int rate_s = 1;
};

OracleResult analytic(double value) { return {value, 0.0, OracleMethod::Analytic}; }

Plan make_plan(const ExperimentConfig& cfg) {
  Plan p;
  switch (cfg.experiment) {
    case Experiment::GaussianInequality:
    case Experiment::RatePositiveMeasure: {
      GaussianInequalitySpec spec;
      spec.n = cfg.n_obs.value_or(spec.n);
      p.model = spec;
      p.g = [](const Vector& th) { return th[0]; };
      p.estimand = "theta[0]";
      const double post_var = 1.0 / (1.0 / 1000.0 + spec.n);
      const double post_mean = spec.ybar * spec.n * post_var;
      p.sharp = [post_mean, post_var](const RelaxedTarget&, int) {
        return analytic(truncated_normal_moments(post_mean, post_var, 1.0).mean);
      };
      break;
    }
    case Experiment::CircleBenchmark:
    case Experiment::RateZeroMeasure: {
      SphereGaussianSpec spec;
      spec.F = (Vector(2) << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)).finished();
      // The wide box keeps the rate study clear of the box/circle tangency,
      // which contributes its own O(sqrt(lambda)) truncation term.
      if (cfg.experiment == Experiment::RateZeroMeasure) spec.box_halfwidth = 2.0;
      p.model = spec;
      p.g = [](const Vector& th) { return th.sum(); };
      p.estimand = "sum(theta)";
      const double kappa = 1.0 / spec.sigma2;
      const double mean_sum = bessel_i1_over_i0(kappa) * spec.F.sum();
      p.sharp = [mean_sum](const RelaxedTarget&, int) { return analytic(mean_sum); };
      p.baseline = cfg.experiment == Experiment::CircleBenchmark;
      p.exact_init = p.baseline;
      break;
    }
    case Experiment::SphereGaussian:
    case Experiment::SphereT: {
      const Vector F = Vector::Constant(3, 1.0 / std::sqrt(3.0));
      if (cfg.experiment == Experiment::SphereGaussian) {
        SphereGaussianSpec spec;
        spec.F = F;
        p.model = spec;
        const double kappa = 1.0 / spec.sigma2;
        const double mean_dot = 1.0 / std::tanh(kappa) - 1.0 / kappa;
        p.sharp = [mean_dot](const RelaxedTarget&, int) { return analytic(mean_dot); };
      } else {
        SphereTSpec spec;
        spec.F = F;
        p.model = spec;
        p.sharp = [](const RelaxedTarget& t, int grid) {
          ScalarFn g = [](const Vector& th) {
            return th.dot(Vector::Constant(3, 1.0 / std::sqrt(3.0)));
          };
          return sharp_expectation_quadrature(t, g, grid);
        };
      }
      p.g = [F](const Vector& th) { return th.dot(F); };
      p.estimand = "dot(theta, F)";
      p.tail_threshold = 1.0;  // radians from F
      p.tail_metric = [F](const Vector& th, double) {
        const double c = th.dot(F) / std::max(th.norm(), 1e-300);
        return std::acos(std::clamp(c, -1.0, 1.0));
      };
      break;
    }
    case Experiment::Torus: {
      p.model = TorusUniformSpec{};
      p.g = [](const Vector& th) {
        return (std::sqrt(th[0] * th[0] + th[1] * th[1]) - 1.0) / 0.5;
      };
      p.estimand = "cos(alpha1)";
      p.sharp = [](const RelaxedTarget&, int) { return analytic(0.25); };
      p.tail_threshold = 0.05;  // constraint distance
      p.tail_metric = [](const Vector&, double dist) { return dist; };
      p.chi2 = true;
      break;
    }
    case Experiment::Simplex: {
      SimplexToySpec spec;
      spec.alpha = (Vector(3) << 2.0, 1.0, 1.0).finished();
      p.model = spec;
      p.g = [](const Vector& th) { return th[0]; };
      p.estimand = "theta[0]";
      const double mean0 = spec.alpha[0] / spec.alpha.sum();
      p.sharp = [mean0](const RelaxedTarget&, int) { return analytic(mean0); };
      break;
    }
    case Experiment::FactorNetwork: {
      FactorNetworkSpec spec;
      spec.data = generate_factor_network_data(5, 10, 3, kFactorDataSeed);
      const int uoff = spec.u_offset();
      const int R = spec.data.R, d = spec.d;
      p.model = spec;
      p.g = [uoff, R, d](const Vector& th) {
        Eigen::Map<const Matrix> U(th.data() + uoff, R, d);
        return (U.transpose() * U - Matrix::Identity(d, d)).cwiseAbs().sum();
      };
      p.estimand = "l1(U'U - I)";
      p.relaxed_oracle = false;
      p.factor_metrics = true;
      break;
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Aggregation helpers
// ---------------------------------------------------------------------------

double series_mean(const Vector& v) { return v.size() ? v.mean() : 0.0; }

Vector chain_fn_series(const Chain& chain, const ScalarFn& g) {
  const int n = static_cast<int>(chain.samples.rows());
  Vector out(n);
  for (int i = 0; i < n; ++i) out[i] = g(chain.samples.row(i).transpose());
  return out;
}

double chi_square_uniform_angle(const std::vector<Chain>& chains) {
  std::vector<long> counts(kChi2Bins, 0);
  long total = 0;
  for (const Chain& c : chains) {
    for (int i = 0; i < c.samples.rows(); ++i) {
      const double a = std::atan2(c.samples(i, 1), c.samples(i, 0));
      int b = static_cast<int>((a + kPi) / (2.0 * kPi) * kChi2Bins);
      b = std::clamp(b, 0, kChi2Bins - 1);
      ++counts[b];
      ++total;
    }
  }
  const double expected = static_cast<double>(total) / kChi2Bins;
  double stat = 0.0;
  for (long c : counts) stat += (c - expected) * (c - expected) / expected;
  return stat;
}

// Mann-Whitney AUC with average ranks for ties.
double auc_score(const std::vector<double>& scores, const std::vector<int>& labels) {
  const int n = static_cast<int>(scores.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return scores[a] < scores[b]; });
  std::vector<double> rank(n);
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double r = 0.5 * (i + j) + 1.0;
    for (int k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  double pos_rank_sum = 0.0;
  long n_pos = 0;
  for (int k = 0; k < n; ++k) {
    if (labels[k]) {
      pos_rank_sum += rank[k];
      ++n_pos;
    }
  }
  const long n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw InsufficientDataError("auc_score: need both positive and negative labels");
  return (pos_rank_sum - 0.5 * n_pos * (n_pos + 1.0)) / (static_cast<double>(n_pos) * n_neg);
}

void factor_network_metrics(const FactorNetworkSpec& spec, const std::vector<Chain>& chains,
                            const ScalarFn& orth, LambdaStats& st) {
  const int n = spec.data.n, R = spec.data.R, d = spec.d;
  double orth_sum = 0.0;
  long n_draws = 0;
  std::vector<double> prob(static_cast<size_t>(n) * R * R, 0.0);
  for (const Chain& c : chains) {
    for (int it = 0; it < c.samples.rows(); ++it) {
      const Vector th = c.samples.row(it).transpose();
      orth_sum += orth(th);
      ++n_draws;
      Eigen::Map<const Matrix> V(th.data() + spec.mu_count(), n, d);
      Eigen::Map<const Matrix> U(th.data() + spec.u_offset(), R, d);
      int mu_idx = 0;
      for (int k = 0; k < R; ++k) {
        for (int l = k + 1; l < R; ++l, ++mu_idx) {
          for (int i = 0; i < n; ++i) {
            double psi = th[mu_idx];
            for (int s = 0; s < d; ++s) psi += V(i, s) * U(k, s) * U(l, s);
            prob[(static_cast<size_t>(i) * R + k) * R + l] += 1.0 / (1.0 + std::exp(-psi));
          }
        }
      }
    }
  }
  st.u_orthogonality = orth_sum / n_draws;
  std::vector<double> scores;
  std::vector<int> labels;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < R; ++k) {
      for (int l = k + 1; l < R; ++l) {
        scores.push_back(prob[(static_cast<size_t>(i) * R + k) * R + l] / n_draws);
        labels.push_back(spec.data.adjacency[i](k, l) > 0.5 ? 1 : 0);
      }
    }
  }
  st.auc = auc_score(scores, labels);
}

}  // namespace

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

std::string experiment_name(Experiment e) {
  for (const auto& info : kInfo)
    if (info.id == e) return info.name;
  throw std::invalid_argument("experiment_name: unknown experiment");
}

std::optional<Experiment> experiment_from_name(const std::string& name) {
  for (const auto& info : kInfo)
    if (name == info.name) return info.id;
  return std::nullopt;
}

const std::vector<Experiment>& experiment_catalog() {
  static const std::vector<Experiment> all = [] {
    std::vector<Experiment> v;
    for (const auto& info : kInfo) v.push_back(info.id);
    return v;
  }();
  return all;
}

std::string experiment_blurb(Experiment e) {
  for (const auto& info : kInfo)
    if (info.id == e) return info.blurb;
  throw std::invalid_argument("experiment_blurb: unknown experiment");
}

// ---------------------------------------------------------------------------
// Config validation / resolution / JSON
// ---------------------------------------------------------------------------

std::vector<std::string> validate_config(const ExperimentConfig& c) {
  std::vector<std::string> errs;
  const size_t n_lambda =
      c.lambda_grid ? c.lambda_grid->size() : experiment_defaults(c.experiment).lambdas.size();

  if (c.lambda_grid) {
    const auto& l = *c.lambda_grid;
    if (l.empty()) errs.push_back("lambda_grid: must not be empty");
    for (double v : l)
      if (!(v > 0.0) || !std::isfinite(v)) {
        errs.push_back("lambda_grid: entries must be positive and finite");
        break;
      }
    for (size_t i = 1; i < l.size(); ++i)
      if (!(l[i] < l[i - 1])) {
        errs.push_back("lambda_grid must be strictly decreasing");
        break;
      }
  }
  if (c.replicates && *c.replicates < 1) errs.push_back("replicates: must be at least 1");
  if (c.n_obs && *c.n_obs < 0) errs.push_back("n_obs: must be non-negative");
  if (c.quad_grid && *c.quad_grid < 64) errs.push_back("quad_grid: must be at least 64");
  if (c.output_dir.empty()) errs.push_back("output_dir: must not be empty");
  if (c.step_size && !(*c.step_size > 0.0)) errs.push_back("step_size: must be positive");
  if (c.step_size_per_lambda) {
    if (c.step_size_per_lambda->size() != n_lambda)
      errs.push_back("step_size_per_lambda: length must match lambda_grid");
    for (double v : *c.step_size_per_lambda)
      if (!(v > 0.0)) {
        errs.push_back("step_size_per_lambda: entries must be positive");
        break;
      }
  }
  if (c.n_leapfrog && *c.n_leapfrog < 1) errs.push_back("n_leapfrog: must be at least 1");
  if (c.integration_time && !(*c.integration_time > 0.0))
    errs.push_back("integration_time: must be positive");
  if (c.n_iterations && *c.n_iterations < 1) errs.push_back("n_iterations: must be at least 1");
  if (c.n_burnin && *c.n_burnin < 0) errs.push_back("n_burnin: must be non-negative");
  if (c.thin && *c.thin < 1) errs.push_back("thin: must be at least 1");
  if (c.target_accept && !(*c.target_accept > 0.0 && *c.target_accept < 1.0))
    errs.push_back("target_accept: must lie in (0, 1)");

  auto check_schedule = [&](const std::optional<std::vector<int>>& v, const char* key,
                            int minimum) {
    if (!v) return;
    if (v->size() != n_lambda)
      errs.push_back(std::string(key) + ": length must match lambda_grid");
    for (int x : *v)
      if (x < minimum) {
        errs.push_back(std::string(key) + ": entries must be at least " +
                       std::to_string(minimum));
        break;
      }
  };
  check_schedule(c.iterations_per_lambda, "iterations_per_lambda", 1);
  check_schedule(c.burnin_per_lambda, "burnin_per_lambda", 0);
  check_schedule(c.leapfrog_per_lambda, "leapfrog_per_lambda", 1);

  if (!is_rate(c.experiment)) {
    const int thin = c.thin.value_or(1);
    const Defaults d = experiment_defaults(c.experiment);
    for (size_t i = 0; i < n_lambda; ++i) {
      const int iters = c.iterations_per_lambda
                            ? (i < c.iterations_per_lambda->size() ? (*c.iterations_per_lambda)[i] : 0)
                            : c.n_iterations.value_or(d.n_iterations);
      const int burn = c.burnin_per_lambda
                           ? (i < c.burnin_per_lambda->size() ? (*c.burnin_per_lambda)[i] : 0)
                           : c.n_burnin.value_or(d.n_burnin);
      if (burn >= iters) {
        errs.push_back("n_burnin: must be smaller than n_iterations");
        break;
      }
      if ((iters - burn + thin - 1) / thin < 10) {
        errs.push_back("n_iterations: need at least 10 kept draws per chain");
        break;
      }
    }
  }
  return errs;
}

ExperimentConfig resolve_config(const ExperimentConfig& c) {
  auto errs = validate_config(c);
  if (!errs.empty()) {
    std::string joined;
    for (const auto& e : errs) joined += (joined.empty() ? "" : "; ") + e;
    throw std::invalid_argument(joined);
  }
  ExperimentConfig r = c;
  const Defaults d = experiment_defaults(c.experiment);
  if (!r.lambda_grid) r.lambda_grid = d.lambdas;
  if (!r.replicates) r.replicates = d.replicates;
  if (!r.seed) r.seed = 0;
  if (!r.quad_grid) r.quad_grid = d.quad_grid;
  if (!r.n_obs && uses_n_obs(c.experiment)) r.n_obs = GaussianInequalitySpec{}.n;
  if (!r.n_leapfrog) r.n_leapfrog = d.n_leapfrog;
  if (!r.n_iterations) r.n_iterations = d.n_iterations;
  if (!r.n_burnin) r.n_burnin = d.n_burnin;
  if (!r.thin) r.thin = d.thin;
  if (!r.adapt_step_size) r.adapt_step_size = true;
  if (!r.adapt_mass) r.adapt_mass = d.adapt_mass;
  if (!r.target_accept) r.target_accept = d.target_accept;
  const size_t nl = r.lambda_grid->size();
  if (!r.iterations_per_lambda) {
    r.iterations_per_lambda =
        !c.n_iterations && d.iterations_schedule.size() == nl
            ? d.iterations_schedule
            : std::vector<int>(nl, *r.n_iterations);
  }
  if (!r.burnin_per_lambda) {
    r.burnin_per_lambda = !c.n_burnin && d.burnin_schedule.size() == nl
                              ? d.burnin_schedule
                              : std::vector<int>(nl, *r.n_burnin);
  }
  if (!r.step_size_per_lambda) {
    std::vector<double> eps(nl);
    for (size_t i = 0; i < nl; ++i)
      eps[i] = r.step_size ? *r.step_size : auto_step_size((*r.lambda_grid)[i]);
    r.step_size_per_lambda = eps;
  }
  if (!r.leapfrog_per_lambda) {
    if (!c.n_leapfrog && d.leapfrog_schedule.size() == nl) {
      r.leapfrog_per_lambda = d.leapfrog_schedule;
    } else {
      std::vector<int> lf(nl);
      const bool fixed = c.n_leapfrog.has_value();
      for (size_t i = 0; i < nl; ++i)
        lf[i] = fixed ? *r.n_leapfrog
                      : scaled_leapfrog(*r.n_leapfrog, r.lambda_grid->front(),
                                        (*r.lambda_grid)[i]);
      r.leapfrog_per_lambda = lf;
    }
  }
  errs = validate_config(r);
  if (!errs.empty()) {
    std::string joined;
    for (const auto& e : errs) joined += (joined.empty() ? "" : "; ") + e;
    throw std::invalid_argument(joined);
  }
  return r;
}

namespace {

int line_of_byte(const std::string& text, size_t byte) {
  int line = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

template <typename T>
bool read_field(const ordered_json& v, const char* key, const char* expected,
                std::optional<T>& out, std::vector<std::string>& errs) {
  if (v.is_null()) return true;
  try {
    out = v.get<T>();
    return true;
  } catch (const nlohmann::json::exception&) {
    errs.push_back(std::string(key) + ": expected " + expected);
    return false;
  }
}

void parse_hmc_block(const ordered_json& block, ExperimentConfig& c,
                     std::vector<std::string>& errs) {
  if (!block.is_object()) {
    errs.push_back("hmc: expected an object");
    return;
  }
  for (const auto& [key, val] : block.items()) {
    if (key == "step_size")
      read_field(val, "hmc.step_size", "a number", c.step_size, errs);
    else if (key == "step_size_per_lambda")
      read_field(val, "hmc.step_size_per_lambda", "an array of numbers",
                 c.step_size_per_lambda, errs);
    else if (key == "n_leapfrog")
      read_field(val, "hmc.n_leapfrog", "an integer", c.n_leapfrog, errs);
    else if (key == "leapfrog_per_lambda")
      read_field(val, "hmc.leapfrog_per_lambda", "an array of integers",
                 c.leapfrog_per_lambda, errs);
    else if (key == "integration_time")
      read_field(val, "hmc.integration_time", "a number", c.integration_time, errs);
    else if (key == "n_iterations")
      read_field(val, "hmc.n_iterations", "an integer", c.n_iterations, errs);
    else if (key == "n_burnin")
      read_field(val, "hmc.n_burnin", "an integer", c.n_burnin, errs);
    else if (key == "thin")
      read_field(val, "hmc.thin", "an integer", c.thin, errs);
    else if (key == "adapt_step_size")
      read_field(val, "hmc.adapt_step_size", "a boolean", c.adapt_step_size, errs);
    else if (key == "adapt_mass")
      read_field(val, "hmc.adapt_mass", "a boolean", c.adapt_mass, errs);
    else if (key == "target_accept")
      read_field(val, "hmc.target_accept", "a number", c.target_accept, errs);
    else if (key == "iterations_per_lambda")
      read_field(val, "hmc.iterations_per_lambda", "an array of integers",
                 c.iterations_per_lambda, errs);
    else if (key == "burnin_per_lambda")
      read_field(val, "hmc.burnin_per_lambda", "an array of integers",
                 c.burnin_per_lambda, errs);
    else
      errs.push_back("hmc." + key + ": unknown key");
  }
}

}  // namespace

std::optional<ExperimentConfig> config_from_json(const std::string& text,
                                                 std::vector<std::string>& errors,
                                                 std::optional<Experiment> fallback) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    errors.push_back("line " + std::to_string(line_of_byte(text, e.byte)) + ": " +
                     e.what());
    return std::nullopt;
  }
  if (!doc.is_object()) {
    errors.push_back("top level: expected a JSON object");
    return std::nullopt;
  }
  ExperimentConfig c;
  bool have_experiment = false;
  if (fallback) {
    c.experiment = *fallback;
    have_experiment = true;
  }
  for (const auto& [key, val] : doc.items()) {
    if (key == "experiment") {
      std::optional<std::string> name;
      if (read_field(val, "experiment", "a string", name, errors) && name) {
        auto e = experiment_from_name(*name);
        if (!e)
          errors.push_back("experiment: unknown experiment '" + *name + "'");
        else {
          c.experiment = *e;
          have_experiment = true;
        }
      }
    } else if (key == "lambda_grid") {
      read_field(val, "lambda_grid", "an array of numbers", c.lambda_grid, errors);
    } else if (key == "replicates") {
      read_field(val, "replicates", "an integer", c.replicates, errors);
    } else if (key == "seed") {
      read_field(val, "seed", "a non-negative integer", c.seed, errors);
    } else if (key == "output_dir") {
      std::optional<std::string> dir;
      if (read_field(val, "output_dir", "a string", dir, errors) && dir)
        c.output_dir = *dir;
    } else if (key == "n" || key == "n_obs") {
      read_field(val, "n_obs", "an integer", c.n_obs, errors);
    } else if (key == "quad_grid") {
      read_field(val, "quad_grid", "an integer", c.quad_grid, errors);
    } else if (key == "hmc") {
      parse_hmc_block(val, c, errors);
    } else {
      errors.push_back(key + ": unknown key");
    }
  }
  if (!have_experiment) errors.push_back("experiment: required");
  for (const auto& e : validate_config(c)) errors.push_back(e);
  if (!errors.empty()) return std::nullopt;
  return c;
}

namespace {

template <typename T>
ordered_json opt_json(const std::optional<T>& v) {
  if (!v) return nullptr;
  return *v;
}

}  // namespace

std::string config_to_json(const ExperimentConfig& c) {
  ordered_json j;
  j["experiment"] = experiment_name(c.experiment);
  j["lambda_grid"] = opt_json(c.lambda_grid);
  j["replicates"] = opt_json(c.replicates);
  j["seed"] = opt_json(c.seed);
  j["output_dir"] = c.output_dir;
  j["n_obs"] = opt_json(c.n_obs);
  j["quad_grid"] = opt_json(c.quad_grid);
  ordered_json h;
  h["step_size"] = opt_json(c.step_size);
  h["step_size_per_lambda"] = opt_json(c.step_size_per_lambda);
  h["n_leapfrog"] = opt_json(c.n_leapfrog);
  h["leapfrog_per_lambda"] = opt_json(c.leapfrog_per_lambda);
  h["integration_time"] = opt_json(c.integration_time);
  h["n_iterations"] = opt_json(c.n_iterations);
  h["n_burnin"] = opt_json(c.n_burnin);
  h["thin"] = opt_json(c.thin);
  h["adapt_step_size"] = opt_json(c.adapt_step_size);
  h["adapt_mass"] = opt_json(c.adapt_mass);
  h["target_accept"] = opt_json(c.target_accept);
  h["iterations_per_lambda"] = opt_json(c.iterations_per_lambda);
  h["burnin_per_lambda"] = opt_json(c.burnin_per_lambda);
  j["hmc"] = h;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

ExperimentResult run_experiment(const ExperimentConfig& raw) {
  const ExperimentConfig cfg = resolve_config(raw);
  const Plan plan = make_plan(cfg);

  ExperimentResult res;
  res.config = cfg;
  res.model = model_name(plan.model);
  res.estimand = plan.estimand;
  res.tail_threshold = plan.tail_threshold;

  const auto& lambdas = *cfg.lambda_grid;
  const int reps = *cfg.replicates;
  const bool rate = is_rate(cfg.experiment);

  for (size_t li = 0; li < lambdas.size(); ++li) {
    const double lam = lambdas[li];
    const RelaxedTarget target = make_model(plan.model, Vector::Constant(1, lam));
    res.dim = target.dim();

    LambdaStats st;
    st.lambda = lam;

    if (plan.sharp) {
      try {
        st.sharp_oracle = plan.sharp(target, *cfg.quad_grid);
      } catch (const UnsupportedOracleError&) {
      }
    }
    if (plan.relaxed_oracle) {
      try {
        st.relaxed_oracle = relaxed_expectation_quadrature(target, plan.g, *cfg.quad_grid);
      } catch (const UnsupportedOracleError&) {
      }
    }
    if (st.sharp_oracle && st.relaxed_oracle)
      st.quad_diff = std::abs(st.sharp_oracle->value - st.relaxed_oracle->value);

    std::vector<Chain> chains;
    if (!rate) {
      HmcConfig hc;
      hc.step_size = (*cfg.step_size_per_lambda)[li];
      hc.n_leapfrog = (*cfg.leapfrog_per_lambda)[li];
      hc.integration_time = cfg.integration_time;
      hc.n_iterations = (*cfg.iterations_per_lambda)[li];
      hc.n_burnin = (*cfg.burnin_per_lambda)[li];
      hc.adapt_step_size = *cfg.adapt_step_size;
      hc.adapt_mass = *cfg.adapt_mass;
      hc.target_accept = *cfg.target_accept;
      hc.thin = *cfg.thin;

      std::vector<std::future<Chain>> futs;
      futs.reserve(reps);
      for (int k = 0; k < reps; ++k) {
        HmcConfig hk = hc;
        hk.seed = *cfg.seed + static_cast<std::uint64_t>(k);
        if (plan.exact_init) {
          const auto& spec = std::get<SphereGaussianSpec>(plan.model);
          const Matrix pt = vmf_circle_sample(
              spec.F, spec.sigma2, 1,
              *cfg.seed + 7919 * static_cast<std::uint64_t>(k + 1));
          hk.init = pt.row(0).transpose();
        }
        futs.push_back(std::async(std::launch::async,
                                  [&target, hk] { return sample(target, hk); }));
      }
      chains.reserve(reps);
      for (auto& f : futs) chains.push_back(f.get());

      st.n_iterations = hc.n_iterations;
      st.n_burnin = hc.n_burnin;
      st.n_kept = static_cast<int>(chains[0].samples.rows());

      const int r = target.dim();
      st.ess_per_component = Vector::Zero(r);
      st.mean_per_component = Vector::Zero(r);
      double nlf = 0.0;
      Vector pooled_viol(static_cast<long>(st.n_kept) * reps);
      long vpos = 0;
      long tail_hits = 0, tail_total = 0;
      std::vector<double> rep_means;
      for (const Chain& c : chains) {
        st.accept_rate += c.accept_rate / reps;
        st.step_size += c.step_size_used / reps;
        nlf += static_cast<double>(c.n_leapfrog_used) / reps;
        st.n_divergent += c.n_divergent;
        st.n_out_of_support += c.n_out_of_support;
        for (int j = 0; j < r; ++j) {
          st.ess_per_component[j] += ess(c.samples.col(j)).value / reps;
          st.mean_per_component[j] += c.samples.col(j).mean() / reps;
        }
        const Vector gs = chain_fn_series(c, plan.g);
        st.ess_per_1000 += ess(gs).value / st.n_kept * 1000.0 / reps;
        rep_means.push_back(series_mean(gs));
        pooled_viol.segment(vpos, c.violations.size()) = c.violations;
        vpos += c.violations.size();
        if (plan.tail_threshold) {
          for (int i = 0; i < c.samples.rows(); ++i) {
            tail_hits += plan.tail_metric(c.samples.row(i).transpose(), c.violations[i]) >
                         *plan.tail_threshold;
            ++tail_total;
          }
        }
        if (st.sharp_oracle)
          st.diff_per_replicate.push_back(
              std::abs(series_mean(gs) - st.sharp_oracle->value));
      }
      st.n_leapfrog = static_cast<int>(std::lround(nlf));
      Chain pooled;
      pooled.violations = pooled_viol;
      st.violation = violation_summary(pooled);
      if (plan.tail_threshold)
        st.tail_fraction = static_cast<double>(tail_hits) / tail_total;
      if (plan.chi2) st.chi2_statistic = chi_square_uniform_angle(chains);
      if (plan.factor_metrics)
        factor_network_metrics(std::get<FactorNetworkSpec>(plan.model), chains, plan.g, st);
      if (st.sharp_oracle && !rep_means.empty()) {
        // Pooled estimate: all replicates have equal kept counts, so the
        // grand mean is the mean of replicate means; the CI comes from the
        // replicate spread.
        const double grand =
            std::accumulate(rep_means.begin(), rep_means.end(), 0.0) / rep_means.size();
        const double d = std::abs(grand - st.sharp_oracle->value);
        st.diff_mean = d;
        if (rep_means.size() > 1) {
          double ss = 0.0;
          for (double v : rep_means) ss += (v - grand) * (v - grand);
          const double half =
              1.96 * std::sqrt(ss / (rep_means.size() - 1) / rep_means.size());
          st.diff_lo = std::max(0.0, d - half);
          st.diff_hi = d + half;
        } else {
          st.diff_lo = st.diff_hi = d;
        }
      }
    }
    res.chains.push_back(std::move(chains));
    res.per_lambda.push_back(std::move(st));
  }

  if (rate) {
    const int n = static_cast<int>(lambdas.size());
    Vector lv(n), ev(n);
    for (int i = 0; i < n; ++i) {
      lv[i] = lambdas[i];
      if (!res.per_lambda[i].quad_diff)
        throw NumericError("run_experiment: rate study needs both oracles per lambda");
      ev[i] = *res.per_lambda[i].quad_diff;
    }
    res.rate_fit = fit_rate(lv, ev, plan.rate_s);
  }

  if (plan.baseline) {
    // Exact-vs-exact yardstick: pairs of independent exact circle samples of
    // the same size as one kept chain, mirroring the table's last column.
    const auto& spec = std::get<SphereGaussianSpec>(plan.model);
    const int n_draws = res.per_lambda.empty() ? 5000 : res.per_lambda[0].n_kept;
    std::vector<double> diffs;
    for (int k = 0; k < reps; ++k) {
      const std::uint64_t base = *cfg.seed + static_cast<std::uint64_t>(reps);
      const Matrix a = vmf_circle_sample(spec.F, spec.sigma2, n_draws, base + 2 * k);
      const Matrix b = vmf_circle_sample(spec.F, spec.sigma2, n_draws, base + 2 * k + 1);
      diffs.push_back(std::abs(a.sum() / n_draws - b.sum() / n_draws));
    }
    const double m = std::accumulate(diffs.begin(), diffs.end(), 0.0) / diffs.size();
    res.baseline_mean = m;
    if (diffs.size() > 1) {
      double ss = 0.0;
      for (double v : diffs) ss += (v - m) * (v - m);
      const double half = 1.96 * std::sqrt(ss / (diffs.size() - 1) / diffs.size());
      res.baseline_lo = m - half;
      res.baseline_hi = m + half;
    } else {
      res.baseline_lo = res.baseline_hi = m;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Summary / files
// ---------------------------------------------------------------------------

namespace {

const char* method_name(OracleMethod m) {
  switch (m) {
    case OracleMethod::Analytic: return "analytic";
    case OracleMethod::Quadrature: return "quadrature";
    case OracleMethod::RejectionMC: return "rejection-mc";
  }
  return "unknown";
}

ordered_json oracle_json(const std::optional<OracleResult>& o) {
  if (!o) return nullptr;
  return {{"value", o->value},
          {"error_bound", o->error_bound},
          {"method", method_name(o->method)}};
}

ordered_json vector_json(const Vector& v) {
  ordered_json a = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

std::string plot_file_name(Experiment e) {
  switch (e) {
    case Experiment::GaussianInequality: return "density.csv";
    case Experiment::SphereGaussian:
    case Experiment::SphereT: return "section.csv";
    case Experiment::RateZeroMeasure:
    case Experiment::RatePositiveMeasure: return "rate.csv";
    default: return "";
  }
}

}  // namespace

std::string summary_to_json(const ExperimentResult& res) {
  const ExperimentConfig& cfg = res.config;
  ordered_json j;
  j["experiment"] = experiment_name(cfg.experiment);
  j["model"] = res.model;
  j["estimand"] = res.estimand;
  j["seed"] = *cfg.seed;
  j["replicates"] = *cfg.replicates;
  j["lambda_grid"] = *cfg.lambda_grid;
  j["tail_threshold"] = opt_json(res.tail_threshold);

  ordered_json rows = ordered_json::array();
  for (const LambdaStats& st : res.per_lambda) {
    const bool ran = st.n_kept > 0;
    ordered_json row;
    row["lambda"] = st.lambda;
    row["n_iterations"] = ran ? ordered_json(st.n_iterations) : nullptr;
    row["n_burnin"] = ran ? ordered_json(st.n_burnin) : nullptr;
    row["n_kept"] = ran ? ordered_json(st.n_kept) : nullptr;
    row["acceptance_rate"] = ran ? ordered_json(st.accept_rate) : nullptr;
    row["step_size"] = ran ? ordered_json(st.step_size) : nullptr;
    row["n_leapfrog"] = ran ? ordered_json(st.n_leapfrog) : nullptr;
    row["n_divergent"] = ran ? ordered_json(st.n_divergent) : nullptr;
    row["n_out_of_support"] = ran ? ordered_json(st.n_out_of_support) : nullptr;
    row["ess_per_component"] = ran ? vector_json(st.ess_per_component) : ordered_json(nullptr);
    row["ess_per_1000"] = ran ? ordered_json(st.ess_per_1000) : nullptr;
    row["mean_per_component"] =
        ran ? vector_json(st.mean_per_component) : ordered_json(nullptr);
    row["violation"] = ran ? ordered_json{{"mean", st.violation.mean},
                                          {"q025", st.violation.q025},
                                          {"q975", st.violation.q975}}
                           : ordered_json(nullptr);
    row["sharp_oracle"] = oracle_json(st.sharp_oracle);
    row["relaxed_oracle"] = oracle_json(st.relaxed_oracle);
    if (st.diff_mean) {
      row["expectation_diff"] = {{"mean", *st.diff_mean},
                                 {"ci95", {*st.diff_lo, *st.diff_hi}},
                                 {"per_replicate", st.diff_per_replicate}};
    } else {
      row["expectation_diff"] = nullptr;
    }
    row["oracle_gap"] = opt_json(st.quad_diff);
    row["tail_fraction"] = opt_json(st.tail_fraction);
    if (st.chi2_statistic) {
      row["chi_square_alpha2"] = {{"statistic", *st.chi2_statistic},
                                  {"bins", kChi2Bins},
                                  {"dof", kChi2Bins - 1},
                                  {"critical_1pct", kChi2Critical1pct},
                                  {"uniform_at_1pct", *st.chi2_statistic < kChi2Critical1pct}};
    } else {
      row["chi_square_alpha2"] = nullptr;
    }
    row["u_orthogonality_l1"] = opt_json(st.u_orthogonality);
    row["auc"] = opt_json(st.auc);
    rows.push_back(std::move(row));
  }
  j["per_lambda"] = std::move(rows);

  if (res.rate_fit) {
    const RateFit& f = *res.rate_fit;
    j["rate_fit"] = {{"slope", f.slope},
                     {"intercept", f.intercept},
                     {"r_squared", f.r_squared},
                     {"lambdas", vector_json(f.lambdas)},
                     {"errors", vector_json(f.errors)},
                     {"ratios", vector_json(f.ratios)}};
  } else {
    j["rate_fit"] = nullptr;
  }

  if (res.baseline_mean) {
    j["exact_baseline"] = {{"mean", *res.baseline_mean},
                           {"ci95", {*res.baseline_lo, *res.baseline_hi}}};
  } else {
    j["exact_baseline"] = nullptr;
  }

  const std::string plot = plot_file_name(cfg.experiment);
  j["files"] = {{"samples", "samples.csv"},
                {"summary", "summary.json"},
                {"config", "config_resolved.json"},
                {"plot", plot.empty() ? ordered_json(nullptr) : ordered_json(plot)}};
  return j.dump(2) + "\n";
}

namespace {

void write_samples_csv(const ExperimentResult& res, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "lambda,replicate,iteration";
  for (int j = 0; j < res.dim; ++j) out << ",theta_" << j;
  out << ",distance,accepted\n";
  for (size_t li = 0; li < res.chains.size(); ++li) {
    const double lam = (*res.config.lambda_grid)[li];
    for (size_t k = 0; k < res.chains[li].size(); ++k) {
      const Chain& c = res.chains[li][k];
      const int burn = res.per_lambda[li].n_burnin;
      for (int i = 0; i < c.samples.rows(); ++i) {
        out << format_double(lam) << ',' << k << ',' << burn + i * c.thin;
        for (int j = 0; j < c.samples.cols(); ++j)
          out << ',' << format_double(c.samples(i, j));
        out << ',' << format_double(c.violations[i]) << ','
            << static_cast<int>(c.accepted[i]) << '\n';
      }
    }
  }
}

void write_density_csv(const ExperimentResult& res, const std::filesystem::path& path) {
  const auto& lambdas = *res.config.lambda_grid;
  const int n_obs = res.config.n_obs.value_or(100);
  GaussianInequalitySpec spec;
  spec.n = n_obs;
  const double post_var = 1.0 / (1.0 / 1000.0 + spec.n);
  const double post_mean = spec.ybar * spec.n * post_var;
  const double post_sd = std::sqrt(post_var);
  const double lo = post_mean - 6.0 * post_sd;
  const double hi = std::max(post_mean + 6.0 * post_sd, 1.0 + 20.0 * lambdas.front());
  const int n = 801;

  std::vector<RelaxedTarget> targets;
  for (double lam : lambdas)
    targets.push_back(make_model(spec, Vector::Constant(1, lam)));

  std::vector<std::vector<double>> relaxed(lambdas.size(), std::vector<double>(n));
  std::vector<double> sharp(n), grid(n);
  const double h = (hi - lo) / (n - 1);
  const double z = 0.5 * (1.0 + std::erf((1.0 - post_mean) / (post_sd * std::sqrt(2.0))));
  for (int i = 0; i < n; ++i) {
    const double x = lo + i * h;
    grid[i] = x;
    sharp[i] = x <= 1.0 ? std::exp(-0.5 * (x - post_mean) * (x - post_mean) / post_var) /
                              (post_sd * std::sqrt(2.0 * kPi) * z)
                        : 0.0;
    Vector th = Vector::Constant(1, x);
    for (size_t li = 0; li < lambdas.size(); ++li)
      relaxed[li][i] =
          targets[li].in_support(th)
              ? std::exp(targets[li].log_density_or_neg_inf(th))
              : 0.0;
  }
  for (auto& col : relaxed) {
    double mass = 0.0;
    for (int i = 0; i + 1 < n; ++i) mass += 0.5 * (col[i] + col[i + 1]) * h;
    for (double& v : col) v /= mass;
  }

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "theta,sharp";
  for (double lam : lambdas) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), ",relaxed_lambda_%g", lam);
    out << buf;
  }
  out << '\n';
  for (int i = 0; i < n; ++i) {
    out << format_double(grid[i]) << ',' << format_double(sharp[i]);
    for (size_t li = 0; li < lambdas.size(); ++li)
      out << ',' << format_double(relaxed[li][i]);
    out << '\n';
  }
}

void write_section_csv(const ExperimentResult& res, const std::filesystem::path& path) {
  // Orthonormal frame with b1 = F; (s2, s3) is the view along the mode,
  // (s1, s2) the side view of the sphere section.
  const Vector F = Vector::Constant(3, 1.0 / std::sqrt(3.0));
  const Vector b2 = (Vector(3) << -1.0, 1.0, 0.0).finished().normalized();
  const Eigen::Vector3d c3 =
      Eigen::Vector3d(F[0], F[1], F[2]).cross(Eigen::Vector3d(b2[0], b2[1], b2[2]));
  const Vector b3 = (Vector(3) << c3[0], c3[1], c3[2]).finished().normalized();

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "lambda,replicate,s1,s2,s3,angle\n";
  for (size_t li = 0; li < res.chains.size(); ++li) {
    const double lam = (*res.config.lambda_grid)[li];
    for (size_t k = 0; k < res.chains[li].size(); ++k) {
      const Chain& c = res.chains[li][k];
      for (int i = 0; i < c.samples.rows(); ++i) {
        const Vector th = c.samples.row(i).transpose();
        const double cosang = th.dot(F) / std::max(th.norm(), 1e-300);
        out << format_double(lam) << ',' << k << ',' << format_double(th.dot(F)) << ','
            << format_double(th.dot(b2)) << ',' << format_double(th.dot(b3)) << ','
            << format_double(std::acos(std::clamp(cosang, -1.0, 1.0))) << '\n';
      }
    }
  }
}

void write_rate_csv(const ExperimentResult& res, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "lambda,sharp,relaxed,error,error_bound,ratio\n";
  for (size_t i = 0; i < res.per_lambda.size(); ++i) {
    const LambdaStats& st = res.per_lambda[i];
    double ratio = std::numeric_limits<double>::quiet_NaN();
    if (res.rate_fit) {
      for (int k = 0; k < res.rate_fit->lambdas.size(); ++k)
        if (res.rate_fit->lambdas[k] == st.lambda) ratio = res.rate_fit->ratios[k];
    }
    out << format_double(st.lambda) << ','
        << format_double(st.sharp_oracle ? st.sharp_oracle->value : 0.0) << ','
        << format_double(st.relaxed_oracle ? st.relaxed_oracle->value : 0.0) << ','
        << format_double(st.quad_diff.value_or(0.0)) << ','
        << format_double(st.relaxed_oracle ? st.relaxed_oracle->error_bound : 0.0) << ','
        << format_double(ratio) << '\n';
  }
}

}  // namespace

void write_result_files(const ExperimentResult& res) {
  namespace fs = std::filesystem;
  const fs::path dir = res.config.output_dir;
  fs::create_directories(dir);

  write_samples_csv(res, dir / "samples.csv");

  {
    std::ofstream out(dir / "summary.json");
    if (!out) throw std::runtime_error("cannot write summary.json");
    out << summary_to_json(res);
  }
  {
    std::ofstream out(dir / "config_resolved.json");
    if (!out) throw std::runtime_error("cannot write config_resolved.json");
    out << config_to_json(res.config);
  }

  switch (res.config.experiment) {
    case Experiment::GaussianInequality:
      write_density_csv(res, dir / "density.csv");
      break;
    case Experiment::SphereGaussian:
    case Experiment::SphereT:
      write_section_csv(res, dir / "section.csv");
      break;
    case Experiment::RateZeroMeasure:
    case Experiment::RatePositiveMeasure:
      write_rate_csv(res, dir / "rate.csv");
      break;
    default:
      break;
  }
}

}  // namespace relaxhmc
