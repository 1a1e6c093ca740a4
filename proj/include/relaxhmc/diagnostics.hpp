#pragma once

#include "relaxhmc/hmc.hpp"
#include "relaxhmc/oracles.hpp"

namespace relaxhmc {

struct EssResult {
  double value = 0.0;
  bool degenerate = false;  // constant series, zero autocorrelation by convention
};

// Effective sample size via Geyer initial-monotone-sequence truncation.
// Requires length >= 10; 1 <= value <= n.
EssResult ess(const Vector& series);

struct ViolationSummary {
  double mean = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
};

// Mean and 2.5% / 97.5% empirical quantiles of per-draw constraint distance.
ViolationSummary violation_summary(const Chain& chain);

// |mean of g over the chain - oracle.value|.
double expectation_diff(const Chain& chain, const ScalarFn& g, const OracleResult& oracle);

struct RateFit {
  Vector lambdas;  // strictly decreasing, pairs with error > 0 only
  Vector errors;
  Vector ratios;  // error / (lambda / |log lambda|^s)
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Least-squares slope of log error against log lambda; s sets the log power
// in the reported bound ratios. Non-positive errors are dropped with a
// warning; fewer than 3 surviving pairs is an error.
RateFit fit_rate(const Vector& lambdas, const Vector& errors, int s = 1);

}  // namespace relaxhmc
