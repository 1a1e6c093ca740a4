#include "relaxhmc/diagnostics.hpp"

#include "relaxhmc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <vector>

namespace relaxhmc {

EssResult ess(const Vector& series) {
  const int n = static_cast<int>(series.size());
  if (n < 10) throw InsufficientDataError("ess: need at least 10 points");
  const double mean = series.mean();
  const Vector centered = series.array() - mean;
  const double gamma0 = centered.squaredNorm() / n;
  if (gamma0 <= 0.0 || !std::isfinite(gamma0))
    return {static_cast<double>(n), true};

  auto gamma = [&](int k) {
    double s = 0.0;
    for (int i = 0; i + k < n; ++i) s += centered[i] * centered[i + k];
    return s / n;
  };

  // Sum of paired autocovariances, truncated at the first non-positive pair
  // and forced monotone non-increasing.
  double var = -gamma0;
  double prev = std::numeric_limits<double>::infinity();
  for (int m = 0; 2 * m + 1 < n; ++m) {
    double pair = gamma(2 * m) + gamma(2 * m + 1);
    if (pair <= 0.0) break;
    pair = std::min(pair, prev);
    var += 2.0 * pair;
    prev = pair;
  }
  const double tau = var / gamma0;
  double value = n / std::max(tau, 1e-300);
  value = std::clamp(value, 1.0, static_cast<double>(n));
  return {value, false};
}

ViolationSummary violation_summary(const Chain& chain) {
  const int n = static_cast<int>(chain.violations.size());
  if (n < 1) throw InsufficientDataError("violation_summary: empty chain");
  std::vector<double> v(chain.violations.data(), chain.violations.data() + n);
  std::sort(v.begin(), v.end());
  auto quantile = [&](double p) {
    const double h = p * (n - 1);
    const int lo = static_cast<int>(std::floor(h));
    const int hi = std::min(lo + 1, n - 1);
    return v[lo] + (h - lo) * (v[hi] - v[lo]);
  };
  return {chain.violations.mean(), quantile(0.025), quantile(0.975)};
}

double expectation_diff(const Chain& chain, const ScalarFn& g, const OracleResult& oracle) {
  if (!std::isfinite(oracle.value))
    throw std::invalid_argument("expectation_diff: oracle value is not finite");
  const int n = static_cast<int>(chain.samples.rows());
  if (n < 1) throw InsufficientDataError("expectation_diff: empty chain");
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += g(chain.samples.row(i).transpose());
  return std::abs(s / n - oracle.value);
}

RateFit fit_rate(const Vector& lambdas, const Vector& errors, int s) {
  if (lambdas.size() != errors.size())
    throw std::invalid_argument("fit_rate: lambdas and errors differ in length");
  if (s < 0) throw std::invalid_argument("fit_rate: s must be >= 0");
  std::vector<double> lam, err;
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0)) throw std::invalid_argument("fit_rate: lambdas must be positive");
    if (i > 0 && !(lambdas[i] < lambdas[i - 1]))
      throw std::invalid_argument("fit_rate: lambdas must be strictly decreasing");
    if (errors[i] > 0.0 && std::isfinite(errors[i])) {
      lam.push_back(lambdas[i]);
      err.push_back(errors[i]);
    } else {
      std::cerr << "fit_rate: dropping non-positive error at lambda=" << lambdas[i] << "\n";
    }
  }
  const int n = static_cast<int>(lam.size());
  if (n < 3) throw InsufficientDataError("fit_rate: fewer than 3 usable (lambda, error) pairs");

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = std::log(lam[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-30) throw NumericError("fit_rate: degenerate lambda grid");
  RateFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  const double ss_tot = syy - sy * sy / n;
  double ss_res = 0.0;
  for (int i = 0; i < n; ++i) {
    const double pred = fit.intercept + fit.slope * std::log(lam[i]);
    const double r = std::log(err[i]) - pred;
    ss_res += r * r;
  }
  fit.r_squared = ss_tot > 1e-30 ? 1.0 - ss_res / ss_tot : 1.0;

  fit.lambdas.resize(n);
  fit.errors.resize(n);
  fit.ratios.resize(n);
  for (int i = 0; i < n; ++i) {
    fit.lambdas[i] = lam[i];
    fit.errors[i] = err[i];
    const double bound = lam[i] / std::pow(std::abs(std::log(lam[i])), s);
    fit.ratios[i] = err[i] / bound;
  }
  return fit;
}

}  // namespace relaxhmc
