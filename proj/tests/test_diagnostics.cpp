#include "relaxhmc/diagnostics.hpp"

#include "relaxhmc/errors.hpp"
#include "relaxhmc/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace relaxhmc;

TEST_CASE("ess of an iid series is close to n") {
  Rng rng(101);
  const int n = 4000;
  Vector x(n);
  for (int i = 0; i < n; ++i) x[i] = rng.normal();
  const EssResult r = ess(x);
  CHECK_FALSE(r.degenerate);
  CHECK(r.value > 0.8 * n);
  CHECK(r.value <= n);
}

TEST_CASE("ess of an AR(1) chain matches the analytic rate") {
  // ESS/n for AR(1) with coefficient phi is (1-phi)/(1+phi) = 1/19 at 0.9.
  Rng rng(55);
  const int n = 40000;
  const double phi = 0.9;
  Vector x(n);
  double state = 0.0;
  for (int i = 0; i < n; ++i) {
    state = phi * state + std::sqrt(1.0 - phi * phi) * rng.normal();
    x[i] = state;
  }
  const double ratio = ess(x).value / n;
  CHECK(ratio > 0.5 * (1.0 - phi) / (1.0 + phi));
  CHECK(ratio < 1.6 * (1.0 - phi) / (1.0 + phi));
}

TEST_CASE("ess degenerates on a constant series") {
  const Vector x = Vector::Constant(50, 3.14);
  const EssResult r = ess(x);
  CHECK(r.degenerate);
  CHECK(r.value == doctest::Approx(50.0));
}

TEST_CASE("ess needs at least 10 points") {
  CHECK_THROWS_AS((void)ess(Vector::Zero(9)), InsufficientDataError);
}

TEST_CASE("ess is invariant under affine maps") {
  Rng rng(7);
  Vector x(500);
  double state = 0.0;
  for (int i = 0; i < 500; ++i) {
    state = 0.5 * state + rng.normal();
    x[i] = state;
  }
  const double a = ess(x).value;
  const double b = ess(Vector(-3.0 * x.array() + 11.0)).value;
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("violation summary quantiles") {
  Chain chain;
  chain.violations.resize(100);
  for (int i = 0; i < 100; ++i) chain.violations[i] = i / 100.0;
  const ViolationSummary s = violation_summary(chain);
  CHECK(s.mean == doctest::Approx(0.495).epsilon(1e-14));
  // Interpolated empirical quantiles (h = p (n-1)).
  CHECK(s.q025 == doctest::Approx(0.02475).epsilon(1e-12));
  CHECK(s.q975 == doctest::Approx(0.96525).epsilon(1e-12));
  SUBCASE("empty chain raises") {
    Chain empty;
    CHECK_THROWS_AS((void)violation_summary(empty), InsufficientDataError);
  }
}

TEST_CASE("expectation diff against an oracle") {
  Chain chain;
  chain.samples.resize(4, 2);
  chain.samples << 1.0, 0.0, 2.0, 0.0, 3.0, 0.0, 4.0, 0.0;
  const ScalarFn g = [](const Vector& th) { return th[0]; };
  OracleResult oracle{2.0, 1e-8, OracleMethod::Analytic};
  CHECK(expectation_diff(chain, g, oracle) == doctest::Approx(0.5).epsilon(1e-14));
  SUBCASE("non-finite oracle raises") {
    oracle.value = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS((void)expectation_diff(chain, g, oracle), std::invalid_argument);
  }
  SUBCASE("empty chain raises") {
    Chain empty;
    CHECK_THROWS_AS((void)expectation_diff(empty, g, oracle), InsufficientDataError);
  }
}

TEST_CASE("rate fit recovers a pure power law") {
  Vector lambdas(5), errors(5);
  const double c = 0.37, a = 1.8;
  for (int i = 0; i < 5; ++i) {
    lambdas[i] = std::pow(10.0, -0.5 * i);
    errors[i] = c * std::pow(lambdas[i], a);
  }
  const RateFit fit = fit_rate(lambdas, errors, 1);
  CHECK(fit.slope == doctest::Approx(a).epsilon(1e-9));
  CHECK(std::exp(fit.intercept) == doctest::Approx(c).epsilon(1e-9));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(fit.ratios.size() == 5);
  for (int i = 0; i < 5; ++i) {
    const double bound = lambdas[i] / std::abs(std::log(lambdas[i]));
    CHECK(fit.ratios[i] == doctest::Approx(errors[i] / bound).epsilon(1e-12));
  }
}

TEST_CASE("rate fit drops non-positive errors") {
  Vector lambdas(5), errors(5);
  for (int i = 0; i < 5; ++i) {
    lambdas[i] = std::pow(10.0, -double(i));
    errors[i] = 0.2 * lambdas[i];
  }
  errors[2] = 0.0;
  const RateFit fit = fit_rate(lambdas, errors, 2);
  CHECK(fit.lambdas.size() == 4);
  CHECK(fit.slope == doctest::Approx(1.0).epsilon(1e-9));
  SUBCASE("too few survivors") {
    errors[0] = errors[1] = 0.0;
    CHECK_THROWS_AS((void)fit_rate(lambdas, errors, 1), InsufficientDataError);
  }
}

TEST_CASE("rate fit validates its inputs") {
  Vector up(3), err(3);
  up << 0.001, 0.01, 0.1;  // increasing: wrong order
  err << 1e-4, 1e-3, 1e-2;
  CHECK_THROWS_AS((void)fit_rate(up, err, 1), std::invalid_argument);
  Vector mism(2);
  mism << 0.1, 0.01;
  CHECK_THROWS_AS((void)fit_rate(mism, err, 1), std::invalid_argument);
  Vector neg(3);
  neg << 0.1, -0.01, 0.001;
  CHECK_THROWS_AS((void)fit_rate(neg, err, 1), std::invalid_argument);
}

TEST_CASE("ess applied to sampler output") {
  // Short HMC run on a Gaussian: ESS positive and no larger than the number
  // of stored draws, violations identically zero without constraints.
  DensityFn ll = [](const Vector& th) { return -0.5 * th.squaredNorm(); };
  GradientFn gl = [](const Vector& th) { return Vector(-th); };
  DensityFn zero = [](const Vector&) { return 0.0; };
  GradientFn gzero = [](const Vector& th) { return Vector(Vector::Zero(th.size())); };
  RelaxedTarget t(ll, gl, zero, gzero, catalog::unconstrained(1), Vector::Ones(1));
  t.set_init_point(Vector::Zero(1));
  HmcConfig cfg;
  cfg.n_iterations = 600;
  cfg.n_burnin = 100;
  cfg.seed = 9;
  const Chain chain = sample(t, cfg);
  const EssResult r = ess(chain.samples.col(0));
  CHECK(r.value >= 1.0);
  CHECK(r.value <= 500.0);
  const ViolationSummary vs = violation_summary(chain);
  CHECK(vs.mean == 0.0);
  CHECK(vs.q975 == 0.0);
}
