#include "relaxhmc/oracles.hpp"

#include "relaxhmc/errors.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace relaxhmc;

namespace {

constexpr double kPi = 3.14159265358979323846;

const ScalarFn kOne = [](const Vector&) { return 1.0; };
const ScalarFn kFirst = [](const Vector& th) { return th[0]; };

DensityFn zero_fn() {
  return [](const Vector&) { return 0.0; };
}
GradientFn gzero_fn() {
  return [](const Vector& th) { return Vector(Vector::Zero(th.size())); };
}

// Kolmogorov-Smirnov distance of a sample of angles against U(-pi, pi).
double ks_uniform_angle(const std::vector<double>& angles) {
  std::vector<double> a = angles;
  std::sort(a.begin(), a.end());
  const double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double cdf = (a[i] + kPi) / (2.0 * kPi);
    d = std::max(d, std::abs(cdf - (i + 1) / n));
    d = std::max(d, std::abs(cdf - i / n));
  }
  return d;
}

}  // namespace

TEST_CASE("truncated normal moments") {
  SUBCASE("no truncation") {
    const TruncatedNormalMoments m =
        truncated_normal_moments(0.3, 2.0, std::numeric_limits<double>::infinity());
    CHECK(m.mean == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(m.variance == doctest::Approx(2.0).epsilon(1e-14));
  }
  SUBCASE("standard normal cut at zero") {
    const TruncatedNormalMoments m = truncated_normal_moments(0.0, 1.0, 0.0);
    CHECK(m.mean == doctest::Approx(-0.7978845608028654).epsilon(1e-12));
    CHECK(m.variance == doctest::Approx(0.3633802276324186).epsilon(1e-12));
  }
  SUBCASE("posterior of the inequality model") {
    const double mu = 120.0 / 100.001, s2 = 1.0 / 100.001;
    const TruncatedNormalMoments m = truncated_normal_moments(mu, s2, 1.0);
    CHECK(m.mean == doctest::Approx(0.9626773762309238).epsilon(1e-12));
    CHECK(m.variance == doctest::Approx(0.001142844869183294).epsilon(1e-10));
  }
  SUBCASE("deep truncation stays finite") {
    const TruncatedNormalMoments m = truncated_normal_moments(0.0, 1.0, -40.0);
    CHECK(std::isfinite(m.mean));
    CHECK(m.mean < -40.0);
    CHECK(m.mean > -40.1);
    CHECK(m.variance > 0.0);
  }
  SUBCASE("scale equivariance") {
    const TruncatedNormalMoments a = truncated_normal_moments(0.0, 1.0, -1.0);
    const TruncatedNormalMoments b = truncated_normal_moments(1.0, 4.0, -1.0);
    CHECK(b.mean == doctest::Approx(1.0 + 2.0 * a.mean).epsilon(1e-12));
    CHECK(b.variance == doctest::Approx(4.0 * a.variance).epsilon(1e-12));
  }
  CHECK_THROWS_AS((void)truncated_normal_moments(0.0, -1.0, 0.0), std::invalid_argument);
}

TEST_CASE("bessel ratio") {
  CHECK(bessel_i1_over_i0(0.0) == 0.0);
  CHECK(bessel_i1_over_i0(0.5) == doctest::Approx(0.242499612580802).epsilon(1e-12));
  CHECK(bessel_i1_over_i0(2.0) == doctest::Approx(0.697774657964008).epsilon(1e-12));
  CHECK(bessel_i1_over_i0(10.0) == doctest::Approx(0.948599825954846).epsilon(1e-12));
  CHECK(bessel_i1_over_i0(-2.0) == doctest::Approx(-0.697774657964008).epsilon(1e-12));
  CHECK(bessel_i1_over_i0(1e-4) == doctest::Approx(5e-5).epsilon(1e-6));
}

TEST_CASE("von mises-fisher circle sampler") {
  SUBCASE("unit norm and determinism") {
    Vector F(2);
    F << 0.0, 1.0;
    const Matrix a = vmf_circle_sample(F, 0.1, 500, 42);
    const Matrix b = vmf_circle_sample(F, 0.1, 500, 42);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < a.rows(); ++i)
      CHECK(std::abs(a.row(i).norm() - 1.0) < 1e-12);
  }
  SUBCASE("near-zero concentration is uniform") {
    Vector F(2);
    F << 1.0, 0.0;
    const Matrix s = vmf_circle_sample(F, 1e12, 4000, 7);
    std::vector<double> ang(4000);
    for (int i = 0; i < 4000; ++i) ang[i] = std::atan2(s(i, 1), s(i, 0));
    // 1% critical value of the KS statistic.
    CHECK(ks_uniform_angle(ang) * std::sqrt(4000.0) < 1.63);
  }
  SUBCASE("resultant length at kappa = 10") {
    Vector F(2);
    F << 0.0, 1.0;
    const int n = 20000;
    const Matrix s = vmf_circle_sample(F, 0.1, n, 11);
    double mean = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double c = s.row(i).dot(F.transpose());
      mean += c;
      sq += c * c;
    }
    mean /= n;
    const double sd = std::sqrt(sq / n - mean * mean);
    CHECK(std::abs(mean - 0.948599825954846) < 4.0 * sd / std::sqrt(double(n)));
  }
  SUBCASE("off-sphere mean direction is rejected") {
    Vector F(2);
    F << 0.5, 0.0;
    CHECK_THROWS_AS((void)vmf_circle_sample(F, 0.1, 10, 1), std::invalid_argument);
  }
}

TEST_CASE("torus uniform sampler") {
  const int n = 20000;
  const Matrix s = torus_uniform_sample(n, 13);
  const ConstraintSet set = catalog::torus();
  double csum = 0.0, csq = 0.0;
  std::vector<double> a2(n);
  for (int i = 0; i < n; ++i) {
    const Vector th = s.row(i).transpose();
    CHECK(std::abs(set.eval(th)[0]) < 1e-12);
    const double c = (std::hypot(th[0], th[1]) - 1.0) / 0.5;
    csum += c;
    csq += c * c;
    a2[i] = std::atan2(th[1], th[0]);
  }
  const double mean = csum / n;
  const double sd = std::sqrt(csq / n - mean * mean);
  CHECK(std::abs(mean - 0.25) < 4.0 * sd / std::sqrt(double(n)));
  CHECK(ks_uniform_angle(a2) * std::sqrt(double(n)) < 1.63);
  const Matrix again = torus_uniform_sample(100, 13);
  CHECK((again - s.topRows(100)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sharp oracle normalizes to one") {
  SUBCASE("interval") {
    CHECK(sharp_expectation_quadrature(ModelSpec{GaussianInequalitySpec{}}, kOne, 128).value ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("circle and sphere") {
    SphereGaussianSpec c;
    c.F = (Vector(2) << 1.0, 0.0).finished();
    CHECK(sharp_expectation_quadrature(ModelSpec{c}, kOne, 128).value ==
          doctest::Approx(1.0).epsilon(1e-12));
    SphereTSpec s;
    s.F = (Vector(3) << 0.0, 0.0, 1.0).finished();
    CHECK(sharp_expectation_quadrature(ModelSpec{s}, kOne, 128).value ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("torus and simplex") {
    CHECK(sharp_expectation_quadrature(ModelSpec{TorusUniformSpec{}}, kOne, 128).value ==
          doctest::Approx(1.0).epsilon(1e-12));
    SimplexToySpec x;
    x.alpha = (Vector(3) << 2.0, 3.0, 4.0).finished();
    CHECK(sharp_expectation_quadrature(ModelSpec{x}, kOne, 128).value ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("sharp interval agrees with the closed form") {
  const OracleResult r =
      sharp_expectation_quadrature(ModelSpec{GaussianInequalitySpec{}}, kFirst, 512);
  CHECK(std::abs(r.value - 0.9626773762309238) < 2e-5);
  CHECK(std::abs(r.value - 0.9626773762309238) < 3.0 * r.error_bound + 1e-12);
  // Second moment consistency.
  const ScalarFn sq = [](const Vector& th) { return th[0] * th[0]; };
  const double m2 = sharp_expectation_quadrature(ModelSpec{GaussianInequalitySpec{}}, sq, 512).value;
  CHECK(std::abs(m2 - r.value * r.value - 0.001142844869183294) < 1e-5);
}

TEST_CASE("sharp circle recovers von mises-fisher moments") {
  SphereGaussianSpec spec;
  spec.F = (Vector(2) << 1.0, 0.0).finished();
  const OracleResult r = sharp_expectation_quadrature(ModelSpec{spec}, kFirst, 512);
  CHECK(r.value == doctest::Approx(0.948599825954846).epsilon(1e-10));
  SUBCASE("tilted mean direction") {
    const double iq = 1.0 / std::sqrt(2.0);
    spec.F = (Vector(2) << iq, iq).finished();
    const ScalarFn sum = [](const Vector& th) { return th[0] + th[1]; };
    CHECK(sharp_expectation_quadrature(ModelSpec{spec}, sum, 512).value ==
          doctest::Approx(std::sqrt(2.0) * 0.948599825954846).epsilon(1e-10));
  }
}

TEST_CASE("sharp circle matches a direct riemann sum for the t kernel") {
  SphereTSpec spec;
  spec.F = (Vector(2) << 1.0, 0.0).finished();
  const OracleResult r = sharp_expectation_quadrature(ModelSpec{spec}, kFirst, 512);
  const double expo = -(spec.m + 2.0) / 2.0;
  double num = 0.0, den = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double phi = 2.0 * kPi * i / n;
    const double k = std::pow(1.0 + (2.0 - 2.0 * std::cos(phi)) / (spec.m * spec.sigma2), expo);
    num += std::cos(phi) * k;
    den += k;
  }
  CHECK(r.value == doctest::Approx(num / den).epsilon(1e-10));
}

TEST_CASE("sharp sphere recovers the three-dimensional resultant") {
  SphereGaussianSpec spec;
  spec.F = (Vector(3) << 0.0, 0.0, 1.0).finished();
  const ScalarFn g = [](const Vector& th) { return th[2]; };
  const OracleResult r = sharp_expectation_quadrature(ModelSpec{spec}, g, 512);
  // E[cos] = coth(kappa) - 1/kappa at kappa = 10.
  const double ref = 1.0 / std::tanh(10.0) - 0.1;
  CHECK(std::abs(r.value - ref) < 2e-5);
  CHECK(std::abs(r.value - ref) < 3.0 * r.error_bound + 1e-12);
}

TEST_CASE("sharp torus matches hausdorff moments") {
  const ScalarFn gc = [](const Vector& th) { return (std::hypot(th[0], th[1]) - 1.0) / 0.5; };
  CHECK(sharp_expectation_quadrature(ModelSpec{TorusUniformSpec{}}, gc, 512).value ==
        doctest::Approx(0.25).epsilon(1e-8));
  const ScalarFn g3 = [](const Vector& th) { return th[2]; };
  CHECK(std::abs(sharp_expectation_quadrature(ModelSpec{TorusUniformSpec{}}, g3, 512).value) <
        1e-12);
}

TEST_CASE("sharp simplex recovers dirichlet means") {
  SUBCASE("three parts") {
    SimplexToySpec spec;
    spec.alpha = (Vector(3) << 2.0, 3.0, 4.0).finished();
    const OracleResult r = sharp_expectation_quadrature(ModelSpec{spec}, kFirst, 512);
    CHECK(std::abs(r.value - 2.0 / 9.0) < 5e-6);
    const ScalarFn g2 = [](const Vector& th) { return th[2]; };
    CHECK(std::abs(sharp_expectation_quadrature(ModelSpec{spec}, g2, 512).value - 4.0 / 9.0) <
          5e-6);
  }
  SUBCASE("two parts") {
    SimplexToySpec spec;
    spec.alpha = (Vector(2) << 3.0, 5.0).finished();
    CHECK(sharp_expectation_quadrature(ModelSpec{spec}, kFirst, 512).value ==
          doctest::Approx(3.0 / 8.0).epsilon(1e-9));
  }
  SUBCASE("unsupported dimension") {
    SimplexToySpec spec;
    spec.alpha = Vector::Ones(4);
    CHECK_THROWS_AS((void)sharp_expectation_quadrature(ModelSpec{spec}, kFirst, 128),
                    UnsupportedOracleError);
  }
}

namespace {

// Exponentially tilted flat density on the line {theta1 = theta2, theta3 = 0}.
RelaxedTarget line_target(double tilt, double lambda1, double lambda2) {
  Matrix basis(3, 2);
  basis.col(0) = (Vector(3) << 1.0, -1.0, 0.0).finished();
  basis.col(1) = (Vector(3) << 0.0, 0.0, 1.0).finished();
  DensityFn ll = [tilt](const Vector& th) { return tilt * (th[0] + th[1]); };
  GradientFn gl = [tilt](const Vector&) {
    return Vector((Vector(3) << tilt, tilt, 0.0).finished());
  };
  Vector lams(2);
  lams << lambda1, lambda2;
  RelaxedTarget t(ll, gl, zero_fn(), gzero_fn(), catalog::line(basis), lams, false,
                  Box{Vector::Constant(3, -1.0), Vector::Constant(3, 1.0)});
  t.set_geometry(Geometry::Line);
  t.set_init_point(Vector::Zero(3));
  return t;
}

}  // namespace

TEST_CASE("sharp line integrates an exponential tilt exactly") {
  const double b = 0.7;
  const RelaxedTarget t = line_target(b, 1.0, 1.0);
  const OracleResult r = sharp_expectation_quadrature(t, kFirst, 512);
  // Arc length s in [-sqrt2, sqrt2], density e^{b sqrt2 s}, theta1 = s/sqrt2:
  // E[theta1] = (L coth(cL) - 1/c) / sqrt2 with c = b sqrt2, L = sqrt2.
  const double c = b * std::sqrt(2.0), L = std::sqrt(2.0);
  const double ref = (L / std::tanh(c * L) - 1.0 / c) / std::sqrt(2.0);
  CHECK(std::abs(r.value - ref) < 1e-6);
  CHECK(sharp_expectation_quadrature(t, kOne, 512).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("relaxed interval tracks the posterior as lambda varies") {
  const GaussianInequalitySpec spec;
  auto relax_mean = [&](double lam) {
    const RelaxedTarget t = make_model(ModelSpec{spec}, Vector::Constant(1, lam));
    return relaxed_expectation_quadrature(t, kFirst, 512);
  };
  SUBCASE("huge lambda recovers the unconstrained posterior") {
    const OracleResult r = relax_mean(1000.0);
    CHECK(std::abs(r.value - 1.199978227824) < 5e-7);
  }
  SUBCASE("frozen intermediate values") {
    CHECK(std::abs(relax_mean(0.1).value - 1.110799306474) < 5e-6);
    CHECK(std::abs(relax_mean(0.01).value - 0.973861541781) < 1e-5);
    CHECK(std::abs(relax_mean(0.001).value - 0.963583825531) < 1e-5);
  }
  SUBCASE("monotone approach to the sharp mean from above") {
    const double sharp = 0.9626773762309238;
    const double m1 = relax_mean(0.1).value;
    const double m2 = relax_mean(0.01).value;
    const double m3 = relax_mean(0.001).value;
    CHECK(m1 > m2);
    CHECK(m2 > m3);
    CHECK(m3 > sharp);
  }
}

TEST_CASE("relaxed circle with a tangent box carries a root-lambda bias") {
  SphereGaussianSpec spec;
  spec.F = (Vector(2) << 1.0, 0.0).finished();
  const double sharp = 0.948599825954846;
  const RelaxedTarget t3 = make_model(ModelSpec{spec}, Vector::Constant(1, 1e-3));
  const double v3 = relaxed_expectation_quadrature(t3, kFirst, 512).value;
  CHECK(v3 == doctest::Approx(0.946731923).epsilon(1e-6));
  const RelaxedTarget t4 = make_model(ModelSpec{spec}, Vector::Constant(1, 1e-4));
  const double v4 = relaxed_expectation_quadrature(t4, kFirst, 512).value;
  CHECK(v4 == doctest::Approx(0.948026937).epsilon(1e-6));
  // Bias shrinks like sqrt(lambda): one decade in lambda, about sqrt(10) in bias.
  const double ratio = (sharp - v3) / (sharp - v4);
  CHECK(ratio > 2.6);
  CHECK(ratio < 3.9);
  SUBCASE("tiny lambda stays finite and close to sharp") {
    const RelaxedTarget t6 = make_model(ModelSpec{spec}, Vector::Constant(1, 1e-6));
    const OracleResult r = relaxed_expectation_quadrature(t6, kFirst, 512);
    CHECK(std::isfinite(r.value));
    CHECK(std::abs(r.value - sharp) < 1e-3);
  }
}

TEST_CASE("relaxed circle with an enlarged box converges at second order") {
  SphereGaussianSpec spec;
  spec.F = (Vector(2) << 1.0, 0.0).finished();
  spec.box_halfwidth = 2.0;
  const double sharp = 0.948599825954846;
  Vector lambdas(3), errors(3);
  lambdas << 3e-2, 1e-2, 3e-3;
  for (int i = 0; i < 3; ++i) {
    const RelaxedTarget t = make_model(ModelSpec{spec}, Vector::Constant(1, lambdas[i]));
    errors[i] = std::abs(relaxed_expectation_quadrature(t, kFirst, 512).value - sharp);
    CHECK(errors[i] / (lambdas[i] * lambdas[i]) > 0.4);
    CHECK(errors[i] / (lambdas[i] * lambdas[i]) < 0.6);
  }
  CHECK(errors[0] == doctest::Approx(4.4957e-4).epsilon(1e-3));
  CHECK(errors[1] == doctest::Approx(5.0801e-5).epsilon(1e-3));
  CHECK(errors[2] == doctest::Approx(4.5809e-6).epsilon(1e-3));
}

TEST_CASE("relaxed torus tails and moments") {
  TorusUniformSpec spec;
  const ScalarFn gc = [](const Vector& th) { return (std::hypot(th[0], th[1]) - 1.0) / 0.5; };
  SUBCASE("small lambda moment matches the expansion") {
    // E[(rho-1)/0.5] = E[t^3]/E[t] = 0.25 (1 + 16 lambda^2) + O(lambda^4).
    const RelaxedTarget t = make_model(ModelSpec{spec}, Vector::Constant(1, 1e-2));
    const OracleResult r = relaxed_expectation_quadrature(t, gc, 256);
    CHECK(std::abs(r.value - 0.2504) < 2e-4);
  }
  SUBCASE("violation tail probabilities order with lambda") {
    auto tail = [&](double lam) {
      const RelaxedTarget t = make_model(ModelSpec{spec}, Vector::Constant(1, lam));
      const ScalarFn ind = [&t](const Vector& th) {
        return t.constraint_set().distance(th) > 0.05 ? 1.0 : 0.0;
      };
      return relaxed_expectation_quadrature(t, ind, 256, {0.05}).value;
    };
    const double p1 = tail(1e-1);
    const double p2 = tail(1e-2);
    CHECK(p1 > 0.50);
    CHECK(p1 < 0.64);
    CHECK(p2 > 0.0055);
    CHECK(p2 < 0.0075);
    CHECK(p1 > 50.0 * p2);
  }
}

TEST_CASE("relaxed affine handles directional lambdas") {
  const RelaxedTarget t = line_target(0.0, 0.02 * std::sqrt(2.0), 0.05);
  // nu1 = (th1-th2)/sqrt2 lives on a diamond cross-section of the box, so its
  // truncation width shrinks linearly; nu2 = th3 is a plain truncated laplace.
  const ScalarFn a1 = [](const Vector& th) { return std::abs(th[0] - th[1]) / std::sqrt(2.0); };
  const ScalarFn a2 = [](const Vector& th) { return std::abs(th[2]); };
  const double e1 = relaxed_expectation_quadrature(t, a1, 256).value;
  const double e2 = relaxed_expectation_quadrature(t, a2, 256).value;
  const double lp1 = 0.02 * std::sqrt(2.0), c1 = std::sqrt(2.0);
  const double expect1 = lp1 * (c1 - 2.0 * lp1) / (c1 - lp1);
  CHECK(e1 == doctest::Approx(expect1).epsilon(2e-3));
  const double lp2 = 0.05, c2 = 1.0;
  const double q = std::exp(-c2 / lp2);
  const double expect2 = lp2 * (1.0 - q * (1.0 + c2 / lp2)) / (1.0 - q);
  CHECK(e2 == doctest::Approx(expect2).epsilon(2e-3));
}

TEST_CASE("relaxed line approaches the sharp law") {
  const RelaxedTarget sharp_t = line_target(0.7, 1.0, 1.0);
  const double sharp = sharp_expectation_quadrature(sharp_t, kFirst, 512).value;
  const RelaxedTarget t = line_target(0.7, 1e-4, 1e-4);
  const OracleResult r = relaxed_expectation_quadrature(t, kFirst, 256);
  // The true gap is ~5e-5; the dominant term here is the first-order
  // box-edge error of the affine chart, which the bound has to cover.
  CHECK(std::abs(r.value - sharp) < 4e-3);
  CHECK(std::abs(r.value - sharp) < 6.0 * r.error_bound + 1e-4);
}

TEST_CASE("relaxed simplex stays near the dirichlet mean") {
  SimplexToySpec spec;
  spec.alpha = (Vector(3) << 2.0, 3.0, 4.0).finished();
  const RelaxedTarget t = make_model(ModelSpec{spec}, Vector::Constant(1, 1e-3));
  const OracleResult r = relaxed_expectation_quadrature(t, kFirst, 128);
  CHECK(std::abs(r.value - 2.0 / 9.0) < 5e-5);
  CHECK(relaxed_expectation_quadrature(t, kOne, 128).value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("relaxed box chart handles unconstrained targets") {
  DensityFn ll = [](const Vector& th) { return -0.5 * th.squaredNorm(); };
  GradientFn gl = [](const Vector& th) { return Vector(-th); };
  RelaxedTarget t(ll, gl, zero_fn(), gzero_fn(), catalog::unconstrained(1), Vector::Ones(1),
                  false, Box{Vector::Constant(1, -1.0), Vector::Constant(1, 2.0)});
  const OracleResult r = relaxed_expectation_quadrature(t, kFirst, 512);
  // Two-sided truncated standard normal on [-1, 2].
  const double phi_a = std::exp(-0.5) / std::sqrt(2.0 * kPi);
  const double phi_b = std::exp(-2.0) / std::sqrt(2.0 * kPi);
  const double Phi = 0.5 * (std::erf(2.0 / std::sqrt(2.0)) + std::erf(1.0 / std::sqrt(2.0)));
  CHECK(r.value == doctest::Approx((phi_a - phi_b) / (0.5 * Phi * 2.0)).epsilon(1e-6));
}

TEST_CASE("oracle error bounds shrink with the grid") {
  SphereGaussianSpec spec;
  spec.F = (Vector(2) << 1.0, 0.0).finished();
  const RelaxedTarget t = make_model(ModelSpec{spec}, Vector::Constant(1, 1e-2));
  const OracleResult coarse = relaxed_expectation_quadrature(t, kFirst, 64);
  const OracleResult fine = relaxed_expectation_quadrature(t, kFirst, 512);
  CHECK(fine.error_bound < coarse.error_bound);
  CHECK(std::abs(fine.value - coarse.value) < 10.0 * (coarse.error_bound + 1e-12));
  CHECK(fine.method == OracleMethod::Quadrature);
}

TEST_CASE("oracle rejects unsupported inputs") {
  SUBCASE("grid minimums") {
    CHECK_THROWS_AS(
        (void)sharp_expectation_quadrature(ModelSpec{GaussianInequalitySpec{}}, kOne, 32),
        std::invalid_argument);
    const RelaxedTarget t =
        make_model(ModelSpec{GaussianInequalitySpec{}}, Vector::Constant(1, 0.1));
    CHECK_THROWS_AS((void)relaxed_expectation_quadrature(t, kOne, 4), std::invalid_argument);
  }
  SUBCASE("high-dimensional targets") {
    FactorNetworkSpec spec;
    spec.data = generate_factor_network_data(2, 3, 1, 3);
    spec.d = 1;
    const RelaxedTarget t = make_model(ModelSpec{spec}, Vector::Constant(1, 0.1));
    CHECK_THROWS_AS((void)relaxed_expectation_quadrature(t, kOne, 128), UnsupportedOracleError);
    CHECK_THROWS_AS((void)sharp_expectation_quadrature(t, kOne, 128), UnsupportedOracleError);
  }
  SUBCASE("missing box") {
    DensityFn ll = [](const Vector& th) { return -0.5 * th.squaredNorm(); };
    GradientFn gl = [](const Vector& th) { return Vector(-th); };
    RelaxedTarget t(ll, gl, zero_fn(), gzero_fn(), catalog::sphere(2), Vector::Constant(1, 0.1));
    t.set_geometry(Geometry::Circle);
    CHECK_THROWS_AS((void)relaxed_expectation_quadrature(t, kOne, 128), UnsupportedOracleError);
  }
}
