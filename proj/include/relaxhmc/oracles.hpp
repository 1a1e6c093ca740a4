#pragma once

#include "relaxhmc/targets.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace relaxhmc {

enum class OracleMethod { Analytic, Quadrature, RejectionMC };

// An exact or quadrature-computed expectation used as ground truth.
struct OracleResult {
  double value = 0.0;
  double error_bound = 0.0;  // quadrature truncation or MC standard error
  OracleMethod method = OracleMethod::Quadrature;
};

struct TruncatedNormalMoments {
  double mean = 0.0;
  double variance = 0.0;
};

// Moments of N(mu, sigma2) truncated to (-inf, upper).
TruncatedNormalMoments truncated_normal_moments(double mu, double sigma2, double upper);

// Exact draws from the von Mises law on the unit circle with natural
// parameter F / sigma2, ||F|| = 1. Rows are points (cos a, sin a).
Matrix vmf_circle_sample(const Vector& F, double sigma2, int n, std::uint64_t seed);

// Exact uniform draws (Hausdorff measure) on the curved torus with R = 1,
// rho = 0.5, returned as rows in R^3.
Matrix torus_uniform_sample(int n, std::uint64_t seed);

using ScalarFn = std::function<double(const Vector&)>;

// Default quadrature resolutions per dimension.
inline constexpr int kDefaultGrid2D = 512;
inline constexpr int kDefaultGrid3D = 128;

// E[g | theta in D] over the sharp constraint set of the model, computed by
// composite trapezoid over a direct parameterization of D with the surface
// area element and the inverse-Jacobian weight applied explicitly.
OracleResult sharp_expectation_quadrature(const ModelSpec& model, const ScalarFn& g, int grid);

// Same, dispatching on the geometry hint of an already-built target. Supports
// Interval, Circle, Sphere2, Torus, Simplex (r <= 3) and Line charts.
OracleResult sharp_expectation_quadrature(const RelaxedTarget& target, const ScalarFn& g,
                                          int grid);

// E[g] under the relaxed density of the target, r <= 3, bounded box. The
// relaxation kernel is integrated exactly within each cell of a grid in the
// rescaled violation coordinate u = w nu / lambda; all mass accumulation is
// done in the log domain. nu_breakpoints lists |nu| values where g jumps
// (e.g. violation-tail indicators) so the grid can place nodes there.
OracleResult relaxed_expectation_quadrature(const RelaxedTarget& target, const ScalarFn& g,
                                            int grid,
                                            const std::vector<double>& nu_breakpoints = {});

// I1(x) / I0(x) by power series with 1e-12 truncation; mean resultant length
// of the von Mises law with concentration x.
double bessel_i1_over_i0(double x);

}  // namespace relaxhmc
