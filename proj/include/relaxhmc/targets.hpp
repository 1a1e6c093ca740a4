#pragma once

#include "relaxhmc/constraints.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace relaxhmc {

// Axis-aligned support bounds; +-inf entries leave a side unbounded.
struct Box {
  Vector lo, hi;
  bool contains(const Vector& theta) const {
    return (theta.array() >= lo.array()).all() && (theta.array() <= hi.array()).all();
  }
};

// Chart hint for the quadrature oracles; set by make_model, None for
// hand-assembled targets (generic Cartesian quadrature then applies).
enum class Geometry { None, Interval, Circle, Sphere2, Torus, Simplex, Line };

using DensityFn = std::function<double(const Vector&)>;
using GradientFn = std::function<Vector(const Vector&)>;

// Unnormalized log relaxed posterior
//   log pi~(theta) = log L(theta;Y) + log pi_R(theta)
//                    - sum_j weights_j |nu_j(theta)| / lambda_j
//                    (+ log J(nu_D(theta)) if jacobian_factor),
// with hard box rejection outside the support. Immutable and reentrant.
class RelaxedTarget {
 public:
  RelaxedTarget(DensityFn log_likelihood, GradientFn grad_log_likelihood,
                DensityFn log_prior, GradientFn grad_log_prior,
                ConstraintSet constraint_set, Vector lambdas,
                bool jacobian_factor = false, std::optional<Box> box = std::nullopt);

  double log_relaxed_density(const Vector& theta) const;  // OutOfSupportError outside box
  Vector grad_log_relaxed_density(const Vector& theta) const;

  // log_relaxed_density with box rejection mapped to -inf (sampler hot path).
  double log_density_or_neg_inf(const Vector& theta) const;

  bool in_support(const Vector& theta) const { return !box_ || box_->contains(theta); }

  // Likelihood times prior, without relaxation or Jacobian factor.
  double base_log_density(const Vector& theta) const;

  int dim() const { return dim_; }
  const ConstraintSet& constraint_set() const { return set_; }
  const Vector& lambdas() const { return lambdas_; }
  double lambda(int j) const { return lambdas_.size() == 1 ? lambdas_[0] : lambdas_[j]; }
  bool jacobian_factor() const { return jacobian_factor_; }
  const std::optional<Box>& box() const { return box_; }
  Geometry geometry() const { return geometry_; }
  const Vector& init_point() const { return init_; }

  void set_init_point(const Vector& theta) { init_ = theta; }
  void set_geometry(Geometry g) { geometry_ = g; }
  // Analytic log J and gradient (torus); otherwise jacobian_factor falls back
  // to the Gram determinant for values and central differences for gradients.
  void set_log_jacobian(DensityFn log_jac, GradientFn grad_log_jac);

 private:
  DensityFn log_likelihood_, log_prior_;
  GradientFn grad_log_likelihood_, grad_log_prior_;
  ConstraintSet set_;
  Vector lambdas_;
  bool jacobian_factor_ = false;
  std::optional<Box> box_;
  DensityFn log_jacobian_;
  GradientFn grad_log_jacobian_;
  Geometry geometry_ = Geometry::None;
  Vector init_;
  int dim_ = 0;
};

// ---------------------------------------------------------------------------
// Model catalog
// ---------------------------------------------------------------------------

// Gaussian mean with the inequality constraint theta <= 1: likelihood from n
// iid N(theta,1) observations summarized by (ybar, n), prior N(0, 1000),
// half-space direct distance (theta-1)+.
struct GaussianInequalitySpec {
  double ybar = 1.2;
  int n = 100;
};

// Zero likelihood, prior N(F, I sigma2), sphere constraint; recovers the
// von Mises-Fisher law on the sphere as lambda -> 0.
struct SphereGaussianSpec {
  Vector F;
  double sigma2 = 0.1;
  double box_halfwidth = 1.0;
};

// Multivariate t parent with m degrees of freedom, location F, scale I sigma2,
// kernel (1 + ||F-theta||^2/(m sigma2))^{-(m+p)/2} with p = dim.
struct SphereTSpec {
  Vector F;
  double sigma2 = 0.1;
  double m = 3.0;
  double box_halfwidth = 1.0;
};

// Flat base density, torus constraint, Jacobian factor on.
struct TorusUniformSpec {};

// Dirichlet-kernel prior prod theta_j^(alpha_j - 1) on [0,1]^r with the
// simplex constraint.
struct SimplexToySpec {
  Vector alpha;
};

// Synthetic multi-subject network data: n binary R x R adjacency matrices.
struct FactorNetworkData {
  int n = 0;       // subjects
  int R = 0;       // regions
  int d_true = 0;  // generating rank
  std::uint64_t seed = 0;
  std::vector<Matrix> adjacency;  // n matrices, symmetric 0/1, zero diagonal
};

FactorNetworkData generate_factor_network_data(int n, int R, int d_true, std::uint64_t seed);
std::string factor_network_data_to_json(const FactorNetworkData& data);
FactorNetworkData factor_network_data_from_json(const std::string& text);

// Bernoulli-logit factor model: logit P(A_ikl = 1) = mu_kl + sum_s v_is u_ks u_ls,
// Stiefel constraint on U, N(0,1) priors on mu and v (hyper-variances fixed),
// optional Laplace(0, laplace_scale) shrinkage on U entries.
// theta packs [mu_kl (k<l, lexicographic), v (column-major n x d), U (column-major R x d)].
struct FactorNetworkSpec {
  FactorNetworkData data;
  int d = 3;  // fitted rank
  double laplace_scale = 1.0;
  bool shrinkage = true;

  int mu_count() const { return data.R * (data.R - 1) / 2; }
  int v_count() const { return data.n * d; }
  int u_count() const { return data.R * d; }
  int dim() const { return mu_count() + v_count() + u_count(); }
  int u_offset() const { return mu_count() + v_count(); }
  // Column-major U entry index within theta.
  int u_index(int row, int col) const { return u_offset() + col * data.R + row; }
};

using ModelSpec = std::variant<GaussianInequalitySpec, SphereGaussianSpec, SphereTSpec,
                               TorusUniformSpec, SimplexToySpec, FactorNetworkSpec>;

std::string model_name(const ModelSpec& spec);

// Assembles the RelaxedTarget for a model spec; lambdas has length s or 1.
RelaxedTarget make_model(const ModelSpec& spec, const Vector& lambdas);

}  // namespace relaxhmc
