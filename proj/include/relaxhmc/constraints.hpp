#pragma once

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace relaxhmc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// One scalar constraint nu_j: R^r -> R with its analytic gradient.
// grad must agree with finite differences wherever nu_j is differentiable;
// at kinks of derived quantities the subgradient convention sign(0) = 0
// is applied by the consumers, not here.
struct ConstraintFn {
  int dim_in = 0;
  std::function<double(const Vector&)> eval;
  std::function<Vector(const Vector&)> grad;
  std::string label;
};

enum class ConstraintKind { MeasureZero, PositiveMeasure };
enum class NormOrder { L1, L2 };

// Closed-form nearest-point projection onto a positive-measure region D.
// distance(theta) = ||theta - project(theta)|| under norm_order.
struct DirectDistance {
  std::function<Vector(const Vector&)> project;
  NormOrder norm_order = NormOrder::L2;
};

// Ordered collection of constraints with positive weights. Immutable after
// construction and safe to share across threads.
class ConstraintSet {
 public:
  // Measure-zero set: distance = sum_j weights_j * |nu_j(theta)|.
  ConstraintSet(std::vector<ConstraintFn> constraints, Vector weights);

  // Positive-measure set: the single constraint evaluates the direct
  // distance itself (>= 0, zero on D); `direct` provides the projection.
  ConstraintSet(ConstraintFn distance_fn, double weight, DirectDistance direct);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(constraints_.size()); }
  ConstraintKind kind() const { return kind_; }
  const Vector& weights() const { return weights_; }
  const std::vector<ConstraintFn>& constraints() const { return constraints_; }
  const std::optional<DirectDistance>& direct() const { return direct_; }

  // [nu_1(theta), ..., nu_s(theta)]
  Vector eval(const Vector& theta) const;

  // Weighted L1 distance (measure zero) or projection distance (positive
  // measure, scaled by the weight).
  double distance(const Vector& theta) const;

  // sqrt(det(Gram)) of the constraint gradients via Cholesky.
  // Measure-zero sets only; pivot < 1e-12 raises DegenerateJacobianError.
  double jacobian(const Vector& theta) const;

  bool d_expansion_contains(const Vector& theta, double d) const;

 private:
  void check_dim(const Vector& theta) const;

  std::vector<ConstraintFn> constraints_;
  Vector weights_;
  ConstraintKind kind_;
  std::optional<DirectDistance> direct_;
  int dim_ = 0;
};

// Free-function spellings of the ConstraintSet operations.
Vector eval_constraints(const ConstraintSet& set, const Vector& theta);
double distance(const ConstraintSet& set, const Vector& theta);
double jacobian(const ConstraintSet& set, const Vector& theta);
bool d_expansion_contains(const ConstraintSet& set, const Vector& theta, double d);

// Built-in catalog. Weights default to all ones; reweight with
// with_weights() when anisotropic shrinkage is wanted.
namespace catalog {

// nu_1 = sum(theta) - 1 on [0,1]^r.
ConstraintSet simplex(int r);

// Line span{u} in R^r given r-1 basis vectors of the orthogonal complement
// (columns of `basis`); orthonormalized internally by modified Gram-Schmidt,
// rank failure below 1e-12 is invalid. nu_j = theta . b_j.
ConstraintSet line(const Matrix& basis);

// nu_1 = ||theta||^2 - 1.
ConstraintSet sphere(int r);

// Stiefel V(n,k): nu_{i,j} = theta_i . theta_j - delta_ij over column pairs
// 1 <= i <= j <= k in lexicographic order, s = k(k+1)/2. theta is the
// column-major flattening of the n x k matrix.
ConstraintSet stiefel(int n, int k);

// Curved torus in R^3 (R=1, rho=1/2): nu = (1 - sqrt(th1^2+th2^2))^2 + th3^2 - 1/4.
ConstraintSet torus();

// Half-space {a . theta <= c}; direct distance (a.theta - c)+ / ||a||.
ConstraintSet half_space(const Vector& a, double c);

// Axis-aligned box via clamp projection (the other positive-measure region
// with a closed-form projection).
ConstraintSet box_region(const Vector& lo, const Vector& hi);

// Whole space; distance identically zero. Used for unconstrained targets.
ConstraintSet unconstrained(int r);

}  // namespace catalog

// Copy of `set` with new weights (same constraints).
ConstraintSet with_weights(const ConstraintSet& set, const Vector& weights);

}  // namespace relaxhmc
