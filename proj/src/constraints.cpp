#include "relaxhmc/constraints.hpp"

#include "relaxhmc/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace relaxhmc {

ConstraintSet::ConstraintSet(std::vector<ConstraintFn> constraints, Vector weights)
    : constraints_(std::move(constraints)),
      weights_(std::move(weights)),
      kind_(ConstraintKind::MeasureZero) {
  if (constraints_.empty()) throw std::invalid_argument("ConstraintSet: needs s >= 1 constraints");
  dim_ = constraints_.front().dim_in;
  for (const auto& c : constraints_)
    if (c.dim_in != dim_) throw std::invalid_argument("ConstraintSet: mixed ambient dimensions");
  if (weights_.size() != static_cast<Eigen::Index>(constraints_.size()))
    throw std::invalid_argument("ConstraintSet: weights length != number of constraints");
  if ((weights_.array() <= 0.0).any())
    throw std::invalid_argument("ConstraintSet: weights must be positive");
}

ConstraintSet::ConstraintSet(ConstraintFn distance_fn, double weight, DirectDistance direct)
    : kind_(ConstraintKind::PositiveMeasure), direct_(std::move(direct)) {
  if (weight <= 0.0) throw std::invalid_argument("ConstraintSet: weight must be positive");
  dim_ = distance_fn.dim_in;
  constraints_.push_back(std::move(distance_fn));
  weights_ = Vector::Constant(1, weight);
}

void ConstraintSet::check_dim(const Vector& theta) const {
  if (theta.size() != dim_)
    throw std::invalid_argument("ConstraintSet: theta has length " +
                                std::to_string(theta.size()) + ", expected " +
                                std::to_string(dim_));
}

Vector ConstraintSet::eval(const Vector& theta) const {
  check_dim(theta);
  Vector nu(size());
  for (int j = 0; j < size(); ++j) nu[j] = constraints_[j].eval(theta);
  return nu;
}

double ConstraintSet::distance(const Vector& theta) const {
  check_dim(theta);
  if (kind_ == ConstraintKind::PositiveMeasure) {
    const Vector p = direct_->project(theta);
    const Vector diff = theta - p;
    const double d = direct_->norm_order == NormOrder::L2
                         ? diff.norm()
                         : diff.lpNorm<1>();
    return weights_[0] * d;
  }
  double d = 0.0;
  for (int j = 0; j < size(); ++j) d += weights_[j] * std::abs(constraints_[j].eval(theta));
  return d;
}

double ConstraintSet::jacobian(const Vector& theta) const {
  check_dim(theta);
  if (kind_ != ConstraintKind::MeasureZero)
    throw std::invalid_argument("jacobian: defined for measure-zero constraint sets only");
  const int s = size();
  Matrix gram(s, s);
  std::vector<Vector> grads(s);
  for (int j = 0; j < s; ++j) grads[j] = constraints_[j].grad(theta);
  for (int i = 0; i < s; ++i)
    for (int j = i; j < s; ++j) gram(i, j) = gram(j, i) = grads[i].dot(grads[j]);

  // In-place Cholesky so the pivots are visible; s is always small.
  double logdet_half = 0.0;
  for (int k = 0; k < s; ++k) {
    double pivot = gram(k, k);
    for (int i = 0; i < k; ++i) pivot -= gram(k, i) * gram(k, i);
    if (!(pivot >= 1e-12))
      throw DegenerateJacobianError("jacobian: Gram matrix pivot " + std::to_string(pivot) +
                                    " below 1e-12 (transversality failure)");
    const double lkk = std::sqrt(pivot);
    gram(k, k) = lkk;
    logdet_half += std::log(lkk);
    for (int row = k + 1; row < s; ++row) {
      double v = gram(row, k);
      for (int i = 0; i < k; ++i) v -= gram(row, i) * gram(k, i);
      gram(row, k) = v / lkk;
    }
  }
  return std::exp(logdet_half);
}

bool ConstraintSet::d_expansion_contains(const Vector& theta, double d) const {
  if (d < 0.0) throw std::invalid_argument("d_expansion_contains: d must be >= 0");
  return distance(theta) <= d;
}

Vector eval_constraints(const ConstraintSet& set, const Vector& theta) { return set.eval(theta); }
double distance(const ConstraintSet& set, const Vector& theta) { return set.distance(theta); }
double jacobian(const ConstraintSet& set, const Vector& theta) { return set.jacobian(theta); }
bool d_expansion_contains(const ConstraintSet& set, const Vector& theta, double d) {
  return set.d_expansion_contains(theta, d);
}

ConstraintSet with_weights(const ConstraintSet& set, const Vector& weights) {
  if (set.kind() == ConstraintKind::PositiveMeasure) {
    if (weights.size() != 1) throw std::invalid_argument("with_weights: expected a single weight");
    return ConstraintSet(set.constraints().front(), weights[0], *set.direct());
  }
  return ConstraintSet(set.constraints(), weights);
}

namespace catalog {

ConstraintSet simplex(int r) {
  if (r < 1) throw std::invalid_argument("simplex: r must be positive");
  ConstraintFn fn;
  fn.dim_in = r;
  fn.label = "simplex";
  fn.eval = [](const Vector& th) { return th.sum() - 1.0; };
  fn.grad = [r](const Vector&) { return Vector::Ones(r).eval(); };
  return ConstraintSet({fn}, Vector::Ones(1));
}

ConstraintSet line(const Matrix& basis) {
  const int r = static_cast<int>(basis.rows());
  const int s = static_cast<int>(basis.cols());
  if (r < 2 || s != r - 1)
    throw std::invalid_argument("line: need r-1 basis columns of the orthogonal complement");
  // Modified Gram-Schmidt; rank failure below 1e-12 means the columns do not
  // span an (r-1)-dimensional complement.
  Matrix q = basis;
  for (int j = 0; j < s; ++j) {
    for (int i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
    const double nrm = q.col(j).norm();
    if (nrm < 1e-12)
      throw std::invalid_argument("line: basis is rank deficient (not spanning the complement)");
    q.col(j) /= nrm;
  }
  std::vector<ConstraintFn> fns;
  for (int j = 0; j < s; ++j) {
    const Vector b = q.col(j);
    ConstraintFn fn;
    fn.dim_in = r;
    fn.label = "line_" + std::to_string(j + 1);
    fn.eval = [b](const Vector& th) { return b.dot(th); };
    fn.grad = [b](const Vector&) { return b; };
    fns.push_back(std::move(fn));
  }
  return ConstraintSet(std::move(fns), Vector::Ones(s));
}

ConstraintSet sphere(int r) {
  if (r < 1) throw std::invalid_argument("sphere: r must be positive");
  ConstraintFn fn;
  fn.dim_in = r;
  fn.label = "sphere";
  fn.eval = [](const Vector& th) { return th.squaredNorm() - 1.0; };
  fn.grad = [](const Vector& th) { return (2.0 * th).eval(); };
  return ConstraintSet({fn}, Vector::Ones(1));
}

ConstraintSet stiefel(int n, int k) {
  if (n < 1 || k < 1) throw std::invalid_argument("stiefel: dimensions must be positive");
  if (k > n) throw std::invalid_argument("stiefel: requires k <= n");
  std::vector<ConstraintFn> fns;
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      ConstraintFn fn;
      fn.dim_in = n * k;
      fn.label = "stiefel_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
      const double delta = (i == j) ? 1.0 : 0.0;
      fn.eval = [n, i, j, delta](const Vector& th) {
        return th.segment(static_cast<Eigen::Index>(i) * n, n)
                   .dot(th.segment(static_cast<Eigen::Index>(j) * n, n)) -
               delta;
      };
      fn.grad = [n, k, i, j](const Vector& th) {
        Vector g = Vector::Zero(static_cast<Eigen::Index>(n) * k);
        const auto ci = th.segment(static_cast<Eigen::Index>(i) * n, n);
        const auto cj = th.segment(static_cast<Eigen::Index>(j) * n, n);
        g.segment(static_cast<Eigen::Index>(i) * n, n) += cj;
        g.segment(static_cast<Eigen::Index>(j) * n, n) += ci;
        return g;
      };
      fns.push_back(std::move(fn));
    }
  }
  return ConstraintSet(std::move(fns), Vector::Ones(k * (k + 1) / 2));
}

ConstraintSet torus() {
  ConstraintFn fn;
  fn.dim_in = 3;
  fn.label = "torus";
  fn.eval = [](const Vector& th) {
    const double rho = std::sqrt(th[0] * th[0] + th[1] * th[1]);
    return (1.0 - rho) * (1.0 - rho) + th[2] * th[2] - 0.25;
  };
  fn.grad = [](const Vector& th) {
    const double rho = std::sqrt(th[0] * th[0] + th[1] * th[1]);
    Vector g(3);
    if (rho == 0.0) {
      // Gradient of (1-rho)^2 is undefined on the axis; the axis is far from
      // the torus, return the smooth part only.
      g << 0.0, 0.0, 2.0 * th[2];
      return g;
    }
    const double f = -2.0 * (1.0 - rho) / rho;
    g << f * th[0], f * th[1], 2.0 * th[2];
    return g;
  };
  return ConstraintSet({fn}, Vector::Ones(1));
}

ConstraintSet half_space(const Vector& a, double c) {
  const double nrm = a.norm();
  if (nrm == 0.0) throw std::invalid_argument("half_space: direction must be nonzero");
  const Vector ahat = a / nrm;
  const double chat = c / nrm;
  ConstraintFn fn;
  fn.dim_in = static_cast<int>(a.size());
  fn.label = "half_space";
  fn.eval = [ahat, chat](const Vector& th) { return std::max(ahat.dot(th) - chat, 0.0); };
  fn.grad = [ahat, chat](const Vector& th) {
    // Subgradient 0 on the boundary and inside.
    if (ahat.dot(th) - chat > 0.0) return ahat;
    return Vector::Zero(ahat.size()).eval();
  };
  DirectDistance dd;
  dd.norm_order = NormOrder::L2;
  dd.project = [ahat, chat](const Vector& th) {
    const double excess = std::max(ahat.dot(th) - chat, 0.0);
    return (th - excess * ahat).eval();
  };
  return ConstraintSet(std::move(fn), 1.0, std::move(dd));
}

ConstraintSet box_region(const Vector& lo, const Vector& hi) {
  if (lo.size() != hi.size() || ((hi - lo).array() <= 0.0).any())
    throw std::invalid_argument("box_region: need lo < hi componentwise");
  const int r = static_cast<int>(lo.size());
  auto clamp = [lo, hi](const Vector& th) {
    return th.cwiseMax(lo).cwiseMin(hi).eval();
  };
  ConstraintFn fn;
  fn.dim_in = r;
  fn.label = "box_region";
  fn.eval = [clamp](const Vector& th) { return (th - clamp(th)).norm(); };
  fn.grad = [clamp](const Vector& th) {
    const Vector diff = th - clamp(th);
    const double d = diff.norm();
    if (d == 0.0) return Vector::Zero(th.size()).eval();
    return (diff / d).eval();
  };
  DirectDistance dd;
  dd.norm_order = NormOrder::L2;
  dd.project = clamp;
  return ConstraintSet(std::move(fn), 1.0, std::move(dd));
}

ConstraintSet unconstrained(int r) {
  if (r < 1) throw std::invalid_argument("unconstrained: r must be positive");
  ConstraintFn fn;
  fn.dim_in = r;
  fn.label = "unconstrained";
  fn.eval = [](const Vector&) { return 0.0; };
  fn.grad = [r](const Vector&) { return Vector::Zero(r).eval(); };
  DirectDistance dd;
  dd.norm_order = NormOrder::L2;
  dd.project = [](const Vector& th) { return th; };
  return ConstraintSet(std::move(fn), 1.0, std::move(dd));
}

}  // namespace catalog
}  // namespace relaxhmc
