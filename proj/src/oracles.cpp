#include "relaxhmc/oracles.hpp"

#include "relaxhmc/constraints.hpp"
#include "relaxhmc/errors.hpp"
#include "relaxhmc/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace relaxhmc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;
// Relaxation kernel tail cut: exp(-48) ~ 1.4e-21 relative mass.
constexpr double kUCut = 48.0;

// Streaming log-sum-exp accumulator for num = sum g e^l, den = sum e^l.
// Fixed summation order keeps results deterministic.
class RatioAccum {
 public:
  void add(double logw, double gval) {
    if (std::isnan(logw) || logw == kInf)
      throw NumericError("quadrature: non-finite integrand");
    if (logw == -kInf) return;
    if (!std::isfinite(gval)) throw NumericError("quadrature: non-finite test function");
    if (logw > max_) {
      const double sc = std::exp(max_ - logw);
      den_ *= sc;
      num_ *= sc;
      max_ = logw;
    }
    const double e = std::exp(logw - max_);
    den_ += e;
    num_ += gval * e;
  }

  double mean() const {
    if (den_ <= 0.0) throw NumericError("quadrature: total mass underflow");
    return num_ / den_;
  }

 private:
  double max_ = -kInf, den_ = 0.0, num_ = 0.0;
};

double penalty(const RelaxedTarget& t, const Vector& th) {
  const Vector nu = t.constraint_set().eval(th);
  const Vector& w = t.constraint_set().weights();
  double p = 0.0;
  for (int j = 0; j < t.constraint_set().size(); ++j)
    p += w[j] * std::abs(nu[j]) / t.lambda(j);
  return p;
}

// Relaxed log density with the relaxation kernel added back; the kernel is
// re-applied exactly per quadrature cell in the u coordinate.
double log_smooth(const RelaxedTarget& t, const Vector& th) {
  const double ld = t.log_density_or_neg_inf(th);
  if (ld == -kInf) return -kInf;
  return ld + penalty(t, th);
}

void check_unit_slope(const RelaxedTarget& t, const Vector& th, double u) {
  if (!t.in_support(th)) return;
  const double p = penalty(t, th);
  if (std::abs(p - std::abs(u)) > 1e-6 * (1.0 + std::abs(u)))
    throw NumericError("relaxed chart: constraint violation is not unit-slope in u");
}

// Largest rho >= 0 with rho * d inside the box (exit of the ray from the
// origin). Zero if the ray misses the box in some pinned coordinate.
double ray_box_exit(const Box& box, const Vector& d) {
  double r = kInf;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d[i] > 1e-300)
      r = std::min(r, box.hi[i] / d[i]);
    else if (d[i] < -1e-300)
      r = std::min(r, box.lo[i] / d[i]);
    else if (box.lo[i] > 0.0 || box.hi[i] < 0.0)
      return 0.0;
  }
  return std::max(0.0, r);
}

// Node grid over [lo, hi] with cell width targeting kUCut / cells, split at
// zero and at the pinned interior points.
std::vector<double> u_grid(double lo, double hi, int cells, const std::vector<double>& pins) {
  std::vector<double> cuts{lo, hi};
  if (lo < 0.0 && hi > 0.0) cuts.push_back(0.0);
  for (double p : pins)
    if (p > lo && p < hi) cuts.push_back(p);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const double target_h = kUCut / std::max(1, cells);
  std::vector<double> nodes;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    const int m = std::max(1, static_cast<int>(std::ceil((b - a) / target_h)));
    for (int k = 0; k < m; ++k) nodes.push_back(a + (b - a) * k / m);
  }
  nodes.push_back(cuts.back());
  return nodes;
}

struct Mass {
  int idx;
  double lc;
};

// Integrates the linear interpolant of the smooth factor against exp(-|u|)
// exactly on each cell; each cell turns into two weighted point masses at its
// end nodes. Cells never straddle zero (zero is always a grid cut).
std::vector<Mass> exp_masses(const std::vector<double>& u) {
  std::vector<Mass> out;
  out.reserve(2 * u.size());
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    const double a = u[i], b = u[i + 1], h = b - a;
    if (!(h > 0.0)) continue;
    double c0, c1;
    if (h < 1e-8) {
      c0 = c1 = 0.5 * h;
    } else {
      const double em = std::expm1(-h);
      c0 = (h + em) / h;
      c1 = (-em - h * (em + 1.0)) / h;
    }
    double base, wa = c0, wb = c1;
    if (a >= 0.0) {
      base = -a;
    } else {
      base = b;
      std::swap(wa, wb);
    }
    out.push_back({static_cast<int>(i), base + std::log(wa)});
    out.push_back({static_cast<int>(i + 1), base + std::log(wb)});
  }
  return out;
}

std::vector<double> scaled_pins(const std::vector<double>& nu_pins, double w, double lam,
                                bool both_signs) {
  std::vector<double> pins;
  for (double p : nu_pins) {
    pins.push_back(w * p / lam);
    if (both_signs) pins.push_back(-w * p / lam);
  }
  return pins;
}

OracleResult richardson(int grid, const std::function<double(int)>& value_at) {
  const double coarse = value_at(grid);
  const double fine = value_at(2 * grid);
  const double floor_eb =
      8.0 * std::numeric_limits<double>::epsilon() * (std::abs(fine) + 1.0);
  return {fine, std::max(std::abs(fine - coarse), floor_eb), OracleMethod::Quadrature};
}

double nu_scalar(const ConstraintSet& set, double x) {
  Vector v(1);
  v << x;
  return set.eval(v)[0];
}

// Boundary of {nu > 0} between a point with nu == 0 and one with nu > 0.
double bisect_boundary(const ConstraintSet& set, double at_zero, double at_pos) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (at_zero + at_pos);
    if (mid == at_zero || mid == at_pos) break;
    if (nu_scalar(set, mid) > 0.0)
      at_pos = mid;
    else
      at_zero = mid;
  }
  return at_zero;
}

//////////////////// sharp charts ////////////////////

double sharp_interval(const RelaxedTarget& t, const ScalarFn& g, int n) {
  const ConstraintSet& set = t.constraint_set();
  if (t.dim() != 1 || set.kind() != ConstraintKind::PositiveMeasure)
    throw UnsupportedOracleError("interval chart needs a 1-D positive-measure constraint");
  const Box& box = *t.box();
  const double A = box.lo[0], B = box.hi[0];
  const double nuA = nu_scalar(set, A), nuB = nu_scalar(set, B);
  double in_lo = A, in_hi = B;
  if (nuA > 0.0 && nuB > 0.0)
    throw NumericError("sharp interval oracle: constraint region misses the box");
  if (nuA == 0.0 && nuB > 0.0)
    in_hi = bisect_boundary(set, A, B);
  else if (nuB == 0.0 && nuA > 0.0)
    in_lo = bisect_boundary(set, B, A);
  RatioAccum acc;
  const double h = (in_hi - in_lo) / n;
  for (int k = 0; k <= n; ++k) {
    Vector th(1);
    th << in_lo + h * k;
    const double lw = t.base_log_density(th) + std::log(h * ((k == 0 || k == n) ? 0.5 : 1.0));
    acc.add(lw, lw > -kInf ? g(th) : 0.0);
  }
  return acc.mean();
}

double sharp_circle(const RelaxedTarget& t, const ScalarFn& g, int n) {
  const ConstraintSet& set = t.constraint_set();
  RatioAccum acc;
  const double lw_ang = std::log(2.0 * kPi / n);
  for (int i = 0; i < n; ++i) {
    const double phi = 2.0 * kPi * i / n;
    Vector th(2);
    th << std::cos(phi), std::sin(phi);
    if (!t.in_support(th)) continue;
    double lw = t.base_log_density(th) + lw_ang;
    if (!t.jacobian_factor()) lw -= std::log(set.jacobian(th));
    acc.add(lw, lw > -kInf ? g(th) : 0.0);
  }
  return acc.mean();
}

double sharp_sphere2(const RelaxedTarget& t, const ScalarFn& g, int n) {
  const ConstraintSet& set = t.constraint_set();
  RatioAccum acc;
  const int nth = std::max(2, n / 2);
  const double lw_phi = std::log(2.0 * kPi / n);
  for (int k = 0; k <= nth; ++k) {
    const double vth = kPi * k / nth;
    const double sv = std::sin(vth), cv = std::cos(vth);
    const double wth = (kPi / nth) * ((k == 0 || k == nth) ? 0.5 : 1.0);
    if (sv * wth <= 0.0) continue;
    const double lw_th = std::log(sv * wth);
    for (int i = 0; i < n; ++i) {
      const double phi = 2.0 * kPi * i / n;
      Vector th(3);
      th << sv * std::cos(phi), sv * std::sin(phi), cv;
      if (!t.in_support(th)) continue;
      double lw = t.base_log_density(th) + lw_phi + lw_th;
      if (!t.jacobian_factor()) lw -= std::log(set.jacobian(th));
      acc.add(lw, lw > -kInf ? g(th) : 0.0);
    }
  }
  return acc.mean();
}

double sharp_torus(const RelaxedTarget& t, const ScalarFn& g, int n) {
  const ConstraintSet& set = t.constraint_set();
  RatioAccum acc;
  const double lw_ang = 2.0 * std::log(2.0 * kPi / n);
  for (int i = 0; i < n; ++i) {
    const double a1 = 2.0 * kPi * i / n;
    const double ring = 1.0 + 0.5 * std::cos(a1);
    const double lw_ring = std::log(0.5 * ring);
    for (int j = 0; j < n; ++j) {
      const double a2 = 2.0 * kPi * j / n;
      Vector th(3);
      th << ring * std::cos(a2), ring * std::sin(a2), 0.5 * std::sin(a1);
      if (!t.in_support(th)) continue;
      double lw = t.base_log_density(th) + lw_ang + lw_ring;
      if (!t.jacobian_factor()) lw -= std::log(set.jacobian(th));
      acc.add(lw, lw > -kInf ? g(th) : 0.0);
    }
  }
  return acc.mean();
}

double sharp_simplex(const RelaxedTarget& t, const ScalarFn& g, int n) {
  const ConstraintSet& set = t.constraint_set();
  const int r = t.dim();
  RatioAccum acc;
  if (r == 2) {
    const double h = 1.0 / n;
    for (int k = 0; k <= n; ++k) {
      const double x = h * k;
      Vector th(2);
      th << x, 1.0 - x;
      if (!t.in_support(th)) continue;
      double lw = t.base_log_density(th) + std::log(h * ((k == 0 || k == n) ? 0.5 : 1.0));
      if (lw > -kInf && !t.jacobian_factor()) lw -= std::log(set.jacobian(th));
      acc.add(lw, lw > -kInf ? g(th) : 0.0);
    }
    return acc.mean();
  }
  if (r == 3) {
    // Unit square (a, b) -> (a, (1-a) b, (1-a)(1-b)), area element (1-a).
    const double h = 1.0 / n;
    for (int ka = 0; ka <= n; ++ka) {
      const double a = h * ka;
      const double wa = h * ((ka == 0 || ka == n) ? 0.5 : 1.0);
      if (1.0 - a <= 0.0) continue;
      for (int kb = 0; kb <= n; ++kb) {
        const double b = h * kb;
        const double wb = h * ((kb == 0 || kb == n) ? 0.5 : 1.0);
        Vector th(3);
        th << a, (1.0 - a) * b, (1.0 - a) * (1.0 - b);
        if (!t.in_support(th)) continue;
        double lw = t.base_log_density(th) + std::log(wa * wb * (1.0 - a));
        if (lw > -kInf && !t.jacobian_factor()) lw -= std::log(set.jacobian(th));
        acc.add(lw, lw > -kInf ? g(th) : 0.0);
      }
    }
    return acc.mean();
  }
  throw UnsupportedOracleError("simplex chart supports r in {2, 3}");
}

Matrix constraint_gradients(const ConstraintSet& set) {
  Matrix B(set.size(), set.dim());
  const Vector zero = Vector::Zero(set.dim());
  for (int j = 0; j < set.size(); ++j) B.row(j) = set.constraints()[j].grad(zero).transpose();
  return B;
}

Vector line_direction(const ConstraintSet& set) {
  const Matrix B = constraint_gradients(set);
  Eigen::FullPivLU<Matrix> lu(B);
  lu.setThreshold(1e-10);
  const Matrix K = lu.kernel();
  if (K.cols() != 1)
    throw UnsupportedOracleError("line chart needs constraints with a 1-D kernel");
  return K.col(0).normalized();
}

double sharp_line(const RelaxedTarget& t, const ScalarFn& g, int n) {
  const ConstraintSet& set = t.constraint_set();
  const Box& box = *t.box();
  const Vector u = line_direction(set);
  const double t_hi = ray_box_exit(box, u);
  const double t_lo = -ray_box_exit(box, -u);
  if (!(t_hi > t_lo)) throw NumericError("sharp line oracle: line misses the box");
  RatioAccum acc;
  const double h = (t_hi - t_lo) / n;
  for (int k = 0; k <= n; ++k) {
    const Vector th = (t_lo + h * k) * u;
    if (!t.in_support(th)) continue;
    double lw = t.base_log_density(th) + std::log(h * ((k == 0 || k == n) ? 0.5 : 1.0));
    if (lw > -kInf && !t.jacobian_factor()) lw -= std::log(set.jacobian(th));
    acc.add(lw, lw > -kInf ? g(th) : 0.0);
  }
  return acc.mean();
}

//////////////////// relaxed charts ////////////////////

double relaxed_affine(const RelaxedTarget& t, const ScalarFn& g, int n,
                      const std::vector<double>& nu_pins);

double relaxed_interval(const RelaxedTarget& t, const ScalarFn& g, int n,
                        const std::vector<double>& nu_pins) {
  const ConstraintSet& set = t.constraint_set();
  if (set.kind() != ConstraintKind::PositiveMeasure)
    return relaxed_affine(t, g, n, nu_pins);
  if (t.dim() != 1 || set.size() != 1)
    throw UnsupportedOracleError("interval chart needs a single 1-D constraint");
  const Box& box = *t.box();
  const double w = set.weights()[0];
  const double lam = t.lambda(0);
  const double A = box.lo[0], B = box.hi[0];
  const double nuA = nu_scalar(set, A), nuB = nu_scalar(set, B);
  RatioAccum acc;

  double in_lo = A, in_hi = B;
  bool has_in = true;
  if (nuA == 0.0 && nuB > 0.0)
    in_hi = bisect_boundary(set, A, B);
  else if (nuB == 0.0 && nuA > 0.0)
    in_lo = bisect_boundary(set, B, A);
  else if (nuA > 0.0 && nuB > 0.0)
    has_in = false;

  if (has_in && in_hi > in_lo) {
    const double h = (in_hi - in_lo) / n;
    for (int k = 0; k <= n; ++k) {
      Vector th(1);
      th << in_lo + h * k;
      const double lw =
          t.log_density_or_neg_inf(th) + std::log(h * ((k == 0 || k == n) ? 0.5 : 1.0));
      acc.add(lw, lw > -kInf ? g(th) : 0.0);
    }
  }

  // Violated side, rescaled coordinate u = w nu / lambda.
  auto add_out = [&](double x_from, double nu_from, double nu_to, double dir) {
    const double ua = w * nu_from / lam;
    const double ub = std::min(w * nu_to / lam, ua + kUCut);
    if (!(ub > ua)) return;
    // The u axis is the only coordinate here, so the grid must resolve the
    // base density across the whole violated segment, not just the exp scale.
    const int cells =
        std::max(n, static_cast<int>(std::ceil(kUCut / (ub - ua) * n)));
    const std::vector<double> un = u_grid(ua, ub, cells, scaled_pins(nu_pins, w, lam, false));
    const int m = static_cast<int>(un.size());
    std::vector<double> lw(m), gv(m, 0.0);
    for (int k = 0; k < m; ++k) {
      Vector th(1);
      th << x_from + dir * (un[k] - ua) * lam / w;
      const double ls = log_smooth(t, th);
      lw[k] = ls > -kInf ? ls + std::log(lam / w) : -kInf;
      if (lw[k] > -kInf) gv[k] = g(th);
    }
    Vector th(1);
    th << x_from + dir * (un[m - 1] - ua) * lam / w;
    check_unit_slope(t, th, un[m - 1]);
    for (const Mass& ms : exp_masses(un))
      if (lw[ms.idx] > -kInf) acc.add(ms.lc + lw[ms.idx], gv[ms.idx]);
  };

  if (has_in) {
    if (nuB > 0.0) add_out(in_hi, 0.0, nuB, +1.0);
    if (nuA > 0.0) add_out(in_lo, 0.0, nuA, -1.0);
  } else if (nuA < nuB) {
    add_out(A, nuA, nuB, +1.0);
  } else if (nuB < nuA) {
    add_out(B, nuB, nuA, -1.0);
  } else {
    throw NumericError("relaxed interval oracle: degenerate constraint");
  }
  return acc.mean();
}

double relaxed_circle(const RelaxedTarget& t, const ScalarFn& g, int n,
                      const std::vector<double>& nu_pins) {
  const ConstraintSet& set = t.constraint_set();
  if (set.size() != 1 || set.kind() != ConstraintKind::MeasureZero || t.dim() != 2)
    throw UnsupportedOracleError("circle chart needs a single sphere constraint in R^2");
  const Box& box = *t.box();
  const double w = set.weights()[0];
  const double lam = t.lambda(0);
  const std::vector<double> pins = scaled_pins(nu_pins, w, lam, true);
  const double u_floor = std::max(-kUCut, -w / lam);
  const double lw_const = std::log(2.0 * kPi / n) + std::log(lam / (2.0 * w));
  RatioAccum acc;
  bool checked = false;
  for (int i = 0; i < n; ++i) {
    const double phi = 2.0 * kPi * i / n;
    Vector dir(2);
    dir << std::cos(phi), std::sin(phi);
    const double rho_max = ray_box_exit(box, dir);
    if (rho_max <= 0.0) continue;
    const double u_hi = std::min(kUCut, w * (rho_max * rho_max - 1.0) / lam);
    if (!(u_hi > u_floor)) continue;
    const std::vector<double> un = u_grid(u_floor, u_hi, n / 2, pins);
    const int m = static_cast<int>(un.size());
    std::vector<double> lw(m), gv(m, 0.0);
    for (int k = 0; k < m; ++k) {
      const double rho2 = std::max(0.0, 1.0 + lam * un[k] / w);
      const Vector th = std::sqrt(rho2) * dir;
      const double ls = log_smooth(t, th);
      lw[k] = ls > -kInf ? ls + lw_const : -kInf;
      if (lw[k] > -kInf) gv[k] = g(th);
    }
    if (!checked && m > 1) {
      const double rho2 = std::max(0.0, 1.0 + lam * un[m - 1] / w);
      check_unit_slope(t, std::sqrt(rho2) * dir, un[m - 1]);
      checked = true;
    }
    for (const Mass& ms : exp_masses(un))
      if (lw[ms.idx] > -kInf) acc.add(ms.lc + lw[ms.idx], gv[ms.idx]);
  }
  return acc.mean();
}

double relaxed_sphere2(const RelaxedTarget& t, const ScalarFn& g, int n,
                       const std::vector<double>& nu_pins) {
  const ConstraintSet& set = t.constraint_set();
  if (set.size() != 1 || set.kind() != ConstraintKind::MeasureZero || t.dim() != 3)
    throw UnsupportedOracleError("sphere chart needs a single sphere constraint in R^3");
  const Box& box = *t.box();
  const double w = set.weights()[0];
  const double lam = t.lambda(0);
  const std::vector<double> pins = scaled_pins(nu_pins, w, lam, true);
  const double u_floor = std::max(-kUCut, -w / lam);
  const int nth = std::max(2, n / 2);
  RatioAccum acc;
  bool checked = false;
  for (int k = 0; k <= nth; ++k) {
    const double vth = kPi * k / nth;
    const double sv = std::sin(vth), cv = std::cos(vth);
    const double wth = (kPi / nth) * ((k == 0 || k == nth) ? 0.5 : 1.0);
    if (sv * wth <= 0.0) continue;
    const double lw_ang = std::log(sv * wth) + std::log(2.0 * kPi / n);
    for (int i = 0; i < n; ++i) {
      const double phi = 2.0 * kPi * i / n;
      Vector dir(3);
      dir << sv * std::cos(phi), sv * std::sin(phi), cv;
      const double rho_max = ray_box_exit(box, dir);
      if (rho_max <= 0.0) continue;
      const double u_hi = std::min(kUCut, w * (rho_max * rho_max - 1.0) / lam);
      if (!(u_hi > u_floor)) continue;
      const std::vector<double> un = u_grid(u_floor, u_hi, n / 4, pins);
      const int m = static_cast<int>(un.size());
      std::vector<double> lw(m), gv(m, 0.0);
      for (int q = 0; q < m; ++q) {
        const double rho2 = std::max(0.0, 1.0 + lam * un[q] / w);
        const double rho = std::sqrt(rho2);
        if (rho <= 0.0) {
          lw[q] = -kInf;
          continue;
        }
        const Vector th = rho * dir;
        const double ls = log_smooth(t, th);
        lw[q] = ls > -kInf
                    ? ls + lw_ang + std::log(lam / (2.0 * w)) + std::log(rho)
                    : -kInf;
        if (lw[q] > -kInf) gv[q] = g(th);
      }
      if (!checked && m > 1) {
        const double rho2 = std::max(0.0, 1.0 + lam * un[m - 1] / w);
        check_unit_slope(t, std::sqrt(rho2) * dir, un[m - 1]);
        checked = true;
      }
      for (const Mass& ms : exp_masses(un))
        if (lw[ms.idx] > -kInf) acc.add(ms.lc + lw[ms.idx], gv[ms.idx]);
    }
  }
  return acc.mean();
}

double relaxed_torus(const RelaxedTarget& t, const ScalarFn& g, int n,
                     const std::vector<double>& nu_pins) {
  const ConstraintSet& set = t.constraint_set();
  if (set.size() != 1 || set.kind() != ConstraintKind::MeasureZero || t.dim() != 3)
    throw UnsupportedOracleError("torus chart needs a single torus constraint in R^3");
  const Box& box = *t.box();
  const double w = set.weights()[0];
  const double lam = t.lambda(0);
  const std::vector<double> pins = scaled_pins(nu_pins, w, lam, true);
  const double u_floor = std::max(-kUCut, -0.25 * w / lam);
  const double t48 = std::sqrt(0.25 + lam * kUCut / w);
  const double lw_const =
      2.0 * std::log(2.0 * kPi / n) + std::log(lam / (2.0 * w));
  RatioAccum acc;
  bool checked = false;
  for (int i = 0; i < n; ++i) {
    const double alpha = 2.0 * kPi * i / n;
    Vector dxy(2);
    dxy << std::cos(alpha), std::sin(alpha);
    double rho_box = kInf;
    for (int c = 0; c < 2; ++c) {
      if (dxy[c] > 1e-300)
        rho_box = std::min(rho_box, box.hi[c] / dxy[c]);
      else if (dxy[c] < -1e-300)
        rho_box = std::min(rho_box, box.lo[c] / dxy[c]);
    }
    for (int j = 0; j < n; ++j) {
      const double beta = 2.0 * kPi * j / n;
      const double cb = std::cos(beta), sb = std::sin(beta);
      double t_max = t48;
      if (sb > 1e-12)
        t_max = std::min(t_max, box.hi[2] / sb);
      else if (sb < -1e-12)
        t_max = std::min(t_max, box.lo[2] / sb);
      if (cb > 1e-12)
        t_max = std::min(t_max, (rho_box - 1.0) / cb);
      else if (cb < -1e-12)
        t_max = std::min(t_max, 1.0 / (-cb));
      if (!(t_max > 0.0)) continue;
      const double u_hi = std::min(kUCut, w * (t_max * t_max - 0.25) / lam);
      if (!(u_hi > u_floor)) continue;
      const std::vector<double> un = u_grid(u_floor, u_hi, n / 4, pins);
      const int m = static_cast<int>(un.size());
      std::vector<double> lw(m), gv(m, 0.0);
      for (int q = 0; q < m; ++q) {
        const double tt = std::sqrt(std::max(0.0, 0.25 + lam * un[q] / w));
        const double rho = 1.0 + tt * cb;
        if (rho <= 0.0) {
          lw[q] = -kInf;
          continue;
        }
        Vector th(3);
        th << rho * dxy[0], rho * dxy[1], tt * sb;
        const double ls = log_smooth(t, th);
        lw[q] = ls > -kInf ? ls + lw_const + std::log(rho) : -kInf;
        if (lw[q] > -kInf) gv[q] = g(th);
      }
      if (!checked && m > 1) {
        const double tt = std::sqrt(std::max(0.0, 0.25 + lam * un[m - 1] / w));
        if (1.0 + tt * cb > 0.0) {
          Vector th(3);
          th << (1.0 + tt * cb) * dxy[0], (1.0 + tt * cb) * dxy[1], tt * sb;
          check_unit_slope(t, th, un[m - 1]);
          checked = true;
        }
      }
      for (const Mass& ms : exp_masses(un))
        if (lw[ms.idx] > -kInf) acc.add(ms.lc + lw[ms.idx], gv[ms.idx]);
    }
  }
  return acc.mean();
}

// Linear measure-zero constraints with mutually orthogonal gradients:
// tangent trapezoid lattice times per-constraint exp-weighted u grids.
double relaxed_affine(const RelaxedTarget& t, const ScalarFn& g, int n,
                      const std::vector<double>& nu_pins) {
  const ConstraintSet& set = t.constraint_set();
  if (set.kind() != ConstraintKind::MeasureZero)
    throw UnsupportedOracleError("affine chart needs measure-zero constraints");
  const int r = t.dim(), s = set.size(), dt = r - s;
  if (dt < 0 || dt > 2 || s > 2)
    throw UnsupportedOracleError("affine chart supports r <= 3 with s <= 2");
  const Box& box = *t.box();

  const Matrix B = constraint_gradients(set);
  Vector off(s), bn(s);
  const Vector zero = Vector::Zero(r);
  for (int j = 0; j < s; ++j) {
    off[j] = set.constraints()[j].eval(zero);
    bn[j] = B.row(j).norm();
    if (bn[j] < 1e-12) throw NumericError("affine chart: vanishing constraint gradient");
  }
  for (int j = 0; j < s; ++j)
    for (int k = j + 1; k < s; ++k)
      if (std::abs(B.row(j).dot(B.row(k))) > 1e-10 * bn[j] * bn[k])
        throw UnsupportedOracleError("affine chart needs orthogonal constraint gradients");

  Vector c = Vector::Zero(r);
  for (int j = 0; j < s; ++j) c -= (off[j] / (bn[j] * bn[j])) * B.row(j).transpose();
  {
    const Vector nu_c = set.eval(c);
    for (int j = 0; j < s; ++j)
      if (std::abs(nu_c[j]) > 1e-8 * (1.0 + std::abs(off[j])))
        throw UnsupportedOracleError("affine chart needs linear constraints");
  }

  Matrix T(r, std::max(dt, 1));
  if (dt > 0) {
    Eigen::FullPivLU<Matrix> lu(B);
    lu.setThreshold(1e-10);
    const Matrix K = lu.kernel();
    if (K.cols() != dt) throw NumericError("affine chart: rank-deficient constraints");
    Eigen::HouseholderQR<Matrix> qr(K);
    T = qr.householderQ() * Matrix::Identity(r, dt);
  }

  // Tangent ranges: projection of the box onto each tangent direction.
  std::vector<std::pair<Vector, double>> tlat;  // (tangent offset, log weight)
  if (dt == 0) {
    tlat.push_back({Vector::Zero(r), 0.0});
  } else {
    const int cells_t = dt == 2 ? std::max(8, n / 2) : n;
    std::vector<std::vector<std::pair<double, double>>> axes(dt);
    for (int i = 0; i < dt; ++i) {
      double plo = -T.col(i).dot(c), phi_ = plo;
      for (int k = 0; k < r; ++k) {
        plo += std::min(box.lo[k] * T(k, i), box.hi[k] * T(k, i));
        phi_ += std::max(box.lo[k] * T(k, i), box.hi[k] * T(k, i));
      }
      if (!(phi_ > plo)) throw NumericError("affine chart: box projection is empty");
      const double h = (phi_ - plo) / cells_t;
      for (int k = 0; k <= cells_t; ++k)
        axes[i].push_back({plo + h * k, std::log(h * ((k == 0 || k == cells_t) ? 0.5 : 1.0))});
    }
    if (dt == 1) {
      for (const auto& [tv, lwt] : axes[0]) {
        Vector offv = tv * T.col(0);
        tlat.push_back({offv, lwt});
      }
    } else {
      for (const auto& [t1, lw1] : axes[0])
        for (const auto& [t2, lw2] : axes[1])
          tlat.push_back({t1 * T.col(0) + t2 * T.col(1), lw1 + lw2});
    }
  }

  std::vector<std::vector<double>> un(s);
  std::vector<std::vector<Mass>> umass(s);
  double lw_elem = 0.0;
  for (int j = 0; j < s; ++j) {
    const double w = set.weights()[j], lam = t.lambda(j);
    // Clip u to the affine range of nu over the box, then grid so that the
    // cell width resolves the base density across the clipped span too.
    double nu_lo = off[j], nu_hi = off[j];
    for (int k = 0; k < r; ++k) {
      nu_lo += std::min(box.lo[k] * B(j, k), box.hi[k] * B(j, k));
      nu_hi += std::max(box.lo[k] * B(j, k), box.hi[k] * B(j, k));
    }
    const double ua = std::max(-kUCut, w * nu_lo / lam);
    const double ub = std::min(kUCut, w * nu_hi / lam);
    if (!(ub > ua)) throw NumericError("affine chart: box misses the constraint band");
    const int base_cells = s == 2 ? std::max(8, n / 4) : std::max(8, n / 2);
    const int cells =
        std::max(base_cells, static_cast<int>(std::ceil(kUCut / (ub - ua) * base_cells)));
    un[j] = u_grid(ua, ub, cells, scaled_pins(nu_pins, w, lam, true));
    umass[j] = exp_masses(un[j]);
    lw_elem += std::log(lam / (w * bn[j]));
  }
  std::vector<Vector> ncol(s);
  for (int j = 0; j < s; ++j)
    ncol[j] = B.row(j).transpose() * (t.lambda(j) / (set.weights()[j] * bn[j] * bn[j]));

  RatioAccum acc;
  bool checked = false;
  if (s == 1) {
    const int m = static_cast<int>(un[0].size());
    std::vector<double> lw(m), gv(m, 0.0);
    for (const auto& [toff, lwt] : tlat) {
      const Vector base = c + toff;
      for (int k = 0; k < m; ++k) {
        const Vector th = base + un[0][k] * ncol[0];
        const double ls = log_smooth(t, th);
        lw[k] = ls > -kInf ? ls + lwt + lw_elem : -kInf;
        if (lw[k] > -kInf) gv[k] = g(th);
      }
      if (!checked) {
        check_unit_slope(t, base + un[0][m - 1] * ncol[0], un[0][m - 1]);
        checked = true;
      }
      for (const Mass& ms : umass[0])
        if (lw[ms.idx] > -kInf) acc.add(ms.lc + lw[ms.idx], gv[ms.idx]);
    }
  } else {
    const int m1 = static_cast<int>(un[0].size()), m2 = static_cast<int>(un[1].size());
    Matrix lw(m1, m2);
    Matrix gv(m1, m2);
    for (const auto& [toff, lwt] : tlat) {
      const Vector base = c + toff;
      for (int k1 = 0; k1 < m1; ++k1)
        for (int k2 = 0; k2 < m2; ++k2) {
          const Vector th = base + un[0][k1] * ncol[0] + un[1][k2] * ncol[1];
          const double ls = log_smooth(t, th);
          lw(k1, k2) = ls > -kInf ? ls + lwt + lw_elem : -kInf;
          gv(k1, k2) = lw(k1, k2) > -kInf ? g(th) : 0.0;
        }
      if (!checked) {
        const Vector th = base + un[0][m1 - 1] * ncol[0];
        check_unit_slope(t, th, un[0][m1 - 1]);
        checked = true;
      }
      for (const Mass& a : umass[0])
        for (const Mass& b : umass[1])
          if (lw(a.idx, b.idx) > -kInf)
            acc.add(a.lc + b.lc + lw(a.idx, b.idx), gv(a.idx, b.idx));
    }
  }
  return acc.mean();
}

// Literal tensor-grid trapezoid over the box, log-domain accumulation.
double relaxed_box(const RelaxedTarget& t, const ScalarFn& g, int n) {
  const int r = t.dim();
  const Box& box = *t.box();
  std::vector<int> idx(r, 0);
  Vector h(r);
  for (int i = 0; i < r; ++i) {
    h[i] = (box.hi[i] - box.lo[i]) / n;
    if (!(h[i] > 0.0)) throw NumericError("box quadrature: empty box side");
  }
  RatioAccum acc;
  Vector th(r);
  while (true) {
    double lw = 0.0;
    for (int i = 0; i < r; ++i) {
      th[i] = box.lo[i] + h[i] * idx[i];
      lw += std::log(h[i] * ((idx[i] == 0 || idx[i] == n) ? 0.5 : 1.0));
    }
    lw += t.log_density_or_neg_inf(th);
    acc.add(lw, lw > -kInf ? g(th) : 0.0);
    int d = 0;
    while (d < r && ++idx[d] > n) idx[d++] = 0;
    if (d == r) break;
  }
  return acc.mean();
}

}  // namespace

TruncatedNormalMoments truncated_normal_moments(double mu, double sigma2, double upper) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("truncated_normal_moments: sigma2 <= 0");
  if (upper == kInf) return {mu, sigma2};
  if (std::isnan(upper) || upper == -kInf)
    throw std::invalid_argument("truncated_normal_moments: bad upper limit");
  const double sd = std::sqrt(sigma2);
  const double beta = (upper - mu) / sd;
  double mills;  // pdf(beta) / cdf(beta)
  if (beta < -30.0) {
    const double rr = -beta;
    mills = rr / (1.0 - 1.0 / (rr * rr) + 3.0 / std::pow(rr, 4) - 15.0 / std::pow(rr, 6));
  } else {
    const double cdf = 0.5 * std::erfc(-beta / std::sqrt(2.0));
    const double pdf = std::exp(-0.5 * beta * beta) / std::sqrt(2.0 * kPi);
    mills = pdf / cdf;
  }
  const double mean = mu - sd * mills;
  const double variance = sigma2 * (1.0 - beta * mills - mills * mills);
  return {mean, variance};
}

Matrix vmf_circle_sample(const Vector& F, double sigma2, int n, std::uint64_t seed) {
  if (F.size() != 2 || std::abs(F.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("vmf_circle_sample: F must be a unit vector in R^2");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("vmf_circle_sample: sigma2 <= 0");
  if (n < 1) throw std::invalid_argument("vmf_circle_sample: n < 1");
  const double kappa = 1.0 / sigma2;
  const double mu = std::atan2(F[1], F[0]);
  Rng rng(seed);
  Matrix out(n, 2);
  if (kappa < 1e-8) {
    for (int i = 0; i < n; ++i) {
      const double a = 2.0 * kPi * rng.uniform();
      out(i, 0) = std::cos(a);
      out(i, 1) = std::sin(a);
    }
    return out;
  }
  // Best-Fisher rejection with a wrapped Cauchy envelope.
  const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
  const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
  const double rb = (1.0 + rho * rho) / (2.0 * rho);
  for (int i = 0; i < n; ++i) {
    double f;
    while (true) {
      const double z = std::cos(kPi * rng.uniform());
      f = (1.0 + rb * z) / (rb + z);
      const double cc = kappa * (rb - f);
      const double u2 = rng.uniform_pos();
      if (cc * (2.0 - cc) - u2 > 0.0) break;
      if (std::log(cc / u2) + 1.0 - cc >= 0.0) break;
    }
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const double a = mu + sign * std::acos(std::clamp(f, -1.0, 1.0));
    out(i, 0) = std::cos(a);
    out(i, 1) = std::sin(a);
  }
  return out;
}

Matrix torus_uniform_sample(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("torus_uniform_sample: n < 1");
  Rng rng(seed);
  Matrix out(n, 3);
  for (int i = 0; i < n; ++i) {
    double a1;
    while (true) {
      a1 = 2.0 * kPi * rng.uniform();
      if (1.5 * rng.uniform() < 1.0 + 0.5 * std::cos(a1)) break;
    }
    const double a2 = 2.0 * kPi * rng.uniform();
    const double ring = 1.0 + 0.5 * std::cos(a1);
    out(i, 0) = ring * std::cos(a2);
    out(i, 1) = ring * std::sin(a2);
    out(i, 2) = 0.5 * std::sin(a1);
  }
  return out;
}

double bessel_i1_over_i0(double x) {
  if (x < 0.0) return -bessel_i1_over_i0(-x);
  const double q = 0.25 * x * x;
  double t0 = 1.0, t1 = 0.5 * x;
  double s0 = t0, s1 = t1;
  for (int k = 1; k < 2000; ++k) {
    t0 *= q / (static_cast<double>(k) * k);
    t1 *= q / (static_cast<double>(k) * (k + 1.0));
    s0 += t0;
    s1 += t1;
    if (t0 < 1e-12 * s0 && t1 < 1e-12 * (s1 + 1e-300)) break;
  }
  return s1 / s0;
}

OracleResult sharp_expectation_quadrature(const RelaxedTarget& target, const ScalarFn& g,
                                          int grid) {
  if (grid < 64) throw std::invalid_argument("sharp quadrature: grid must be >= 64");
  if ((target.geometry() == Geometry::Interval || target.geometry() == Geometry::Line) &&
      !target.box())
    throw UnsupportedOracleError("this sharp chart needs a bounded box");
  auto eval = [&](int n) -> double {
    switch (target.geometry()) {
      case Geometry::Interval:
        return sharp_interval(target, g, n);
      case Geometry::Circle:
        return sharp_circle(target, g, n);
      case Geometry::Sphere2:
        return sharp_sphere2(target, g, n);
      case Geometry::Torus:
        return sharp_torus(target, g, n);
      case Geometry::Simplex:
        return sharp_simplex(target, g, n);
      case Geometry::Line:
        return sharp_line(target, g, n);
      case Geometry::None:
        break;
    }
    throw UnsupportedOracleError("no sharp parameterization for this target");
  };
  return richardson(grid, eval);
}

OracleResult sharp_expectation_quadrature(const ModelSpec& model, const ScalarFn& g, int grid) {
  const RelaxedTarget target = make_model(model, Vector::Ones(1));
  return sharp_expectation_quadrature(target, g, grid);
}

OracleResult relaxed_expectation_quadrature(const RelaxedTarget& target, const ScalarFn& g,
                                            int grid,
                                            const std::vector<double>& nu_breakpoints) {
  if (grid < 8) throw std::invalid_argument("relaxed quadrature: grid must be >= 8");
  if (target.dim() > 3)
    throw UnsupportedOracleError("relaxed quadrature supports r <= 3 only");
  if (!target.box() || !target.box()->lo.allFinite() || !target.box()->hi.allFinite())
    throw UnsupportedOracleError("relaxed quadrature needs a bounded box");
  auto eval = [&](int n) -> double {
    switch (target.geometry()) {
      case Geometry::Interval:
        return relaxed_interval(target, g, n, nu_breakpoints);
      case Geometry::Circle:
        return relaxed_circle(target, g, n, nu_breakpoints);
      case Geometry::Sphere2:
        return relaxed_sphere2(target, g, n, nu_breakpoints);
      case Geometry::Torus:
        return relaxed_torus(target, g, n, nu_breakpoints);
      case Geometry::Simplex:
      case Geometry::Line:
        return relaxed_affine(target, g, n, nu_breakpoints);
      case Geometry::None:
        return relaxed_box(target, g, n);
    }
    throw std::logic_error("relaxed_expectation_quadrature: unreachable");
  };
  return richardson(grid, eval);
}

}  // namespace relaxhmc
