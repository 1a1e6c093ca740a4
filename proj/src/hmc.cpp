#include "relaxhmc/hmc.hpp"

#include "relaxhmc/errors.hpp"
#include "relaxhmc/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace relaxhmc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDivergenceThreshold = 1000.0;

double kinetic(const Vector& p, const Vector& inv_mass) {
  return 0.5 * p.array().square().matrix().dot(inv_mass);
}

// Dual averaging of Hoffman & Gelman; shrinks toward mu = log(10 eps0).
struct DualAveraging {
  double mu = 0.0, log_eps = 0.0, log_eps_bar = 0.0, h_bar = 0.0;
  double gamma = 0.05, t0 = 10.0, kappa = 0.75;
  int m = 0;

  explicit DualAveraging(double eps0)
      : mu(std::log(10.0 * eps0)), log_eps(std::log(eps0)) {}

  void update(double accept_prob, double target) {
    ++m;
    const double frac = 1.0 / (m + t0);
    h_bar = (1.0 - frac) * h_bar + frac * (target - accept_prob);
    log_eps = mu - std::sqrt(static_cast<double>(m)) / gamma * h_bar;
    const double eta = std::pow(static_cast<double>(m), -kappa);
    log_eps_bar = eta * log_eps + (1.0 - eta) * log_eps_bar;
  }

  double current() const { return std::exp(log_eps); }
  double frozen() const { return std::exp(log_eps_bar); }
};

}  // namespace

LeapfrogResult leapfrog(const RelaxedTarget& target, Vector theta, Vector p, double eps,
                        int L, const Vector& mass_diag) {
  if (eps <= 0.0) throw std::invalid_argument("leapfrog: eps must be positive");
  if (L < 1) throw std::invalid_argument("leapfrog: L must be >= 1");
  const int r = target.dim();
  Vector inv_mass = mass_diag.size() == 0 ? Vector::Ones(r)
                                          : mass_diag.cwiseInverse().eval();
  if (inv_mass.size() != r) throw std::invalid_argument("leapfrog: mass_diag dimension mismatch");

  LeapfrogResult res;
  const double u0 = -target.log_density_or_neg_inf(theta);
  if (!std::isfinite(u0)) throw InvalidStartError("leapfrog: non-finite density at start");
  const double h0 = u0 + kinetic(p, inv_mass);

  auto bail = [&](bool oob) {
    res.theta = std::move(theta);
    res.p = std::move(p);
    res.delta_h = kInf;
    res.divergent = true;
    res.out_of_support = oob;
    return res;
  };

  p -= 0.5 * eps * (-target.grad_log_relaxed_density(theta));
  for (int step = 0; step < L; ++step) {
    theta += eps * inv_mass.cwiseProduct(p);
    if (!target.in_support(theta)) return bail(true);
    const double u = -target.log_relaxed_density(theta);
    if (!std::isfinite(u)) return bail(false);
    const Vector grad_u = -target.grad_log_relaxed_density(theta);
    if (!grad_u.allFinite()) return bail(false);
    p -= (step + 1 < L ? eps : 0.5 * eps) * grad_u;
  }

  const double h1 = -target.log_relaxed_density(theta) + kinetic(p, inv_mass);
  res.delta_h = h1 - h0;
  res.divergent = !(std::abs(res.delta_h) <= kDivergenceThreshold);
  res.theta = std::move(theta);
  res.p = std::move(p);
  return res;
}

Chain sample(const RelaxedTarget& target, const HmcConfig& config) {
  const int r = target.dim();
  if (config.n_iterations < 1) throw std::invalid_argument("sample: n_iterations must be >= 1");
  if (config.n_burnin < 0 || config.n_burnin >= config.n_iterations)
    throw std::invalid_argument("sample: need 0 <= n_burnin < n_iterations");
  if (config.step_size <= 0.0) throw std::invalid_argument("sample: step_size must be positive");
  if (config.n_leapfrog < 1) throw std::invalid_argument("sample: n_leapfrog must be >= 1");
  if (config.thin < 1) throw std::invalid_argument("sample: thin must be >= 1");

  Vector theta = config.init ? *config.init : target.init_point();
  if (theta.size() != r)
    throw InvalidStartError("sample: no initial point of the right dimension");
  if (!std::isfinite(target.log_density_or_neg_inf(theta)))
    throw InvalidStartError("sample: initial point has non-finite density");

  Vector mass = config.mass_diag.size() == 0 ? Vector::Ones(r) : config.mass_diag;
  if (mass.size() != r || (mass.array() <= 0.0).any())
    throw std::invalid_argument("sample: mass_diag must be positive with length r");

  Rng rng(config.seed);
  double eps = config.step_size;
  DualAveraging da(eps);

  const int n_burnin = config.n_burnin;
  const int n_kept_iters = config.n_iterations - n_burnin;
  const int n_stored = (n_kept_iters + config.thin - 1) / config.thin;

  Chain chain;
  chain.seed_used = config.seed;
  chain.n_iterations = config.n_iterations;
  chain.thin = config.thin;
  chain.samples.resize(n_stored, r);
  chain.violations.resize(n_stored);
  chain.hamiltonian_errors.resize(n_stored);
  chain.accepted.resize(n_stored);

  // Warmup variance window for optional mass adaptation.
  const int mass_lo = n_burnin / 2, mass_hi = 3 * n_burnin / 4;
  Vector wsum = Vector::Zero(r), wsq = Vector::Zero(r);
  int wcount = 0;

  long burnin_accepts = 0, kept_accepts = 0;
  int stored = 0;

  for (int iter = 0; iter < config.n_iterations; ++iter) {
    const bool warm = iter < n_burnin;
    int L = config.n_leapfrog;
    if (config.integration_time)
      L = std::max(1, std::min(100000, static_cast<int>(*config.integration_time / eps)));

    Vector p(r);
    for (int i = 0; i < r; ++i) p[i] = rng.normal() * std::sqrt(mass[i]);

    LeapfrogResult prop = leapfrog(target, theta, p, eps, L, mass);
    const double alpha = prop.divergent ? 0.0 : std::min(1.0, std::exp(-prop.delta_h));
    const bool accept = rng.uniform() < alpha;
    if (accept) theta = std::move(prop.theta);

    if (warm) {
      burnin_accepts += accept;
      if (config.adapt_step_size) {
        da.update(alpha, config.target_accept);
        eps = da.current();
      }
      if (config.adapt_mass && iter >= mass_lo && iter < mass_hi) {
        wsum += theta;
        wsq += theta.array().square().matrix();
        ++wcount;
        if (iter + 1 == mass_hi && wcount > 10) {
          for (int i = 0; i < r; ++i) {
            const double var = wsq[i] / wcount - (wsum[i] / wcount) * (wsum[i] / wcount);
            mass[i] = 1.0 / std::max(var, 1e-12);
          }
        }
      }
      if (iter + 1 == n_burnin) {
        if (config.adapt_step_size) eps = da.frozen();
        if (n_burnin >= 100 &&
            static_cast<double>(burnin_accepts) / n_burnin < 0.001)
          throw AdaptationFailureError("sample: warmup accepted < 0.1% of proposals");
      }
    } else {
      kept_accepts += accept;
      chain.n_divergent += prop.divergent && !prop.out_of_support;
      chain.n_out_of_support += prop.out_of_support;
      const int kept_index = iter - n_burnin;
      if (kept_index % config.thin == 0) {
        chain.samples.row(stored) = theta.transpose();
        chain.violations[stored] = target.constraint_set().distance(theta);
        chain.hamiltonian_errors[stored] =
            std::isfinite(prop.delta_h) ? std::abs(prop.delta_h) : kInf;
        chain.accepted[stored] = accept;
        ++stored;
      }
    }
  }

  chain.accept_rate = static_cast<double>(kept_accepts) / n_kept_iters;
  chain.step_size_used = eps;
  chain.n_leapfrog_used =
      config.integration_time
          ? std::max(1, std::min(100000, static_cast<int>(*config.integration_time / eps)))
          : config.n_leapfrog;
  return chain;
}

double stability_stepsize_hint(const RelaxedTarget& target, const Vector& theta) {
  if (!std::isfinite(target.log_density_or_neg_inf(theta)))
    throw std::invalid_argument("stability_stepsize_hint: non-finite density at theta");
  const int r = target.dim();
  const double h = 1e-5 * (1.0 + theta.norm());

  auto hessian_vec = [&](const Vector& v) -> Vector {
    const Vector vhat = v / v.norm();
    const Vector gp = -target.grad_log_relaxed_density(theta + h * vhat);
    const Vector gm = -target.grad_log_relaxed_density(theta - h * vhat);
    return (gp - gm) / (2.0 * h);
  };

  // Deterministic start, slightly tilted so it is not an eigenvector of
  // typical symmetric Hessians.
  Vector v(r);
  for (int i = 0; i < r; ++i) v[i] = 1.0 + 0.01 * i;
  v /= v.norm();

  double xi = 0.0;
  for (int it = 0; it < 60; ++it) {
    Vector hv = hessian_vec(v);
    if (!hv.allFinite()) throw NumericError("stability_stepsize_hint: non-finite Hessian");
    const double nrm = hv.norm();
    if (nrm == 0.0) throw NumericError("stability_stepsize_hint: zero curvature");
    xi = nrm;
    v = hv / nrm;
  }
  return 2.0 / std::sqrt(xi);
}

}  // namespace relaxhmc
