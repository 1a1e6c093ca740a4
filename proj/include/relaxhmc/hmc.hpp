#pragma once

#include "relaxhmc/targets.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace relaxhmc {

struct HmcConfig {
  double step_size = 0.1;  // eps; initial value when adapt_step_size is on
  int n_leapfrog = 50;     // L
  // If set, L = max(1, floor(integration_time / eps)) each iteration.
  std::optional<double> integration_time;
  Vector mass_diag;  // diagonal of M; empty means identity
  int n_iterations = 2000;
  int n_burnin = 1000;
  std::uint64_t seed = 0;
  bool adapt_step_size = true;  // dual averaging toward target_accept, burn-in only
  bool adapt_mass = false;      // diagonal from warmup variances
  double target_accept = 0.8;
  int thin = 1;  // store every thin-th post-burn-in draw
  std::optional<Vector> init;  // overrides the target's initializer
};

struct Chain {
  Matrix samples;            // stored draws (post-burn-in, thinned), n_kept x r
  double accept_rate = 0.0;  // over post-burn-in proposals
  Vector violations;         // distance(theta) per stored draw
  Vector hamiltonian_errors;  // |dH| per stored draw's proposal
  std::vector<char> accepted;  // proposal at the stored draw's iteration accepted?
  std::uint64_t seed_used = 0;
  int n_divergent = 0;       // post-burn-in proposals with |dH| > 1000
  int n_out_of_support = 0;  // post-burn-in trajectories that left the box
  double step_size_used = 0.0;
  int n_leapfrog_used = 0;
  int n_iterations = 0;  // total, including burn-in
  int thin = 1;
};

struct LeapfrogResult {
  Vector theta, p;
  double delta_h = 0.0;        // H(theta*,p*) - H(theta,p); +inf if divergent mid-way
  bool divergent = false;      // |dH| > 1000 or non-finite energy along the path
  bool out_of_support = false; // ran out of the box (implies divergent)
};

// L leapfrog steps of Hamiltonian dynamics for U = -log pi~ and kinetic
// energy p' M^-1 p / 2. Deterministic, reversible up to round-off.
LeapfrogResult leapfrog(const RelaxedTarget& target, Vector theta, Vector p, double eps,
                        int L, const Vector& mass_diag);

// HMC chain over the relaxed target. Bit-reproducible for a given config+seed.
Chain sample(const RelaxedTarget& target, const HmcConfig& config);

// 2/sqrt(xi_1) with xi_1 a power-iteration estimate of the largest
// absolute eigenvalue of the finite-difference Hessian of U at theta.
// Diagnostic only, never binding.
double stability_stepsize_hint(const RelaxedTarget& target, const Vector& theta);

}  // namespace relaxhmc
