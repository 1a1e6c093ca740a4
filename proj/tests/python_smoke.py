#!/usr/bin/env python3
"""Smoke tests for the relaxhmc python module."""

import json
import math
import sys

import numpy as np

import relaxhmc


def main():
    failures = []

    def check(cond, msg):
        if not cond:
            failures.append(msg)

    # Target construction and density evaluation.
    t = relaxhmc.gaussian_inequality(ybar=1.2, n=100, lambdas=[1e-2])
    check(t.dim == 1, f"dim {t.dim}")
    theta = np.array([1.3])
    check(abs(t.distance(theta) - 0.3) < 1e-12, f"distance {t.distance(theta)}")
    inside = np.array([0.7])
    check(t.distance(inside) == 0.0, "distance should vanish inside the region")

    # Gradient consistency at a smooth point.
    h = 1e-6
    g = t.grad_log_density(theta)[0]
    fd = (t.log_density(theta + h) - t.log_density(theta - h)) / (2 * h)
    check(abs(g - fd) < 1e-4 * max(1.0, abs(g)), f"gradient {g} vs fd {fd}")

    # Sphere target: constraint vector and support box.
    F = np.array([1.0, 1.0]) / math.sqrt(2.0)
    circ = relaxhmc.sphere_gaussian(F, lambdas=[1e-3])
    check(abs(circ.constraints(F)[0]) < 1e-12, "F lies on the circle")
    check(not circ.in_support(np.array([2.0, 0.0])), "outside the box")

    # Sampling: shape, determinism, diagnostics.
    chain = relaxhmc.sample(circ, n_iterations=600, n_burnin=200, n_leapfrog=40, seed=4)
    check(chain.samples.shape == (400, 2), f"samples shape {chain.samples.shape}")
    check(0.0 < chain.accept_rate <= 1.0, f"accept_rate {chain.accept_rate}")
    radii = np.linalg.norm(chain.samples, axis=1)
    check(np.all(np.abs(radii - 1.0) < 0.2), "draws should hug the unit circle")
    chain2 = relaxhmc.sample(circ, n_iterations=600, n_burnin=200, n_leapfrog=40, seed=4)
    check(np.array_equal(chain.samples, chain2.samples), "same seed, same draws")

    # Oracles.
    mean, var = relaxhmc.truncated_normal_moments(0.0, 1.0, 0.0)
    check(abs(mean + math.sqrt(2.0 / math.pi)) < 1e-12, f"truncated mean {mean}")
    check(var > 0.0, "truncated variance positive")
    sharp = relaxhmc.sharp_expectation(circ, lambda th: th[0] + th[1], grid=512)
    a10 = relaxhmc.bessel_i1_over_i0(10.0)
    check(abs(sharp.value - a10 * (F[0] + F[1])) < 1e-6,
          f"sharp oracle {sharp.value} vs vMF mean {a10 * (F[0] + F[1])}")
    relaxed = relaxhmc.relaxed_expectation(circ, lambda th: th[0] + th[1], grid=512)
    check(abs(relaxed.value - sharp.value) < 0.05, "relaxed oracle near the sharp one")

    # ESS: near-iid series should report a sizable fraction of n.
    rng = np.random.default_rng(0)
    series = rng.normal(size=4000)
    check(relaxhmc.ess(series) > 2000, f"ess {relaxhmc.ess(series)}")

    # Experiment runner round trip.
    cfg = {
        "experiment": "gaussian-inequality",
        "lambda_grid": [0.05],
        "seed": 2,
        "hmc": {"n_iterations": 400, "n_burnin": 200},
    }
    summary = json.loads(relaxhmc.run_experiment(json.dumps(cfg)))
    check(summary["experiment"] == "gaussian-inequality", "summary experiment")
    check(summary["per_lambda"][0]["n_kept"] == 200, "summary n_kept")
    check("rate-zero-measure" in relaxhmc.experiment_names(), "experiment_names")

    # Config errors surface as exceptions.
    try:
        relaxhmc.run_experiment(json.dumps({"experiment": "torus", "replicates": 0}))
        failures.append("invalid config should raise")
    except ValueError as e:
        check("replicates" in str(e), f"error message: {e}")

    if failures:
        print(f"python_smoke: {len(failures)} failure(s)", file=sys.stderr)
        for msg in failures:
            print(" - " + msg, file=sys.stderr)
        return 1
    print("python_smoke: all checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
