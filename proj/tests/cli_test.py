#!/usr/bin/env python3
"""End-to-end checks of the relaxhmc command line tool.

Usage: cli_test.py /path/to/relaxhmc
"""

import json
import os
import subprocess
import sys
import tempfile

BIN = None
FAILURES = []


def run(args, env_extra=None, expect_rc=0):
    env = dict(os.environ)
    env.pop("RELAXHMC_SEED", None)
    if env_extra:
        env.update(env_extra)
    proc = subprocess.run([BIN] + args, capture_output=True, text=True, env=env, timeout=300)
    if proc.returncode != expect_rc:
        FAILURES.append(
            f"{' '.join(args)}: rc {proc.returncode}, expected {expect_rc}\n"
            f"stdout: {proc.stdout[:500]}\nstderr: {proc.stderr[:500]}"
        )
    return proc


def check(cond, msg):
    if not cond:
        FAILURES.append(msg)


def main():
    global BIN
    BIN = sys.argv[1]
    tmp = tempfile.mkdtemp(prefix="relaxhmc_cli_")

    # list: every experiment present with its lambda grid
    proc = run(["list"])
    for name in [
        "gaussian-inequality", "circle-benchmark", "sphere-gaussian", "sphere-t",
        "torus", "simplex", "factor-network", "rate-zero-measure", "rate-positive-measure",
    ]:
        check(name in proc.stdout, f"list: missing {name}")

    # validate: a minimal config resolves and echoes the full document
    good = os.path.join(tmp, "good.json")
    with open(good, "w") as f:
        json.dump({"experiment": "circle-benchmark"}, f)
    proc = run(["validate", good])
    doc = json.loads(proc.stdout)
    check(doc["lambda_grid"] == [1e-3, 1e-4, 1e-5], f"validate: lambda_grid {doc['lambda_grid']}")
    check(doc["replicates"] == 10, f"validate: replicates {doc['replicates']}")
    check(doc["hmc"]["iterations_per_lambda"] is not None, "validate: schedules not resolved")

    # validate: errors go to stderr, one per line, nonzero exit
    bad = os.path.join(tmp, "bad.json")
    with open(bad, "w") as f:
        json.dump({"experiment": "torus", "lambda_grid": [1e-4, 1e-3], "replicates": 0}, f)
    proc = run(["validate", bad], expect_rc=1)
    check("lambda_grid must be strictly decreasing" in proc.stderr,
          f"validate: missing grid error, stderr: {proc.stderr}")
    check("replicates" in proc.stderr, f"validate: missing replicates error: {proc.stderr}")
    check(proc.stdout == "", "validate: bad config should print nothing to stdout")

    # validate: malformed JSON reports the line
    mangled = os.path.join(tmp, "mangled.json")
    with open(mangled, "w") as f:
        f.write('{"experiment": "torus",\n  "lambda_grid": [1e-3,]\n}')
    proc = run(["validate", mangled], expect_rc=1)
    check("line" in proc.stderr, f"validate: parse error should name a line: {proc.stderr}")

    # run: unknown experiment exits 2
    proc = run(["run", "nonesuch", "--out", os.path.join(tmp, "x")], expect_rc=2)
    check("unknown experiment" in proc.stderr, f"run: unknown experiment message: {proc.stderr}")

    # run: tiny gaussian-inequality produces the full output set
    out_a = os.path.join(tmp, "a")
    run(["run", "gaussian-inequality", "--lambda", "0.05", "--iterations", "400",
         "--burnin", "200", "--seed", "5", "--out", out_a])
    for fname in ["samples.csv", "summary.json", "config_resolved.json", "density.csv"]:
        check(os.path.exists(os.path.join(out_a, fname)), f"run: missing {fname}")
    with open(os.path.join(out_a, "summary.json")) as f:
        summary = json.load(f)
    check(summary["experiment"] == "gaussian-inequality", "summary: experiment name")
    check(len(summary["per_lambda"]) == 1, "summary: one lambda row")
    row = summary["per_lambda"][0]
    for key in ["lambda", "n_kept", "accept_rate", "ess_per_component", "violation",
                "sharp_oracle", "relaxed_oracle", "diff_mean"]:
        check(key in row, f"summary: per_lambda missing {key}")
    check(row["n_kept"] == 200, f"summary: n_kept {row['n_kept']}")
    with open(os.path.join(out_a, "samples.csv")) as f:
        header = f.readline().strip().split(",")
    check(header[:4] == ["lambda", "replicate", "iteration", "theta_0"],
          f"samples.csv header: {header}")

    # run: replay from the emitted resolved config is bit-exact
    out_b = os.path.join(tmp, "b")
    run(["run", "gaussian-inequality", "--config", os.path.join(out_a, "config_resolved.json"),
         "--out", out_b])
    with open(os.path.join(out_a, "samples.csv"), "rb") as f:
        bytes_a = f.read()
    with open(os.path.join(out_b, "samples.csv"), "rb") as f:
        bytes_b = f.read()
    check(bytes_a == bytes_b, "replay: samples.csv differs from original run")

    # seed precedence: flag > config > environment > 0
    out_c = os.path.join(tmp, "c")
    run(["run", "gaussian-inequality", "--lambda", "0.05", "--iterations", "400",
         "--burnin", "200", "--out", out_c], env_extra={"RELAXHMC_SEED": "11"})
    with open(os.path.join(out_c, "config_resolved.json")) as f:
        check(json.load(f)["seed"] == 11, "seed: environment value not picked up")
    out_d = os.path.join(tmp, "d")
    run(["run", "gaussian-inequality", "--lambda", "0.05", "--iterations", "400",
         "--burnin", "200", "--seed", "3", "--out", out_d], env_extra={"RELAXHMC_SEED": "11"})
    with open(os.path.join(out_d, "config_resolved.json")) as f:
        check(json.load(f)["seed"] == 3, "seed: flag should override environment")

    if FAILURES:
        print(f"cli_test: {len(FAILURES)} failure(s)", file=sys.stderr)
        for msg in FAILURES:
            print(" - " + msg, file=sys.stderr)
        return 1
    print("cli_test: all checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
