"""Acceptance suite: one PASS/FAIL line per criterion, at full sizes and pinned tolerances.

The experiment-backed criteria run the default configuration of each CLI subcommand, which
already applies the rerun-once rule for statistical gates.
"""
import time
from fractions import Fraction

import numpy as np
import pytest

from hammersley.env import substream
from hammersley.exact import factorizes
from hammersley.harness.cli import main
from hammersley.harness.config import EXPERIMENTS, default_config
from hammersley.harness.experiments import run_experiment
from hammersley.theory import shape_boundary, shape_pp

pytestmark = pytest.mark.slow


def _run(name, **kw):
    t0 = time.perf_counter()
    res = run_experiment(default_config(name, **kw))
    return res, time.perf_counter() - t0


def _gates(res, names):
    vs = [res.verdict(n) for n in names]
    ok = all(v.passed for v in vs)
    detail = ", ".join(f"{v.name}={'ok' if v.passed else 'FAIL'}({_num(v.statistic)})" for v in vs)
    return ok, detail


def _num(x):
    return "n/a" if x is None else f"{x:.4g}"


def test_criterion_01_oracle_equivalence(record_criterion):
    res, dt = _run("oracle-selftest")
    ok, detail = _gates(res, ["boundary_dp_vs_enumeration", "bulk_dp_vs_enumeration"])
    n = res.rows[0]["instances"]
    ok = ok and dt < 60 and n == 200 * 25 * 9
    assert record_criterion(1, "DP passage times equal exhaustive enumeration (m,n<=5, 9 (p,u) pairs, 200 each)", ok,
                            f"{detail}, instances={n}, {dt:.1f}s < 60s")


def test_criterion_02_exact_burke(record_criterion):
    t0 = time.perf_counter()
    cases = [(Fraction(1, 2), Fraction(1, 2)), (Fraction(1, 4), Fraction(2, 3)), (Fraction(3, 4), Fraction(1, 3))]
    results = [factorizes(p, u) for p, u in cases]
    dt = time.perf_counter() - t0
    ok = all(results) and dt < 1.0
    assert record_criterion(2, "single-cell (alpha, I, J) law factorizes exactly in rational arithmetic", ok,
                            f"{sum(results)}/3 parameter pairs, {dt * 1000:.1f}ms < 1s")


def test_criterion_03_statistical_burke(record_criterion):
    res, dt = _run("burke")
    names = ["marginal_I_edges", "marginal_J_edges", "marginal_alpha_cells", "marginal_north_edge",
             "marginal_per_variable", "pairwise_path_variables", "pairwise_alpha_vs_path"]
    ok, detail = _gates(res, names)
    ok = ok and dt < 300 and res.config["dims"] == (64, 64) and res.config["samples"] == 100_000
    assert record_criterion(3, "staircase marginals within 3 sigma, >=96% pairwise independence tests pass", ok,
                            f"{detail}, {dt:.0f}s < 300s")


def test_criterion_04_variance_identity(record_criterion):
    res, dt = _run("identity")
    ok, detail = _gates(res, ["identity_residual_north", "A_estimators_agree_north"])
    ok = ok and dt < 600
    assert record_criterion(4, "Var(G) equals the identity rhs and the two A estimators agree (3 combined stderr)", ok,
                            f"{detail}, {dt:.0f}s < 600s")


def test_criterion_05_variance_exponent(record_criterion):
    res, dt = _run("variance-scan")
    ok, detail = _gates(res, ["variance_slope_in_range", "variance_slope_stderr"])
    ok = ok and all(r["samples"] >= 10_000 for r in res.rows) and dt < 1800
    assert record_criterion(5, "log-log slope of Var(G) in [0.55, 0.80] with stderr < 0.06", ok,
                            f"{detail}, {dt:.0f}s < 1800s")


def test_criterion_06_off_characteristic_clt(record_criterion):
    ok, parts = True, []
    for c in (-1.0, 1.0):
        res, dt = _run("clt", c=c)
        good, detail = _gates(res, ["ks_normal", "variance_slope_in_range"])
        ok = ok and good and dt < 900
        parts.append(f"c={c:+g}: {detail}, {dt:.0f}s < 900s")
    assert record_criterion(6, "KS < 0.05 at N=512 and Var slope in [0.8, 1.0] for c = -1 and c = +1", ok,
                            "; ".join(parts))


def test_criterion_07_flat_edge(record_criterion):
    res, dt = _run("flat-edge")
    ok, detail = _gates(res, ["P_full_at_least_0.99", "variance_nonincreasing", "variance_bound_decreasing",
                              "G_at_most_levels"])
    ok = ok and dt < 300
    assert record_criterion(7, "P{G = n} >= 0.99 at N=200; Var does not increase over N in {100,200,400}", ok,
                            f"{detail}, {dt:.0f}s < 300s")


def test_criterion_08_exit_tails(record_criterion):
    res, dt = _run("exit-tails")
    ok, detail = _gates(res, ["tail_slope_at_most_-2", "mean_xi_scaled_ratio", "mean_xi_e2_scaled_ratio"])
    ok = ok and dt < 1200
    assert record_criterion(8, "exit survival slope <= -2 at N=512; E[xi] N^(-2/3) max/min < 2", ok,
                            f"{detail}, {dt:.0f}s < 1200s")


def test_criterion_09_path_fluctuations(record_criterion):
    res, dt = _run("path-fluct")
    ok, detail = _gates(res, ["fluctuation_slope_in_range", "b_tail_slope_at_most_-2"])
    ok = ok and dt < 1200
    assert record_criterion(9, "transversal fluctuation slope in [0.5, 0.85]; b-tail slope <= -2", ok,
                            f"{detail}, {dt:.0f}s < 1200s")


def test_criterion_10_coupling_invariants(record_criterion):
    res, dt = _run("coupling")
    exact = [v for v in res.verdicts if v.kind == "exact"]
    bad = [v.name for v in exact if not v.passed]
    ok = not bad and dt < 300 and res.config["samples"] >= 1000
    assert record_criterion(10, "zero violations of the per-sample coupling and ordering invariants", ok,
                            f"{len(exact) - len(bad)}/{len(exact)} checks clean over {res.config['samples']} samples"
                            + (f", failing: {bad}" if bad else "") + f", {dt:.1f}s < 300s")


def test_criterion_11_closed_form(record_criterion):
    t0 = time.perf_counter()
    rng = substream(20240917, 11)
    grid = np.arange(1, 1000) / 1000.0
    worst = 0.0
    for _ in range(20):
        p = float(rng.uniform(0.05, 0.95))
        x = float(rng.uniform(p, 1.0))
        brute = min(shape_boundary(p, u, x, 1.0) for u in grid)
        worst = max(worst, abs(brute - shape_pp(p, x, 1.0)))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-4 and dt < 1.0
    assert record_criterion(11, "grid minimum over u of the boundary shape equals the closed form", ok,
                            f"max gap {worst:.2e} <= 1e-4, {dt * 1000:.0f}ms < 1s")


SMALL = {
    "variance-scan": ["--n-grid", "16,32,64", "--samples", "300"],
    "identity": ["--dims", "10,10", "--samples", "400"],
    "burke": ["--dims", "10,10", "--samples", "1000"],
    "clt": ["--n-grid", "32,64,128", "--samples", "200"],
    "flat-edge": ["--n-grid", "40,80", "--samples", "200"],
    "exit-tails": ["--n-grid", "32,64,128", "--samples", "200"],
    "path-fluct": ["--n-grid", "32,64,128", "--samples", "200"],
    "coupling": ["--dims", "16,16", "--samples", "150"],
    "shape-lln": ["--n-grid", "64", "--samples", "120"],
    "oracle-selftest": ["--n-grid", "3", "--samples", "100"],
}


def test_criterion_12_reproducibility(record_criterion, tmp_path):
    mismatched = []
    for name in EXPERIMENTS:
        for fmt in ("json", "csv"):
            blobs = []
            for run, workers in enumerate(("1", "2", "1")):
                out = tmp_path / f"{name}-{run}.{fmt}"
                main([name, *SMALL[name], "--seed", "77", "--workers", workers, "--format", fmt, "--out", str(out)])
                blobs.append(out.read_bytes())
            if not (blobs[0] == blobs[1] == blobs[2]):
                mismatched.append(f"{name}/{fmt}")
    ok = not mismatched
    assert record_criterion(12, "same seed and config give byte-identical files at 1 and 2 workers", ok,
                            f"{2 * len(EXPERIMENTS) - len(mismatched)}/{2 * len(EXPERIMENTS)} experiment/format pairs identical"
                            + (f", differing: {mismatched}" if mismatched else ""))
