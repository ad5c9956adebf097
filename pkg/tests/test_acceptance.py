"""Acceptance suite: one test per criterion, each at its stated tolerance.

All stochastic criteria share one master seed, fixed before any of them was run.
"""
import json
import subprocess
import sys
import time

import numpy as np
import pytest

from caperc.cli import random_instance
from caperc.connectivity import ca_oracle, ca_partition
from caperc.experiments import (
    exp_black_threshold,
    exp_critical_window,
    exp_giant_lln,
    exp_poisson_small_components,
    exp_regime_scaling,
    exp_tree_census,
)
from caperc.model import ColoredMultigraph
from caperc.rng import derive_seed, generator

SEED = 20261016
WORKERS = 1

pytestmark = pytest.mark.acceptance


def _detail(rep, checks):
    return "; ".join(
        f"{v.check}{'' if v.n is None else f'@{v.n}'}={v.observed}" for v in rep.verdicts if v.check in checks
    )


def _all(rep, checks):
    vs = [v for v in rep.verdicts if v.check in checks]
    assert vs, f"no verdicts named {checks}"
    return all(v.passed for v in vs)


def test_c01_oracle_equivalence(criterion):
    rng = generator(derive_seed(SEED, 1, "verify"))
    t0 = time.perf_counter()
    bad = 0
    for _ in range(1000):
        g = random_instance(rng, max_n=12, ks=(2, 3, 4))
        bad += ca_partition(g).labeling != ca_oracle(g).labeling
    wall = time.perf_counter() - t0
    ok = criterion(1, "oracle equivalence", bad == 0 and wall < 10, f"{bad} mismatches / 1000, {wall:.2f}s")
    assert ok


def test_c02_edge_monotonicity(criterion):
    rng = generator(derive_seed(SEED, 2, "verify"))
    t0 = time.perf_counter()
    violations = done = 0
    while done < 500:
        g = random_instance(rng, max_n=12, ks=(2, 3, 4))
        if g.n < 2:
            continue
        done += 1
        before = ca_partition(g).labeling.num_components
        u, v = sorted(int(x) for x in rng.choice(g.n, size=2, replace=False))
        c = int(rng.integers(1, g.k + 1))
        layers = [g.layer(i).tolist() for i in range(1, g.k + 1)]
        if [u, v] not in layers[c - 1]:
            layers[c - 1].append([u, v])
        h = ColoredMultigraph.from_edges(g.n, layers)
        violations += ca_partition(h).labeling.num_components > before
    wall = time.perf_counter() - t0
    ok = criterion(2, "edge monotonicity", violations == 0 and wall < 10,
                   f"{violations} increases / 500, {wall:.2f}s")
    assert ok


def test_c03_tree_count_law(criterion):
    rep = exp_tree_census(0.5, 10**5, 100, SEED, WORKERS, s_check=10, rel_tol=0.05, size_bound=60)
    checks = {f"tree_count_s{s}" for s in range(1, 11)} | {"no_large_components"}
    ok = criterion(3, "tree-count law", _all(rep, checks), _detail(rep, {"no_large_components"})
                   + "; worst rel err " + f"{max(abs(v.observed / v.predicted - 1) for v in rep.verdicts if v.check.startswith('tree_count')):.4f}")
    assert ok


def test_c04_giant_lln(criterion):
    rep = exp_giant_lln(0.25, (10**5, 10**6), 30, SEED, WORKERS)
    checks = {"normalised_in_band", "normalised_trend"}
    ok = criterion(4, "giant LLN", _all(rep, checks), _detail(rep, checks))
    assert ok


def test_c05_subcritical_bound(criterion):
    rep = exp_poisson_small_components((0.4, 0.4), 10**5, 500, SEED, WORKERS)
    checks = {"bounded_by_k", "N2_dispersion"}
    ok = criterion(5, "subcritical bound", _all(rep, checks), _detail(rep, checks))
    assert ok


def test_c06_intermediate_regime(criterion):
    rep = exp_regime_scaling((1.3, 0.4), (10**4, 3 * 10**4, 10**5), 30, SEED, WORKERS, log_spread=0.25)
    checks = {"log_normalisation_flat", "linear_normalisation_vanishes"}
    ok = criterion(6, "intermediate regime", _all(rep, checks), _detail(rep, checks))
    assert ok


def test_c07_critical_window_ratio(criterion):
    rep = exp_critical_window("inv-log", 0.5, (10**5, 10**6, 4 * 10**6), 30, SEED, WORKERS,
                              ratio_band=(0.5, 1.6))
    checks = {"ratio_in_band", "ratio_trend"}
    ok = criterion(7, "critical window ratio", _all(rep, checks), _detail(rep, checks))
    assert ok


def test_c08_critical_tightness(criterion):
    rep = exp_critical_window("power:0.5", 0.5, (10**4, 10**5, 10**6), 50, SEED, WORKERS, quantile_slack=1)
    checks = {"q99_flat"}
    ok = criterion(8, "critical tightness", _all(rep, checks), _detail(rep, checks))
    assert ok


def test_c09_black_threshold(criterion):
    rep = exp_black_threshold(0.5, 0.05, (10**5, 10**6, 10**7), 30, SEED, WORKERS, ratio_band=(0.5, 1.8))
    checks = {"ratio_in_band", "ratio_trend"}
    ok = criterion(9, "black threshold", _all(rep, checks), _detail(rep, checks))
    assert ok


def _preset_bytes(tmp_path, tag, workers):
    reports = [
        exp_regime_scaling((1.3, 0.4), (2000, 5000), 6, SEED, workers),
        exp_poisson_small_components((0.4, 0.4), 3000, 8, SEED, workers),
        exp_critical_window("inv-log", 0.5, (2000, 5000), 6, SEED, workers),
        exp_black_threshold(0.5, 0.05, (2000,), 6, SEED, workers),
        exp_tree_census(0.5, 3000, 6, SEED, workers),
        exp_giant_lln(0.25, (2000,), 6, SEED, workers),
    ]
    out = {}
    for rep in reports:
        d = rep.write(tmp_path / tag / rep.name)
        out[rep.name] = ((d / "results.csv").read_bytes(), (d / "verdicts.csv").read_bytes())
    return out


def test_c10_determinism(criterion, tmp_path):
    one = _preset_bytes(tmp_path, "w1", 1)
    eight = _preset_bytes(tmp_path, "w8", 8)
    same = [name for name in one if one[name] == eight[name]]
    ok = criterion(10, "determinism", len(same) == len(one), f"{len(same)}/{len(one)} presets byte-identical")
    assert ok


PERF_SCRIPT = """
import json, resource, time
from caperc.census import ca_census, census
from caperc.connectivity import ca_partition
from caperc.model import ModelParams, sample_model
t0 = time.perf_counter()
params = ModelParams(10**7, 2, (0.75, 0.75))
g = sample_model(params, {seed})
cap = ca_partition(g)
cc = ca_census(cap, 2)
layer = census(cap.source_labels[0], g.layer(2))
wall = time.perf_counter() - t0
peak = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss * 1024
print(json.dumps({{"wall": wall, "peak": peak, "edges": int(sum(g.num_edges)) if not isinstance(g.num_edges, int) else g.num_edges, "max_ca": cc.max_ca_size}}))
"""


def test_c11_performance_floor(criterion):
    proc = subprocess.run([sys.executable, "-c", PERF_SCRIPT.format(seed=SEED)], capture_output=True,
                          text=True, check=True)
    res = json.loads(proc.stdout)
    gb = res["peak"] / 2**30
    ok = criterion(11, "performance floor", res["wall"] < 60 and gb < 4,
                   f"{res['wall']:.1f}s, peak RSS {gb:.2f} GB, {res['edges']} edges")
    assert ok
