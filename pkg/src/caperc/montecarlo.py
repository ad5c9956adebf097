"""Deterministic trial execution and order-independent aggregation.

Trial ``t`` of a run draws every random quantity from streams keyed by
``derive_seed(master_seed, t, tag)``, so a trial can be reproduced from the
trial spec and its index alone, and the worker count never changes the results.
"""
from __future__ import annotations

import math
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .census import black_coloring, black_threshold, ca_census, census
from .connectivity import ca_partition, components
from .model import ColoredMultigraph, ColorSet, ModelParams, sample_layer
from .rng import BLACK_TAG, derive_seed, layer_tag

__all__ = [
    "Metric",
    "TrialSpec",
    "TrialResult",
    "TrialError",
    "Summary",
    "Aggregate",
    "derive_seed",
    "run_trial",
    "run_trials",
    "aggregate",
    "nearest_rank",
    "QUANTILES",
]

QUANTILES = (1, 5, 25, 50, 75, 95, 99)


@dataclass(frozen=True)
class Metric:
    """One requested measurement.

    Use the constructors (:meth:`max_ca`, :meth:`layer_census`, ...) rather
    than building instances by hand.  ``colors`` names the union view ``G_I``
    a layer metric is computed on.
    """

    kind: str
    colors: tuple[int, ...] = ()
    q: float | None = None
    threshold: int | None = None

    KINDS = ("max_ca", "ca_census", "layer_census", "giant_size", "black_threshold", "intersection")

    def __post_init__(self) -> None:
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown metric kind {self.kind!r}")
        if self.kind in ("layer_census", "giant_size", "black_threshold") and not self.colors:
            raise ValueError(f"{self.kind} needs a non-empty color set")
        if self.kind == "black_threshold" and not (self.q is not None and 0 < self.q <= 1):
            raise ValueError(f"black_threshold needs q in (0, 1], got {self.q}")
        object.__setattr__(self, "colors", tuple(sorted(set(self.colors))))

    @classmethod
    def max_ca(cls) -> "Metric":
        return cls("max_ca")

    @classmethod
    def ca_census(cls) -> "Metric":
        return cls("ca_census")

    @classmethod
    def layer_census(cls, *colors: int) -> "Metric":
        return cls("layer_census", colors)

    @classmethod
    def giant_size(cls, *colors: int) -> "Metric":
        return cls("giant_size", colors)

    @classmethod
    def black_threshold(cls, q: float, *colors: int) -> "Metric":
        return cls("black_threshold", colors, q=q)

    @classmethod
    def intersection(cls, threshold: int = 4) -> "Metric":
        return cls("intersection", threshold=threshold)

    @property
    def needs_all_layers(self) -> bool:
        return self.kind in ("max_ca", "ca_census", "intersection")

    @property
    def prefix(self) -> str:
        cs = "{" + ",".join(map(str, self.colors)) + "}"
        if self.kind == "layer_census":
            return f"layer{cs}"
        if self.kind == "giant_size":
            return f"giant{cs}"
        if self.kind == "black_threshold":
            return f"black{cs}[q={self.q!r}]"
        if self.kind == "intersection":
            return f"intersection[t={self.threshold}]"
        return ""

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.colors:
            d["colors"] = list(self.colors)
        if self.q is not None:
            d["q"] = self.q
        if self.threshold is not None:
            d["threshold"] = self.threshold
        return d


@dataclass(frozen=True)
class TrialSpec:
    params: ModelParams
    metrics: tuple[Metric, ...]
    master_seed: int
    trials: int

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"trial count must be >= 1, got {self.trials}")
        if not self.metrics:
            raise ValueError("no metrics requested")
        object.__setattr__(self, "metrics", tuple(self.metrics))
        for m in self.metrics:
            for c in m.colors:
                if not 1 <= c <= self.params.k:
                    raise ValueError(f"metric {m.kind} uses color {c} outside 1..{self.params.k}")

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "metrics": [m.to_dict() for m in self.metrics],
            "master_seed": self.master_seed,
            "trials": self.trials,
        }


@dataclass
class TrialResult:
    trial_index: int
    seeds: dict[str, int]
    scalars: dict[str, float]
    hists: dict[str, dict[int, int]] = field(default_factory=dict)


class TrialError(RuntimeError):
    """A trial raised; carries the failing trial index."""

    def __init__(self, trial_index: int, message: str):
        super().__init__(trial_index, message)
        self.trial_index = trial_index
        self.message = message

    def __str__(self) -> str:
        return f"trial {self.trial_index} failed: {self.message}"


def _needed_colors(spec: TrialSpec) -> list[int]:
    if any(m.needs_all_layers for m in spec.metrics):
        return list(range(1, spec.params.k + 1))
    return sorted({c for m in spec.metrics for c in m.colors})


def _union_edges(layers: dict[int, np.ndarray], colors: Sequence[int], n: int) -> np.ndarray:
    parts = [layers[c] for c in colors if len(layers[c])]
    if not parts:
        return np.zeros((0, 2), dtype=np.int64)
    if len(parts) == 1:
        return parts[0]
    keys = np.unique(np.concatenate([p[:, 0] * n + p[:, 1] for p in parts]))
    return np.column_stack((keys // n, keys % n))


def run_trial(spec: TrialSpec, trial_index: int) -> TrialResult:
    """Sample one trial and evaluate every requested metric on it.

    Only the layers some metric looks at are sampled.  Layers live on
    independent streams, so skipping one leaves the others unchanged.
    """
    params, seed, t = spec.params, spec.master_seed, trial_index
    n, k = params.n, params.k
    colors = _needed_colors(spec)
    seeds = {layer_tag(c): derive_seed(seed, t, layer_tag(c)) for c in colors}
    layers = {c: sample_layer(params, c, seed, t) for c in colors}
    scalars: dict[str, float] = {}
    hists: dict[str, dict[int, int]] = {}

    labelings: dict[tuple[int, ...], object] = {}
    edge_views: dict[tuple[int, ...], np.ndarray] = {}

    def view(cs: tuple[int, ...]):
        if cs not in labelings:
            edge_views[cs] = _union_edges(layers, cs, n)
            labelings[cs] = components(n, edge_views[cs])
        return labelings[cs], edge_views[cs]

    cap = None
    if any(m.needs_all_layers for m in spec.metrics):
        g = ColoredMultigraph(n, k, tuple(layers[c] for c in range(1, k + 1)))
        cap = ca_partition(g)
        cc = ca_census(cap, k)

    for m in spec.metrics:
        pre = m.prefix
        if m.kind == "max_ca":
            scalars["max_ca"] = cc.max_ca_size
        elif m.kind == "ca_census":
            scalars["max_ca"] = cc.max_ca_size
            scalars["ca_components"] = sum(cc.size_hist.values())
            for ell, v in cc.N.items():
                scalars[f"N_{ell}"] = v
            hists["ca_size_hist"] = cc.size_hist
        elif m.kind in ("layer_census", "giant_size"):
            lab, edges = view(m.colors)
            c = census(lab, edges)
            scalars[f"{pre}.max_size"] = c.max_size
            scalars[f"{pre}.second_size"] = c.second_size
            if m.kind == "layer_census":
                scalars[f"{pre}.cyclic_components"] = c.cyclic_components
                scalars[f"{pre}.cyclic_vertices"] = c.cyclic_vertices
                hists[f"{pre}.size_hist"] = c.size_hist
                hists[f"{pre}.tree_counts"] = c.tree_counts
        elif m.kind == "black_threshold":
            lab, _ = view(m.colors)
            seeds[BLACK_TAG] = derive_seed(seed, t, BLACK_TAG)
            blacks = black_coloring(n, m.q, seed, trial_index=t)
            max_s, z = black_threshold(lab, blacks)
            scalars[f"{pre}.max_s"] = max_s
            scalars[f"{pre}.black_count"] = blacks.count()
            hists[f"{pre}.z_tilde"] = z
        elif m.kind == "intersection":
            counts = _intersection_violations(cap, layers, n, k, m.threshold, view)
            for name, v in counts.items():
                scalars[f"{pre}.{name}"] = v
    return TrialResult(t, seeds, scalars, hists)


def _intersection_violations(cap, layers, n, k, threshold, view) -> dict[str, int]:
    """Count large CA-components not inside one ``G_k`` component or not inside
    the largest component of ``G^k``."""
    comp = cap.labeling.comp_id
    sizes = np.bincount(comp, minlength=n)
    large = sizes[comp] >= threshold
    n_large = int(np.count_nonzero(sizes >= threshold))
    if n_large == 0:
        return {"large_ca": 0, "outside_gk": 0, "outside_giant": 0}
    gk, _ = view((k,))
    rest, _ = view(tuple(range(1, k)))
    rest_sizes = rest.sizes()
    giant_rep = int(np.argmax(rest_sizes))
    idx = np.flatnonzero(large)
    reps = comp[idx]
    # a CA-component lies in one G_k component iff min == max of its G_k labels
    gk_lab = gk.comp_id[idx]
    lo = np.full(n, np.iinfo(np.int64).max)
    hi = np.full(n, -1)
    np.minimum.at(lo, reps, gk_lab)
    np.maximum.at(hi, reps, gk_lab)
    big_reps = np.flatnonzero(sizes >= threshold)
    outside_gk = int(np.count_nonzero(lo[big_reps] != hi[big_reps]))
    in_giant = rest.comp_id[idx] == giant_rep
    bad = np.zeros(n, dtype=bool)
    bad[reps[~in_giant]] = True
    outside_giant = int(np.count_nonzero(bad[big_reps]))
    return {"large_ca": n_large, "outside_gk": outside_gk, "outside_giant": outside_giant}


def _guarded(spec: TrialSpec, trial_index: int) -> TrialResult:
    try:
        return run_trial(spec, trial_index)
    except Exception as exc:  # noqa: BLE001 - re-raised with the trial index
        raise TrialError(trial_index, f"{type(exc).__name__}: {exc}") from exc


def run_trials(spec: TrialSpec, workers: int = 1) -> list[TrialResult]:
    """Run all trials of ``spec``; output is sorted by trial index.

    Any failing trial aborts the whole run with a :class:`TrialError`.
    """
    if workers < 1:
        raise ValueError(f"workers must be positive, got {workers}")
    indices = range(spec.trials)
    if workers == 1 or spec.trials == 1:
        results = [_guarded(spec, t) for t in indices]
    else:
        chunk = max(1, spec.trials // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(partial(_guarded, spec), indices, chunksize=chunk))
    results.sort(key=lambda r: r.trial_index)
    return results


# ---------------------------------------------------------------------------
# aggregation


def nearest_rank(sorted_values: Sequence[float], pct: int) -> float:
    """Nearest-rank percentile: the ``ceil(pct/100 * N)``-th smallest value."""
    n = len(sorted_values)
    rank = max(1, -(-pct * n // 100))
    return sorted_values[rank - 1]


@dataclass(frozen=True)
class Summary:
    count: int
    mean: float
    sd: float
    sd_defined: bool
    min: float
    max: float
    quantiles: dict[int, float]

    @classmethod
    def of(cls, values: Iterable[float]) -> "Summary":
        xs = sorted(float(v) for v in values)
        if not xs:
            raise ValueError("cannot summarize an empty sample")
        n = len(xs)
        mean = math.fsum(xs) / n
        if n > 1:
            sd = math.sqrt(math.fsum((x - mean) ** 2 for x in xs) / (n - 1))
        else:
            sd = 0.0
        return cls(n, mean, sd, n > 1, xs[0], xs[-1], {p: nearest_rank(xs, p) for p in QUANTILES})


@dataclass(frozen=True)
class Aggregate:
    stats: dict[str, Summary]
    hists: dict[str, dict[int, int]]
    values: dict[str, tuple[float, ...]]

    def __getitem__(self, metric: str) -> Summary:
        return self.stats[metric]


def aggregate(results: Sequence[TrialResult]) -> Aggregate:
    """Summaries per scalar metric and pooled (summed) histograms.

    Values are sorted before summation, so the result does not depend on the
    order of ``results``.  ``values`` keeps the per-trial samples ordered by
    trial index.
    """
    if not results:
        raise ValueError("cannot aggregate an empty result list")
    keys = set(results[0].scalars)
    hkeys = set(results[0].hists)
    for r in results:
        if set(r.scalars) != keys or set(r.hists) != hkeys:
            raise ValueError(f"trial {r.trial_index} reports a different metric set")
    ordered = sorted(results, key=lambda r: r.trial_index)
    values = {key: tuple(float(r.scalars[key]) for r in ordered) for key in sorted(keys)}
    stats = {key: Summary.of(vals) for key, vals in values.items()}
    hists: dict[str, dict[int, int]] = {}
    for key in sorted(hkeys):
        pooled: dict[int, int] = {}
        for r in ordered:
            for s, c in r.hists[key].items():
                pooled[s] = pooled.get(s, 0) + c
        hists[key] = dict(sorted(pooled.items()))
    return Aggregate(stats, hists, values)


def manifest(spec: TrialSpec, results: Sequence[TrialResult], wall_time: float, workers: int) -> dict:
    """Run provenance: trial-spec echo, software version, seeds and timing."""
    return {
        "software": {"name": "caperc", "version": __version__, "python": platform.python_version(),
                     "numpy": np.__version__},
        "spec": spec.to_dict(),
        "master_seed": spec.master_seed,
        "workers": workers,
        "trial_seeds": [{"trial": r.trial_index, **r.seeds} for r in results],
        "wall_time_s": wall_time,
        "finished_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
