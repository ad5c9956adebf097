"""Component statistics: size histograms, tree counts, CA counts and black-vertex thresholds."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np

from .connectivity import CaPartition, Labeling
from .model import _as_edge_array
from .rng import BLACK_TAG, derive_seed, generator


def _hist(values: np.ndarray) -> dict[int, int]:
    counts = np.bincount(values)
    nz = np.flatnonzero(counts)
    return {int(s): int(counts[s]) for s in nz}


@dataclass(frozen=True)
class ComponentCensus:
    """Component-size statistics of one graph.

    A component of size ``s`` is a tree when it spans exactly ``s - 1``
    edges; every other component contains a cycle.
    """

    size_hist: dict[int, int]
    max_size: int
    second_size: int
    tree_counts: dict[int, int]
    cyclic_components: int
    cyclic_vertices: int

    @property
    def n(self) -> int:
        return sum(s * c for s, c in self.size_hist.items())


def census(labeling: Labeling, edges) -> ComponentCensus:
    """Size histogram and tree/cyclic classification for ``labeling``'s graph.

    ``edges`` must be the (deduplicated) edge set whose components
    ``labeling`` describes; an edge joining two different components is
    rejected.
    """
    n = labeling.n
    comp = labeling.comp_id
    arr = _as_edge_array(edges)
    if len(arr) and (arr.min() < 0 or arr.max() >= n):
        raise ValueError(f"edge endpoint out of range 0..{n - 1}")
    cu = comp[arr[:, 0]]
    if len(arr) and np.any(cu != comp[arr[:, 1]]):
        bad = int(np.flatnonzero(cu != comp[arr[:, 1]])[0])
        raise ValueError(f"edge {tuple(arr[bad].tolist())} joins two components of the labeling")
    sizes_by_rep = np.bincount(comp, minlength=n)
    edges_by_rep = np.bincount(cu, minlength=n)
    reps = np.flatnonzero(sizes_by_rep)
    sizes = sizes_by_rep[reps]
    is_tree = edges_by_rep[reps] == sizes - 1
    top = np.sort(sizes)[-2:] if len(sizes) else np.zeros(0, dtype=np.int64)
    return ComponentCensus(
        size_hist=_hist(sizes),
        max_size=int(top[-1]) if len(top) else 0,
        second_size=int(top[-2]) if len(top) > 1 else 0,
        tree_counts=_hist(sizes[is_tree]),
        cyclic_components=int(np.count_nonzero(~is_tree)),
        cyclic_vertices=int(sizes[~is_tree].sum()),
    )


@dataclass(frozen=True)
class CaCensus:
    """CA-component size histogram, largest CA-component and ``N_l`` for ``l = 2..k``."""

    size_hist: dict[int, int]
    max_ca_size: int
    N: dict[int, int]


def ca_census(p: CaPartition, k: int | None = None) -> CaCensus:
    k = p.k if k is None else k
    sizes = p.labeling.sizes()
    sizes = sizes[sizes > 0]
    hist = _hist(sizes)
    return CaCensus(
        size_hist=hist,
        max_ca_size=int(sizes.max()) if len(sizes) else 0,
        N={ell: hist.get(ell, 0) for ell in range(2, k + 1)},
    )


@dataclass(frozen=True, eq=False)
class BlackColoring:
    """I.i.d. Bernoulli(q) vertex marks drawn from their own seed stream."""

    q: float
    black: np.ndarray
    seed: int
    trial_index: int = 0
    stream: str = field(default=BLACK_TAG)

    @property
    def n(self) -> int:
        return len(self.black)

    def count(self) -> int:
        return int(np.count_nonzero(self.black))


def black_coloring(n: int, q: float, seed: int, trial_index: int = 0) -> BlackColoring:
    """Mark each of ``n`` vertices black independently with probability ``q``."""
    if not 0.0 < q <= 1.0:
        raise ValueError(f"q must lie in (0, 1], got {q}")
    rng = generator(derive_seed(seed, trial_index, BLACK_TAG))
    black = rng.random(n) < q
    black.flags.writeable = False
    return BlackColoring(q=q, black=black, seed=seed, trial_index=trial_index)


def black_threshold(labeling: Labeling, blacks: BlackColoring) -> tuple[int, dict[int, int]]:
    """Largest black count over components, and ``Z[s]`` = #components with >= s black vertices.

    ``Z`` is reported for ``s = 1..max_s`` and is empty when nothing is black.
    """
    if blacks.n != labeling.n:
        raise ValueError(f"coloring has {blacks.n} vertices, labeling has {labeling.n}")
    per_comp = np.bincount(labeling.comp_id[blacks.black], minlength=labeling.n)
    max_s = int(per_comp.max()) if labeling.n else 0
    if max_s == 0:
        return 0, {}
    hist = np.bincount(per_comp, minlength=max_s + 1)
    at_least = np.cumsum(hist[::-1])[::-1]
    return max_s, {s: int(at_least[s]) for s in range(1, max_s + 1)}


def census_rows(c: ComponentCensus | CaCensus) -> list[tuple[str, int, int]]:
    """``(stat_kind, key, value)`` rows for the census CSV."""
    rows = [("size_hist", s, v) for s, v in sorted(c.size_hist.items())]
    if isinstance(c, ComponentCensus):
        rows += [("tree_count", s, v) for s, v in sorted(c.tree_counts.items())]
        rows += [
            ("max_size", 0, c.max_size),
            ("second_size", 0, c.second_size),
            ("cyclic_components", 0, c.cyclic_components),
            ("cyclic_vertices", 0, c.cyclic_vertices),
        ]
    else:
        rows += [("N", ell, v) for ell, v in sorted(c.N.items())]
        rows.append(("max_ca_size", 0, c.max_ca_size))
    return rows


def write_census_csv(c: ComponentCensus | CaCensus, sink: TextIO) -> None:
    w = csv.writer(sink, lineterminator="\n")
    w.writerow(["stat_kind", "key", "value"])
    w.writerows(census_rows(c))
