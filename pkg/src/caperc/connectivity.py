"""Connected components, CA-partitions and a brute-force CA oracle.

Two vertices are CA-connected when they are connected in every color-deleted
graph ``G^i`` (``i = 1..k``).  The CA-partition is therefore the meet (common
refinement) of the ``k`` partitions into components of ``G^1, ..., G^k``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .model import ColoredMultigraph, ColorSet, _merge_layers, _as_edge_array


@dataclass(frozen=True, eq=False)
class Labeling:
    """Vertex partition as ``comp_id[v]`` = smallest vertex of ``v``'s block."""

    comp_id: np.ndarray

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.comp_id, dtype=np.int64)
        arr.flags.writeable = False
        object.__setattr__(self, "comp_id", arr)

    @property
    def n(self) -> int:
        return len(self.comp_id)

    @property
    def num_components(self) -> int:
        return int(np.count_nonzero(self.comp_id == np.arange(self.n)))

    def sizes(self) -> np.ndarray:
        """Block sizes indexed by representative (zero for non-representatives)."""
        return np.bincount(self.comp_id, minlength=self.n)

    def same(self, u: int, v: int) -> bool:
        return bool(self.comp_id[u] == self.comp_id[v])

    def blocks(self) -> list[list[int]]:
        """Blocks as sorted vertex lists, ordered by representative (small n only)."""
        out: dict[int, list[int]] = {}
        for v, r in enumerate(self.comp_id.tolist()):
            out.setdefault(r, []).append(v)
        return list(out.values())

    def is_canonical(self) -> bool:
        c = self.comp_id
        idx = np.arange(self.n)
        return bool(np.all(c <= idx) and np.all(c >= 0) and np.all(c[c] == c))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Labeling):
            return NotImplemented
        return np.array_equal(self.comp_id, other.comp_id)

    __hash__ = None  # type: ignore[assignment]


def canonical_labeling(labels: np.ndarray) -> Labeling:
    """Relabel arbitrary block ids so that each block is named by its minimum vertex."""
    labels = np.asarray(labels)
    n = len(labels)
    if n == 0:
        return Labeling(np.zeros(0, dtype=np.int64))
    _, dense = np.unique(labels, return_inverse=True)
    return _from_dense(dense.reshape(-1), int(dense.max()) + 1)


def _from_dense(dense: np.ndarray, nblocks: int) -> Labeling:
    # writing in reverse leaves the smallest vertex as each block's entry
    n = len(dense)
    rep = np.empty(nblocks, dtype=np.int64)
    rep[dense[::-1]] = np.arange(n - 1, -1, -1, dtype=np.int64)
    return Labeling(rep[dense])


def components(n: int, edges) -> Labeling:
    """Connected components of the graph ``([n], edges)``.

    ``edges`` is an ``(m, 2)`` array or any sequence of pairs.  Duplicate and
    reversed pairs are harmless.
    """
    arr = _as_edge_array(edges)
    if n < 0:
        raise ValueError("n must be non-negative")
    if len(arr) and (arr.min() < 0 or arr.max() >= n):
        raise ValueError(f"edge endpoint out of range 0..{n - 1}")
    if n == 0:
        return Labeling(np.zeros(0, dtype=np.int64))
    if len(arr) == 0:
        return Labeling(np.arange(n, dtype=np.int64))
    adj = coo_matrix(
        (np.ones(len(arr), dtype=np.int8), (arr[:, 0], arr[:, 1])), shape=(n, n)
    ).tocsr()
    nblocks, dense = connected_components(adj, directed=False)
    return _from_dense(dense.astype(np.int64, copy=False), nblocks)


def meet(labelings: Sequence[Labeling]) -> Labeling:
    """Common refinement: ``u ~ v`` iff ``u ~ v`` in every input labeling.

    Vertices are sorted lexicographically by their tuple of labels (ties keep
    vertex order), and block boundaries are read off where the tuple changes.
    """
    if not labelings:
        raise ValueError("meet of an empty family is undefined")
    n = labelings[0].n
    if any(lab.n != n for lab in labelings):
        raise ValueError("labelings differ in vertex count")
    if n == 0:
        return Labeling(np.zeros(0, dtype=np.int64))
    keys = [lab.comp_id for lab in labelings]
    # np.lexsort treats the last key as primary
    order = np.lexsort(keys[::-1])
    boundary = np.zeros(n, dtype=bool)
    boundary[0] = True
    for key in keys:
        sk = key[order]
        boundary[1:] |= sk[1:] != sk[:-1]
    # stable sort: the first vertex of each run is the run's minimum
    starts = order[boundary]
    run = np.cumsum(boundary) - 1
    comp = np.empty(n, dtype=np.int64)
    comp[order] = starts[run]
    return Labeling(comp)


@dataclass(frozen=True)
class CaPartition:
    """CA-components plus the per-color labelings of ``G^1..G^k`` they refine."""

    labeling: Labeling
    source_labels: tuple[Labeling, ...]

    @property
    def k(self) -> int:
        return len(self.source_labels)

    @property
    def n(self) -> int:
        return self.labeling.n


def color_deleted_labelings(g: ColoredMultigraph) -> tuple[Labeling, ...]:
    """Components of ``G^i`` for ``i = 1..k``."""
    out = []
    for i in range(1, g.k + 1):
        others = ColorSet.of(g.k, [i]).complement().members
        out.append(components(g.n, _merge_layers(g, others, dedupe=False)))
    return tuple(out)


def ca_partition(g: ColoredMultigraph) -> CaPartition:
    """CA-components of ``g``: the meet of the components of every ``G^i``."""
    if g.k < 2:
        raise ValueError("CA-connectivity needs k >= 2 colors")
    sources = color_deleted_labelings(g)
    return CaPartition(meet(sources), sources)


class OracleError(RuntimeError):
    pass


def _closure(n: int, edges: np.ndarray) -> np.ndarray:
    """Reflexive-transitive closure of an undirected graph (Warshall, O(n^3))."""
    reach = np.eye(n, dtype=bool)
    if len(edges):
        reach[edges[:, 0], edges[:, 1]] = True
        reach[edges[:, 1], edges[:, 0]] = True
    for m in range(n):
        reach |= np.outer(reach[:, m], reach[m, :])
    return reach


def ca_oracle(g: ColoredMultigraph, cap: int = 64) -> CaPartition:
    """Brute-force CA-partition from boolean reachability matrices.

    Independent of :func:`ca_partition`: no union-find, no sorting.  Only
    meant for tiny graphs (``n <= cap``).
    """
    if g.n > cap:
        raise ValueError(f"oracle limited to n <= {cap}, got n={g.n}")
    if g.k < 2:
        raise ValueError("CA-connectivity needs k >= 2 colors")
    closures = []
    for i in range(1, g.k + 1):
        parts = [g.layer(c) for c in range(1, g.k + 1) if c != i]
        closures.append(_closure(g.n, np.concatenate(parts)))
    rel = np.logical_and.reduce(closures) if closures else None
    if g.n:
        ri = rel.astype(np.int64)
        if not (rel.diagonal().all() and np.array_equal(rel, rel.T) and not np.any((ri @ ri > 0) & ~rel)):
            raise OracleError("intersection of reachability relations is not an equivalence")
    to_labeling = lambda r: Labeling(np.argmax(r, axis=1).astype(np.int64))  # noqa: E731
    return CaPartition(to_labeling(rel), tuple(to_labeling(c) for c in closures))


def write_partition_csv(p: CaPartition, sink: TextIO) -> None:
    """CSV with columns ``vertex, ca_comp_id, comp_id_minus_1..comp_id_minus_k``."""
    w = csv.writer(sink, lineterminator="\n")
    w.writerow(["vertex", "ca_comp_id"] + [f"comp_id_minus_{i}" for i in range(1, p.k + 1)])
    cols = np.column_stack([np.arange(p.n), p.labeling.comp_id] + [s.comp_id for s in p.source_labels])
    w.writerows(cols.tolist())
