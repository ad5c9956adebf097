"""k-colored Erdős–Rényi multigraphs: parameters, sampling, layer views and edge-list I/O.

Vertices are 0-based.  Colors are 1-based (``1..k``), matching the usual
numbering of layers ``G_1, ..., G_k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

import numpy as np

from .rng import derive_seed, generator, layer_tag

FORMAT_TAG = "caperc-v1"

_EMPTY_EDGES = np.zeros((0, 2), dtype=np.int64)
_EMPTY_EDGES.flags.writeable = False


@dataclass(frozen=True)
class ModelParams:
    """Vertex count, color count and per-color intensities.

    ``lambdas`` may be given in any order; they are stored non-increasing so
    that ``lambda_star`` (``Lambda - lambda_i``) is non-decreasing.
    """

    n: int
    k: int
    lambdas: tuple[float, ...]
    Lambda: float = field(init=False)
    lambda_star: tuple[float, ...] = field(init=False)

    def __post_init__(self) -> None:
        n, k = int(self.n), int(self.k)
        if n != self.n or n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if k != self.k or k < 2:
            raise ValueError(f"k must be an integer >= 2, got {self.k}")
        lams = tuple(float(x) for x in self.lambdas)
        if len(lams) != k:
            raise ValueError(f"expected {k} intensities, got {len(lams)}")
        for lam in lams:
            if not lam > 0 or not math.isfinite(lam):
                raise ValueError(f"intensities must be positive and finite, got {lam}")
            if lam > n:
                raise ValueError(f"intensity {lam} exceeds n={n} (edge probability > 1)")
        lams = tuple(sorted(lams, reverse=True))
        total = 0.0
        for lam in lams:
            total += lam
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "lambdas", lams)
        object.__setattr__(self, "Lambda", total)
        object.__setattr__(self, "lambda_star", tuple(total - lam for lam in lams))

    def edge_probability(self, color: int) -> float:
        return self.lambdas[color - 1] / self.n

    def to_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "lambdas": list(self.lambdas)}


@dataclass(frozen=True)
class ColorSet:
    """A subset of the colors ``{1..k}`` stored as a bitmask (bit ``i-1`` is color ``i``)."""

    k: int
    mask: int = 0

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be positive")
        if self.mask < 0 or self.mask >> self.k:
            raise ValueError(f"mask {self.mask:#b} has colors outside 1..{self.k}")

    @classmethod
    def of(cls, k: int, colors: Iterable[int]) -> "ColorSet":
        mask = 0
        for c in colors:
            if not 1 <= c <= k:
                raise ValueError(f"color {c} outside 1..{k}")
            mask |= 1 << (c - 1)
        return cls(k, mask)

    @classmethod
    def full(cls, k: int) -> "ColorSet":
        return cls(k, (1 << k) - 1)

    def complement(self) -> "ColorSet":
        return ColorSet(self.k, ((1 << self.k) - 1) & ~self.mask)

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(c for c in range(1, self.k + 1) if self.mask >> (c - 1) & 1)

    def __contains__(self, color: int) -> bool:
        return 1 <= color <= self.k and bool(self.mask >> (color - 1) & 1)

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def label(self) -> str:
        return "{" + ",".join(map(str, self.members)) + "}"


def _as_edge_array(edges) -> np.ndarray:
    arr = np.asarray(edges, dtype=np.int64)
    if arr.size == 0:
        return _EMPTY_EDGES
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("edges must be a sequence of (u, v) pairs")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.int64)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class ColoredMultigraph:
    """``k`` simple edge layers on the vertex set ``0..n-1``.

    Each layer is an ``(m_i, 2)`` int64 array of pairs ``u < v`` sorted
    lexicographically.  The same pair may occur in several layers.  Arrays are
    read-only, so instances can be shared freely.
    """

    n: int
    k: int
    layers: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if len(self.layers) != self.k:
            raise ValueError(f"expected {self.k} layers, got {len(self.layers)}")
        checked = []
        for i, layer in enumerate(self.layers, start=1):
            arr = _as_edge_array(layer)
            if len(arr):
                u, v = arr[:, 0], arr[:, 1]
                if u.min() < 0 or v.max() >= self.n:
                    raise ValueError(f"layer {i}: vertex out of range 0..{self.n - 1}")
                if np.any(u >= v):
                    raise ValueError(f"layer {i}: pairs must satisfy u < v")
                keys = u * self.n + v
                d = np.diff(keys)
                if np.any(d < 0):
                    raise ValueError(f"layer {i}: edges not sorted")
                if np.any(d == 0):
                    raise ValueError(f"layer {i}: duplicate edge")
            checked.append(_frozen(arr))
        object.__setattr__(self, "layers", tuple(checked))

    @classmethod
    def from_edges(cls, n: int, layers: Sequence[Iterable[tuple[int, int]]]) -> "ColoredMultigraph":
        """Build from unsorted per-layer pair lists; pairs are oriented and sorted."""
        out = []
        for layer in layers:
            arr = _as_edge_array(list(layer))
            if len(arr):
                arr = np.sort(arr, axis=1)
                arr = arr[np.lexsort((arr[:, 1], arr[:, 0]))]
            out.append(arr)
        return cls(n, len(out), tuple(out))

    def layer(self, color: int) -> np.ndarray:
        return self.layers[color - 1]

    @property
    def num_edges(self) -> tuple[int, ...]:
        return tuple(len(layer) for layer in self.layers)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ColoredMultigraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.k == other.k
            and all(np.array_equal(a, b) for a, b in zip(self.layers, other.layers))
        )

    __hash__ = None  # type: ignore[assignment]


# ---------------------------------------------------------------------------
# sampling


def pair_count(n: int) -> int:
    return n * (n - 1) // 2


def decode_pairs(idx: np.ndarray, n: int) -> np.ndarray:
    """Map lexicographic pair indices to ``(u, v)`` rows with ``u < v``.

    Pair ``(u, v)`` has index ``u*(2n-u-1)/2 + (v-u-1)``.  The row is found
    with the closed-form quadratic root and then corrected by one step either
    way to absorb floating point error.
    """
    idx = np.asarray(idx, dtype=np.int64)
    b = 2.0 * n - 1.0
    u = np.floor((b - np.sqrt(b * b - 8.0 * idx.astype(np.float64))) / 2.0).astype(np.int64)
    np.clip(u, 0, max(n - 2, 0), out=u)
    start = u * (2 * n - u - 1) // 2
    too_far = start > idx
    u[too_far] -= 1
    start = u * (2 * n - u - 1) // 2
    next_start = (u + 1) * (2 * n - u - 2) // 2
    behind = idx >= next_start
    u[behind] += 1
    start = u * (2 * n - u - 1) // 2
    v = idx - start + u + 1
    return np.column_stack((u, v))


def geometric_skip_indices(total: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Sorted indices in ``0..total-1`` each kept independently with probability ``p``.

    Gaps between kept indices are geometric; each gap is drawn by inverting
    the geometric CDF, ``floor(log(1-U) / log(1-p))``.  Expected cost is
    ``O(total * p)``.
    """
    if total == 0 or p == 0.0:
        return np.zeros(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(total, dtype=np.int64)
    log_q = math.log1p(-p)
    mean = total * p
    batch = int(mean + 6.0 * math.sqrt(mean) + 64)
    chunks = []
    pos = -1
    while True:
        u = rng.random(batch)
        gaps = np.floor(np.log1p(-u) / log_q)
        # clamp before the int cast; a gap this long ends the scan anyway
        np.minimum(gaps, float(total), out=gaps)
        idx = pos + np.cumsum(gaps.astype(np.int64) + 1)
        if idx[-1] >= total:
            chunks.append(idx[idx < total])
            break
        chunks.append(idx)
        pos = int(idx[-1])
        batch = int(0.1 * mean + 64)
    return np.concatenate(chunks)


def sample_er_edges(n: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Edge array of one ``G(n, p)`` draw, sorted lexicographically."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must lie in [0, 1], got {p}")
    idx = geometric_skip_indices(pair_count(n), p, rng)
    if len(idx) == 0:
        return _EMPTY_EDGES
    return decode_pairs(idx, n)


def sample_layer(params: ModelParams, color: int, seed: int, trial_index: int = 0) -> np.ndarray:
    """Layer ``color`` of trial ``trial_index``; independent of every other layer."""
    if not 1 <= color <= params.k:
        raise ValueError(f"color {color} outside 1..{params.k}")
    rng = generator(derive_seed(seed, trial_index, layer_tag(color)))
    return _frozen(sample_er_edges(params.n, params.edge_probability(color), rng))


def sample_model(params: ModelParams, seed: int, trial_index: int = 0) -> ColoredMultigraph:
    """Draw the k independent layers ``G_i = G(n, lambda_i / n)``.

    Identical ``(params, seed, trial_index)`` give identical graphs.
    """
    layers = tuple(sample_layer(params, c, seed, trial_index) for c in range(1, params.k + 1))
    return ColoredMultigraph(params.n, params.k, layers)


# ---------------------------------------------------------------------------
# views


def _merge_layers(g: ColoredMultigraph, colors: Iterable[int], dedupe: bool) -> np.ndarray:
    parts = [g.layer(c) for c in colors if len(g.layer(c))]
    if not parts:
        return _EMPTY_EDGES
    if len(parts) == 1:
        return parts[0]
    edges = np.concatenate(parts)
    if not dedupe:
        return edges
    keys = np.unique(edges[:, 0] * g.n + edges[:, 1])
    return np.column_stack((keys // g.n, keys % g.n))


def layer_union_view(g: ColoredMultigraph, colors: ColorSet) -> np.ndarray:
    """Edges of ``G_I``: union of the layers in ``colors``, deduplicated and sorted."""
    if colors.k != g.k:
        raise ValueError(f"color set is over {colors.k} colors, graph has {g.k}")
    return _merge_layers(g, colors.members, dedupe=True)


def layer_complement_view(g: ColoredMultigraph, colors: ColorSet) -> np.ndarray:
    """Edges of ``G^I``: union of the layers not in ``colors``."""
    if colors.k != g.k:
        raise ValueError(f"color set is over {colors.k} colors, graph has {g.k}")
    return layer_union_view(g, colors.complement())


# ---------------------------------------------------------------------------
# edge-list I/O


class EdgeListError(ValueError):
    """Malformed edge-list input; ``line`` is 1-based."""

    def __init__(self, message: str, line: int):
        super().__init__(f"{message}, line {line}")
        self.line = line


def write_edgelist(g: ColoredMultigraph, sink: TextIO) -> None:
    """Write ``g`` in the ``caperc-v1`` text format (0-based vertices)."""
    sink.write(f"{FORMAT_TAG} n={g.n} k={g.k}\n")
    for c, layer in enumerate(g.layers, start=1):
        if len(layer):
            prefix = f"{c} "
            sink.write("".join(f"{prefix}{u} {v}\n" for u, v in layer.tolist()))


def _parse_header(line: str) -> tuple[int, int]:
    parts = line.split()
    if len(parts) != 3 or parts[0] != FORMAT_TAG:
        raise EdgeListError(f"malformed header {line!r}", 1)
    values = {}
    for part in parts[1:]:
        key, _, val = part.partition("=")
        if key not in ("n", "k") or key in values or not val.isdigit():
            raise EdgeListError(f"malformed header {line!r}", 1)
        values[key] = int(val)
    if len(values) != 2:
        raise EdgeListError(f"malformed header {line!r}", 1)
    if values["k"] < 2:
        raise EdgeListError("k must be >= 2", 1)
    return values["n"], values["k"]


def read_edgelist(source: TextIO) -> ColoredMultigraph:
    """Parse the ``caperc-v1`` format.  Edges may appear in any order."""
    header = source.readline()
    if not header:
        raise EdgeListError("empty input", 1)
    n, k = _parse_header(header.rstrip("\n"))
    rows: list[list[tuple[int, int, int]]] = [[] for _ in range(k)]
    for lineno, line in enumerate(source, start=2):
        line = line.rstrip("\n")
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 3:
            raise EdgeListError(f"expected '<color> <u> <v>', got {line!r}", lineno)
        try:
            c, u, v = (int(x) for x in parts)
        except ValueError:
            raise EdgeListError(f"non-integer field in {line!r}", lineno) from None
        if not 1 <= c <= k:
            raise EdgeListError(f"color {c} outside 1..{k}", lineno)
        if not (0 <= u < n and 0 <= v < n):
            raise EdgeListError("vertex out of range", lineno)
        if u >= v:
            raise EdgeListError(f"expected u < v, got {u} {v}", lineno)
        rows[c - 1].append((u, v, lineno))
    layers = []
    for c, layer in enumerate(rows, start=1):
        if not layer:
            layers.append(_EMPTY_EDGES)
            continue
        arr = np.array(layer, dtype=np.int64)
        arr = arr[np.lexsort((arr[:, 2], arr[:, 1], arr[:, 0]))]
        dup = np.flatnonzero((np.diff(arr[:, 0]) == 0) & (np.diff(arr[:, 1]) == 0))
        if len(dup):
            j = dup[0] + 1
            raise EdgeListError(
                f"duplicate edge {arr[j, 0]} {arr[j, 1]} in color {c}", int(arr[j, 2])
            )
        layers.append(arr[:, :2])
    return ColoredMultigraph(n, k, tuple(layers))
