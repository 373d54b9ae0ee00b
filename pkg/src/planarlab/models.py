"""Random instance samplers.

Every sampler draws from an :class:`RngStream`, a counter-based Philox stream
keyed by ``(master_seed, trial_index)``. The same pair always yields the same
object, independent of which process or in which order trials are run.

Note on the geometric-weight coupling: with ``P(w = j) = (1 - p)**j * p`` an
edge has nonzero weight with probability ``1 - p``, so dropping zero-weight
cells of a ``sample_geometric_grid(n, p)`` grid gives a binomial graph with
edge probability ``1 - p``, not ``p``. :func:`weights_to_graph` keeps the
nonzero cells as stated and does not adjust the parameter.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

_MASK64 = (1 << 64) - 1

# below this edge density the binomial sampler skips geometrically
_DENSE_CUTOFF = 0.05


@dataclass(frozen=True)
class RngStream:
    """Deterministic stream for one trial.

    The Philox key is ``master_seed`` in the low word and ``trial_index`` in
    the high word; the Philox counter plays the role of the draw counter.
    """

    master_seed: int
    trial_index: int = 0

    def __post_init__(self):
        if self.trial_index < 0:
            raise ValueError("trial_index must be nonnegative")
        if self.trial_index > _MASK64:
            raise ValueError("trial_index must fit in 64 bits")

    def generator(self) -> np.random.Generator:
        key = (self.master_seed & _MASK64) | (self.trial_index << 64)
        return np.random.Generator(np.random.Philox(key=key))


def _rng(stream) -> np.random.Generator:
    if isinstance(stream, np.random.Generator):
        return stream
    if isinstance(stream, RngStream):
        return stream.generator()
    raise TypeError(f"expected RngStream or numpy Generator, got {type(stream).__name__}")


@dataclass(frozen=True, eq=False)
class OrderedBipartiteGraph:
    """Edges between ``A = {1..r}`` and ``B = {1..s}``.

    ``edges`` is an ``(m, 2)`` int64 array of 1-based ``(a, b)`` pairs in
    strictly increasing lexicographic order.
    """

    r: int
    s: int
    edges: np.ndarray

    def __post_init__(self):
        if self.r < 1 or self.s < 1:
            raise ValueError(f"color classes must be nonempty, got r={self.r}, s={self.s}")
        e = np.ascontiguousarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if len(e):
            a, b = e[:, 0], e[:, 1]
            if a.min() < 1 or a.max() > self.r or b.min() < 1 or b.max() > self.s:
                raise ValueError("edge endpoint out of range")
            da, db = np.diff(a), np.diff(b)
            if np.any((da < 0) | ((da == 0) & (db <= 0))):
                raise ValueError("edges must be strictly sorted (a, b) pairs without duplicates")
        e.flags.writeable = False
        object.__setattr__(self, "edges", e)

    @classmethod
    def from_edges(cls, r, s, edges) -> "OrderedBipartiteGraph":
        """Build from any iterable of pairs; sorts, rejects duplicates."""
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        e = e.reshape(-1, 2)
        if len(e):
            e = e[np.lexsort((e[:, 1], e[:, 0]))]
        return cls(r, s, e)

    @classmethod
    def complete(cls, r, s) -> "OrderedBipartiteGraph":
        a, b = np.meshgrid(np.arange(1, r + 1), np.arange(1, s + 1), indexing="ij")
        return cls(r, s, np.column_stack([a.ravel(), b.ravel()]))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def edge_list(self) -> list[tuple[int, int]]:
        return [tuple(x) for x in self.edges.tolist()]

    def __eq__(self, other):
        if not isinstance(other, OrderedBipartiteGraph):
            return NotImplemented
        return self.r == other.r and self.s == other.s and np.array_equal(self.edges, other.edges)

    def __len__(self):
        return len(self.edges)


@dataclass(frozen=True, eq=False)
class WordPair:
    """Two words over the alphabet ``{1..k}``, stored as int64 arrays."""

    k: int
    word_a: np.ndarray
    word_b: np.ndarray

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"alphabet size must be >= 1, got {self.k}")
        for name in ("word_a", "word_b"):
            w = np.ascontiguousarray(getattr(self, name), dtype=np.int64).ravel()
            if len(w) and (w.min() < 1 or w.max() > self.k):
                raise ValueError(f"{name} has characters outside 1..{self.k}")
            w.flags.writeable = False
            object.__setattr__(self, name, w)

    @property
    def r(self) -> int:
        return len(self.word_a)

    @property
    def s(self) -> int:
        return len(self.word_b)

    def __eq__(self, other):
        if not isinstance(other, WordPair):
            return NotImplemented
        return (
            self.k == other.k
            and np.array_equal(self.word_a, other.word_a)
            and np.array_equal(self.word_b, other.word_b)
        )


@dataclass(frozen=True, eq=False)
class WeightedGrid:
    """``r x s`` grid of nonnegative integer weights (square for G* samples)."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.ascontiguousarray(self.weights, dtype=np.int64)
        if w.ndim != 2:
            raise ValueError("weights must be a 2-d array")
        if w.size and w.min() < 0:
            raise ValueError("weights must be nonnegative")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def __eq__(self, other):
        if not isinstance(other, WeightedGrid):
            return NotImplemented
        return np.array_equal(self.weights, other.weights)


@dataclass(frozen=True, eq=False)
class BernoulliMatrix:
    """Square 0/1 matrix, stored as uint8."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries)
        if m.ndim != 2:
            raise ValueError("entries must be a 2-d array")
        if m.size and not np.isin(m, (0, 1)).all():
            raise ValueError("entries must be 0 or 1")
        m = np.ascontiguousarray(m, dtype=np.uint8)
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __eq__(self, other):
        if not isinstance(other, BernoulliMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)


def _check_prob(p, *, open_interval=False):
    if open_interval:
        if not 0.0 < p < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {p}")
    elif not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")


def sample_word_pair(r, s, k, stream) -> WordPair:
    if r < 1 or s < 1 or k < 1:
        raise ValueError(f"r, s, k must be >= 1, got r={r}, s={s}, k={k}")
    rng = _rng(stream)
    a = rng.integers(1, k + 1, size=r, dtype=np.int64)
    b = rng.integers(1, k + 1, size=s, dtype=np.int64)
    return WordPair(k, a, b)


def match_ranges(w: WordPair):
    """Group word_b positions by character.

    Returns ``(order, lo, hi)``: ``order`` holds 0-based word_b positions
    sorted by (character, position) and ``order[lo[i]:hi[i]]`` are the
    positions whose character equals ``word_a[i]``.
    """
    order = np.argsort(w.word_b, kind="stable").astype(np.int64)
    chars = w.word_b[order]
    lo = np.searchsorted(chars, w.word_a, side="left").astype(np.int64)
    hi = np.searchsorted(chars, w.word_a, side="right").astype(np.int64)
    return order, lo, hi


def words_to_graph(w: WordPair) -> OrderedBipartiteGraph:
    order, lo, hi = match_ranges(w)
    counts = hi - lo
    total = int(counts.sum())
    a = np.repeat(np.arange(1, w.r + 1, dtype=np.int64), counts)
    offsets = np.arange(total, dtype=np.int64) - np.repeat(np.cumsum(counts) - counts, counts)
    b = order[np.repeat(lo, counts) + offsets] + 1
    return OrderedBipartiteGraph(w.r, w.s, np.column_stack([a, b]))


def _bernoulli_positions(total, p, rng) -> np.ndarray:
    """Sorted 0-based indices of successes among ``total`` Bernoulli(p) trials."""
    if p == 0.0 or total == 0:
        return np.empty(0, dtype=np.int64)
    if p == 1.0:
        return np.arange(total, dtype=np.int64)
    if p >= _DENSE_CUTOFF:
        return np.flatnonzero(rng.random(total) < p).astype(np.int64)
    mean = total * p
    chunk = int(mean + 6.0 * math.sqrt(mean) + 16)
    parts = []
    last = -1
    while True:
        gaps = rng.geometric(p, size=chunk).astype(np.int64)
        pos = last + np.cumsum(gaps)
        cut = np.searchsorted(pos, total, side="left")
        parts.append(pos[:cut])
        if cut < chunk:
            break
        last = int(pos[-1])
        chunk = max(16, chunk // 4)
    return np.concatenate(parts)


def sample_binomial_graph(r, s, p, stream) -> OrderedBipartiteGraph:
    _check_prob(p)
    if r < 1 or s < 1:
        raise ValueError(f"r, s must be >= 1, got r={r}, s={s}")
    idx = _bernoulli_positions(r * s, p, _rng(stream))
    a, b = np.divmod(idx, s)
    return OrderedBipartiteGraph(r, s, np.column_stack([a + 1, b + 1]))


def sample_geometric_grid(n, p, stream) -> WeightedGrid:
    """Weights with ``P(w = j) = (1 - p)**j * p``, by inverse CDF."""
    _check_prob(p, open_interval=True)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = _rng(stream)
    u = 1.0 - rng.random((n, n))  # (0, 1]
    w = np.floor(np.log(u) / math.log1p(-p)).astype(np.int64)
    return WeightedGrid(w)


def weights_to_graph(g: WeightedGrid) -> OrderedBipartiteGraph:
    r, s = g.weights.shape
    a, b = np.nonzero(g.weights > 0)
    return OrderedBipartiteGraph(r, s, np.column_stack([a + 1, b + 1]))


def sample_bernoulli_matrix(n, p, stream) -> BernoulliMatrix:
    _check_prob(p)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = _rng(stream)
    return BernoulliMatrix((rng.random((n, n)) < p).astype(np.uint8))


def matrix_to_graph(m: BernoulliMatrix) -> OrderedBipartiteGraph:
    """Graph whose edges are the 1-cells of ``m`` (the strict model)."""
    r, s = m.entries.shape
    a, b = np.nonzero(m.entries)
    return OrderedBipartiteGraph(r, s, np.column_stack([a + 1, b + 1]))


def sample_permutation(N, stream) -> np.ndarray:
    """Uniform permutation of ``1..N`` (Fisher-Yates under the hood)."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    return _rng(stream).permutation(N).astype(np.int64) + 1
