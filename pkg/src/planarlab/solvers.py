"""Exact solvers for L(G), LIS/LDS, LCS, weighted planar matchings and ODB height.

The heavy loops live in the kernel backend (see ``_backend``); this module does
the array bookkeeping around them.
"""
from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._backend import kernels
from .models import BernoulliMatrix, OrderedBipartiteGraph, WeightedGrid, WordPair, match_ranges

BRUTE_FORCE_EDGE_LIMIT = 25


@dataclass(frozen=True)
class PlanarMatching:
    """Edges ``(a_t, b_t)`` strictly increasing in both coordinates."""

    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        edges = tuple((int(a), int(b)) for a, b in self.edges)
        for (a0, b0), (a1, b1) in zip(edges, edges[1:]):
            if not (a0 < a1 and b0 < b1):
                raise ValueError(f"edges ({a0},{b0}) and ({a1},{b1}) are not noncrossing in order")
        object.__setattr__(self, "edges", edges)

    def __len__(self):
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)


def _as_int_array(seq):
    """int64 view of ``seq`` when it is integer-valued, else None."""
    if isinstance(seq, np.ndarray):
        if seq.dtype.kind in "iub":
            return np.ascontiguousarray(seq, dtype=np.int64)
        return None
    try:
        arr = np.asarray(seq)
    except (ValueError, TypeError):
        return None
    if arr.ndim == 1 and arr.dtype.kind in "iub":
        return np.ascontiguousarray(arr, dtype=np.int64)
    return None


def _lis_generic(seq) -> int:
    tails: list = []
    for x in seq:
        pos = bisect_left(tails, x)
        if pos == len(tails):
            tails.append(x)
        else:
            tails[pos] = x
    return len(tails)


def lis_length(seq: Sequence) -> int:
    """Length of the longest strictly increasing subsequence (patience sorting)."""
    arr = _as_int_array(seq)
    if arr is not None:
        return int(kernels.lis_strict(arr))
    return _lis_generic(list(seq))


def lds_length(seq: Sequence) -> int:
    """Length of the longest strictly decreasing subsequence."""
    arr = _as_int_array(seq)
    if arr is not None:
        return int(kernels.lis_strict(np.ascontiguousarray(arr[::-1])))
    return _lis_generic(list(seq)[::-1])


def _planar_order(edges: np.ndarray) -> np.ndarray:
    # a ascending, b descending: at most one edge per a-node can enter a strict chain
    return np.lexsort((-edges[:, 1], edges[:, 0]))


def planar_matching_size(g: OrderedBipartiteGraph) -> int:
    if g.num_edges == 0:
        return 0
    e = g.edges
    b = np.ascontiguousarray(e[_planar_order(e), 1])
    return int(kernels.lis_strict(b))


def planar_matching_recover(g: OrderedBipartiteGraph) -> PlanarMatching:
    """A maximum planar matching, the lexicographically smallest one.

    For each edge we compute the longest chain starting at it (a strict LIS on
    the reflected edge set), then scan edges in (a, b) order and greedily take
    the first edge that still admits a chain of the required remaining length.
    """
    if g.num_edges == 0:
        return PlanarMatching(())
    e = g.edges
    refl = -e
    order = _planar_order(refl)
    ahead = np.empty(len(e), dtype=np.int64)
    ahead[order] = kernels.lis_end_lengths(np.ascontiguousarray(refl[order, 1]))
    need = int(ahead.max())
    chosen = []
    pa = pb = 0
    for (a, b), h in zip(e.tolist(), ahead.tolist()):
        if need == 0:
            break
        if a > pa and b > pb and h == need:
            chosen.append((a, b))
            pa, pb = a, b
            need -= 1
    return PlanarMatching(tuple(chosen))


def lcs_length_dp(w: WordPair) -> int:
    """Quadratic-time LCS; ground truth for word inputs."""
    return int(kernels.lcs_dp(w.word_a, w.word_b))


def lcs_length_sparse(w: WordPair) -> int:
    """Hunt-Szymanski LCS over the match list, O((r + s + m) log s)."""
    if w.r == 0 or w.s == 0:
        return 0
    order, lo, hi = match_ranges(w)
    return int(kernels.lcs_sparse(order, lo, hi))


def max_weight_planar(g: WeightedGrid) -> int:
    """Maximum total weight of a strictly increasing cell sequence."""
    if g.weights.size == 0:
        return 0
    return int(kernels.max_weight_planar(g.weights))


def odb_height(mat: BernoulliMatrix) -> int:
    """Longest run of 1-cells with rows strictly increasing, columns nondecreasing."""
    if mat.entries.size == 0:
        return 0
    return int(kernels.odb_height(mat.entries))


def brute_force_planar_size(g: OrderedBipartiteGraph) -> int:
    """Exhaustive maximum over noncrossing edge subsets (testing oracle).

    Each candidate edge is checked against every edge already chosen, so the
    search does not rely on transitivity of the order.
    """
    if g.num_edges > BRUTE_FORCE_EDGE_LIMIT:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_EDGE_LIMIT} edges, got {g.num_edges}")
    edges = g.edge_list()
    best = 0

    def noncrossing(e, f):
        return (e[0] < f[0] and e[1] < f[1]) or (f[0] < e[0] and f[1] < e[1])

    def search(i, chosen):
        nonlocal best
        if len(chosen) + (len(edges) - i) <= best:
            return
        if i == len(edges):
            best = max(best, len(chosen))
            return
        e = edges[i]
        if all(noncrossing(e, f) for f in chosen):
            chosen.append(e)
            search(i + 1, chosen)
            chosen.pop()
        search(i + 1, chosen)

    search(0, [])
    return best
