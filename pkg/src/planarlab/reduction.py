"""Degree-2 pruning and the matching-to-permutation correspondence."""
from __future__ import annotations

from dataclasses import dataclass
import math
from typing import NamedTuple

import numpy as np

from .models import OrderedBipartiteGraph


def _degrees(g: OrderedBipartiteGraph):
    e = g.edges
    deg_a = np.bincount(e[:, 0], minlength=g.r + 1)[1:]
    deg_b = np.bincount(e[:, 1], minlength=g.s + 1)[1:]
    return deg_a, deg_b


def prune_degree_ge2(g: OrderedBipartiteGraph) -> OrderedBipartiteGraph:
    """Drop every edge touching a node of degree at least 2."""
    if g.num_edges == 0:
        return g
    deg_a, deg_b = _degrees(g)
    e = g.edges
    keep = (deg_a[e[:, 0] - 1] == 1) & (deg_b[e[:, 1] - 1] == 1)
    return OrderedBipartiteGraph(g.r, g.s, e[keep])


def matching_to_permutation(g: OrderedBipartiteGraph) -> np.ndarray:
    """Partner ranks of the matched A-nodes, read in A order.

    The LIS of the result is L(g). Raises ValueError if some node has degree
    two or more.
    """
    if g.num_edges == 0:
        return np.empty(0, dtype=np.int64)
    deg_a, deg_b = _degrees(g)
    if deg_a.max() > 1 or deg_b.max() > 1:
        raise ValueError("graph is not a partial matching (some node has degree >= 2)")
    b = g.edges[:, 1]  # edges are sorted by a already
    ranks = np.empty(len(b), dtype=np.int64)
    ranks[np.argsort(b)] = np.arange(1, len(b) + 1)
    return ranks


class ExpectedRemoved(NamedTuple):
    exact: float
    bound: float


@dataclass(frozen=True)
class EdgeStats:
    edges_total: int
    edges_removed: int
    degree_histogram_a: dict[int, int]
    degree_histogram_b: dict[int, int]
    Y: int  # sum over nodes of deg(w) * [deg(w) >= 2]


def _histogram(deg) -> dict[int, int]:
    values, counts = np.unique(deg, return_counts=True)
    return {int(v): int(c) for v, c in zip(values, counts)}


def edge_stats(g: OrderedBipartiteGraph, original: OrderedBipartiteGraph) -> EdgeStats:
    """Exact edge and degree counts for ``g = prune_degree_ge2(original)``."""
    deg_a, deg_b = _degrees(original)
    y = int(deg_a[deg_a >= 2].sum() + deg_b[deg_b >= 2].sum())
    removed = original.num_edges - g.num_edges
    if removed < 0:
        raise ValueError("pruned graph has more edges than the original")
    if removed > y:
        raise AssertionError(f"removed edges {removed} exceed Y = {y}")
    return EdgeStats(
        edges_total=original.num_edges,
        edges_removed=removed,
        degree_histogram_a=_histogram(deg_a),
        degree_histogram_b=_histogram(deg_b),
        Y=y,
    )


def expected_removed_exact(r, s, k) -> ExpectedRemoved:
    """E[Y] for the random words model on K_{r,s}, and the (r+s)rs/k^2 bound.

    A node of A has Binomial(s, 1/k) degree, so E[Y_a] = E[deg] - P(deg = 1)
    = s/k - (s/k)(1 - 1/k)^(s-1); symmetrically for B.
    """
    if r < 1 or s < 1 or k < 1:
        raise ValueError(f"r, s, k must be >= 1, got r={r}, s={s}, k={k}")

    def per_node(h):
        if k == 1:
            return 0.0 if h == 1 else float(h)
        # (h/k) * (1 - (1 - 1/k)^(h-1)), stable for large k
        return (h / k) * -math.expm1((h - 1) * math.log1p(-1.0 / k))

    exact = r * per_node(s) + s * per_node(r)
    bound = (r + s) * r * s / k**2
    return ExpectedRemoved(exact, bound)
