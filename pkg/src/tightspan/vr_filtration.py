"""Vietoris-Rips 1-skeleta and homotopy labels.

For a tree-like space the thickening B_r is homotopy equivalent to a
disjoint union of points, one per connected component of the Rips graph
at scale 2r, so counting components is all that is needed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .metric_core import TOL_METRIC, FiniteMetricSpace, four_point_delta

#: slack when placing r on a boundary n pi / (2n + 1)
LABEL_TOL = 1e-12


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.count = n

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.count -= 1
        return True


@dataclass(frozen=True)
class ScaleGraph:
    """Rips 1-skeleton: an edge joins x, y when d(x, y) < scale (open) or <= scale (closed)."""

    base: FiniteMetricSpace
    scale: float
    closed: bool = False

    def __post_init__(self):
        if not self.scale > 0:
            raise PreconditionError("scale must be positive")

    def adjacency(self) -> np.ndarray:
        d = self.base.dist
        adj = d <= self.scale if self.closed else d < self.scale
        np.fill_diagonal(adj, False)
        return adj


def component_count(g: ScaleGraph) -> int:
    uf = UnionFind(len(g.base))
    ii, jj = np.nonzero(np.triu(g.adjacency(), 1))
    for a, b in zip(ii.tolist(), jj.tolist()):
        uf.union(a, b)
    return uf.count


def is_tree_like(X: FiniteMetricSpace, tol: float = TOL_METRIC) -> bool:
    return four_point_delta(X) <= tol


def critical_scales(X: FiniteMetricSpace) -> np.ndarray:
    """Distinct positive distances: the only scales where the graph changes."""
    d = X.dist[np.triu_indices(len(X), 1)]
    return np.unique(d)


def component_sweep(X: FiniteMetricSpace, scales=None, closed: bool = False):
    """(scale, component count) rows; defaults to every critical scale."""
    scales = critical_scales(X) if scales is None else np.asarray(scales, dtype=float)
    return [(float(s), component_count(ScaleGraph(X, float(s), closed))) for s in scales]


def thickening_components(X: FiniteMetricSpace, r: float, closed: bool = False) -> int:
    """Number of points in the homotopy type of B_r for tree-like X (graph at 2r)."""
    return component_count(ScaleGraph(X, 2.0 * r, closed))


def s1_homotopy_label(r: float) -> str:
    """Homotopy type of the r-thickening of S^1 inside its tight span.

    "S^{2n+1}" for r in (n pi/(2n+1), (n+1) pi/(2n+3)] and "point" for
    r >= pi/2.
    """
    if not r > 0:
        raise PreconditionError("r must be positive")
    if r >= math.pi / 2 - LABEL_TOL:
        return "point"
    n = 0
    while r > (n + 1) * math.pi / (2 * n + 3) + LABEL_TOL:
        n += 1
    return f"S^{2 * n + 1}"
