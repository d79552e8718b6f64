"""Finite metric spaces and the basic metrics used throughout the package.

Everything here is a pure function over immutable values. Distances on the
circle are geodesic (circle of length 2*pi), distances on spheres are the
round geodesic metric, and ``linf_dist`` is the Chebyshev metric.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from .errors import PreconditionError, SchemaError

TWO_PI = 2.0 * math.pi

#: absolute tolerance for tables derivable in exact arithmetic
TOL_METRIC = 1e-9
#: allowed drift of ``|u|`` away from 1 for sphere points
TOL_UNIT = 1e-9


@dataclass(frozen=True)
class FiniteMetricSpace:
    """Labelled points together with a full distance table.

    The table is validated on construction (square, symmetric, zero
    diagonal, positive off-diagonal, triangle inequality up to ``tol``).
    """

    labels: tuple
    dist: np.ndarray
    tol: float = TOL_METRIC

    def __post_init__(self):
        labels = tuple(self.labels)
        dist = np.array(self.dist, dtype=float)
        dist.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dist", dist)
        n = len(labels)
        if dist.shape != (n, n):
            raise PreconditionError(
                f"distance table has shape {dist.shape}, expected {(n, n)}")
        if len(set(labels)) != n:
            raise PreconditionError("labels must be distinct")
        if n == 0:
            raise PreconditionError("a metric space needs at least one point")
        if not np.all(np.isfinite(dist)):
            raise PreconditionError("distances must be finite")
        if np.any(np.abs(np.diag(dist)) > self.tol):
            raise PreconditionError("diagonal of the distance table must be 0")
        if np.any(np.abs(dist - dist.T) > self.tol):
            raise PreconditionError("distance table is not symmetric")
        off = ~np.eye(n, dtype=bool)
        if np.any(dist[off] <= 0):
            raise PreconditionError("distinct points must be at positive distance")
        # d[i,k] <= d[i,j] + d[j,k] for all triples
        for j in range(n):
            if np.any(dist > dist[:, j][:, None] + dist[j, :][None, :] + self.tol):
                raise PreconditionError("triangle inequality fails")

    def __len__(self):
        return len(self.labels)

    def index(self, label: Hashable) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown label {label!r}") from None

    def d(self, a: Hashable, b: Hashable) -> float:
        return float(self.dist[self.index(a), self.index(b)])

    def subspace(self, labels: Sequence[Hashable]) -> "FiniteMetricSpace":
        idx = [self.index(lab) for lab in labels]
        return FiniteMetricSpace(tuple(labels), self.dist[np.ix_(idx, idx)], self.tol)

    def scaled(self, factor: float) -> "FiniteMetricSpace":
        return FiniteMetricSpace(self.labels, factor * self.dist, self.tol * max(factor, 1.0))

    # JSON layout: {"labels": [...], "dist": [[...], ...]}
    def to_json(self) -> str:
        return json.dumps({"labels": list(self.labels), "dist": self.dist.tolist()})

    @classmethod
    def from_json(cls, text: str, tol: float = TOL_METRIC) -> "FiniteMetricSpace":
        return cls.from_dict(json.loads(text), tol=tol)

    @classmethod
    def from_dict(cls, obj: dict, tol: float = TOL_METRIC) -> "FiniteMetricSpace":
        if not isinstance(obj, dict) or "labels" not in obj or "dist" not in obj:
            raise SchemaError('expected an object with keys "labels" and "dist"')
        labels = obj["labels"]
        dist = obj["dist"]
        if not isinstance(labels, list) or not isinstance(dist, list):
            raise SchemaError('"labels" and "dist" must be arrays')
        if any(not isinstance(row, list) or len(row) != len(labels) for row in dist) \
                or len(dist) != len(labels):
            raise SchemaError('"dist" must be a square array matching "labels"')
        try:
            table = np.array(dist, dtype=float)
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"non-numeric distance: {exc}") from None
        labels = [tuple(x) if isinstance(x, list) else x for x in labels]
        return cls(tuple(labels), table, tol)


# ---------------------------------------------------------------------------
# points on the circle, spheres and R^n_inf


@dataclass(frozen=True)
class CirclePoint:
    """A point of S^1 = R / 2pi, stored by its representative in [0, 2pi)."""

    angle: float

    def __post_init__(self):
        object.__setattr__(self, "angle", normalize_angle(self.angle))

    def __float__(self):
        return self.angle

    @property
    def antipode(self) -> "CirclePoint":
        return CirclePoint(self.angle + math.pi)


def normalize_angle(theta):
    """Reduce angles modulo 2pi into [0, 2pi)."""
    out = np.mod(np.asarray(theta, dtype=float), TWO_PI)
    # np.mod can return exactly 2pi for tiny negative inputs
    out = np.where(out >= TWO_PI, 0.0, out)
    return float(out) if out.ndim == 0 else out


def circle_dist(a, b):
    """Geodesic distance on S^1 = R / 2pi. Broadcasts over arrays."""
    a = np.asarray(a, dtype=float) if not isinstance(a, CirclePoint) else a.angle
    b = np.asarray(b, dtype=float) if not isinstance(b, CirclePoint) else b.angle
    diff = np.abs(np.mod(np.asarray(a) - np.asarray(b), TWO_PI))
    out = np.minimum(diff, TWO_PI - diff)
    return float(out) if np.ndim(out) == 0 else out


def as_sphere_point(u, tol: float = TOL_UNIT) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    norms = np.linalg.norm(u, axis=-1)
    if np.any(np.abs(norms - 1.0) > tol):
        raise PreconditionError("sphere points must have unit Euclidean norm")
    return u


def sphere_dist(u, v, tol: float = TOL_UNIT):
    """Round geodesic distance between unit vectors (broadcasts on leading axes)."""
    u = as_sphere_point(u, tol)
    v = as_sphere_point(v, tol)
    if u.shape[-1] != v.shape[-1]:
        raise PreconditionError("sphere points of different dimension")
    cos = np.clip(np.sum(u * v, axis=-1), -1.0, 1.0)
    out = np.arccos(cos)
    return float(out) if np.ndim(out) == 0 else out


def linf_dist(x, y):
    """Chebyshev distance max_i |x_i - y_i|. Broadcasts on leading axes."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[-1] != y.shape[-1]:
        raise PreconditionError(
            f"dimension mismatch: {x.shape[-1]} vs {y.shape[-1]}")
    out = np.max(np.abs(x - y), axis=-1)
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# global invariants of finite spaces


def diameter(X: FiniteMetricSpace) -> float:
    return float(X.dist.max())


def radius(X: FiniteMetricSpace) -> float:
    """min over x of max over y of d(x, y)."""
    return float(X.dist.max(axis=1).min())


def four_point_delta(X: FiniteMetricSpace, chunk: int = 16) -> float:
    """Smallest delta for which the four-point condition holds.

    For every quadruple the three pair-sums are compared; the defect is the
    largest sum minus the second largest. Returns the maximal defect over all
    quadruples (0 for tree-like spaces).
    """
    d = X.dist
    n = len(X)
    if n < 4:
        return 0.0
    best = 0.0
    for w0 in range(0, n, chunk):
        dw = d[w0:w0 + chunk]
        # axes: w, x, y, z
        s1 = dw[:, :, None, None] + d[None, None, :, :]          # d(w,x) + d(y,z)
        s2 = dw[:, None, :, None] + d[None, :, None, :]          # d(w,y) + d(x,z)
        s3 = dw[:, None, None, :] + d[None, :, :, None]          # d(w,z) + d(x,y)
        hi = np.maximum(np.maximum(s1, s2), s3)
        lo = np.minimum(np.minimum(s1, s2), s3)
        mid = s1 + s2 + s3 - hi - lo
        best = max(best, float((hi - mid).max()))
    return max(best, 0.0)


def antipode_map(X: FiniteMetricSpace, tol: float = TOL_METRIC) -> list[int] | None:
    """Index of an antipode for every point, or None if X is not antipodal.

    xbar is an antipode of x when d(x, xbar) = d(x, y) + d(y, xbar) for every
    y. When several candidates qualify the smallest index wins.
    """
    d = X.dist
    out = []
    for x in range(len(X)):
        # ok[c] <=> candidate c works for every y
        resid = np.abs(d[x][None, :] + d - d[x][:, None])   # [c, y]
        ok = np.all(resid <= tol, axis=1)
        hits = np.flatnonzero(ok)
        if hits.size == 0:
            return None
        out.append(int(hits[0]))
    return out


def hausdorff_circle(sample, n_probe: int = 1 << 16) -> float:
    """Hausdorff distance between S^1 and a finite sample of it.

    Evaluated as the largest distance from a uniform probe grid of
    ``n_probe`` angles to the nearest sample angle, so it agrees with half
    the largest circular gap up to one probe step (2pi / n_probe).
    """
    angles = np.sort(normalize_angle(np.atleast_1d(np.asarray(
        [float(s) for s in sample] if not isinstance(sample, np.ndarray) else sample,
        dtype=float))))
    if angles.size == 0:
        raise PreconditionError("hausdorff_circle needs a nonempty sample")
    probes = np.arange(n_probe) * (TWO_PI / n_probe)
    pos = np.searchsorted(angles, probes)
    right = angles[pos % angles.size]
    left = angles[(pos - 1) % angles.size]
    near = np.minimum(circle_dist(probes, right), circle_dist(probes, left))
    return float(near.max())


# ---------------------------------------------------------------------------
# standard constructions


def cycle_graph(n: int, labels: Sequence[Hashable] | None = None) -> FiniteMetricSpace:
    """Shortest-path metric of the cycle C_n with unit edges.

    Labels default to 1..n so that vertex i sits next to i-1 and i+1.
    """
    if n < 1:
        raise ValueError("cycle needs at least one vertex")
    i = np.arange(n)
    gap = np.abs(i[:, None] - i[None, :])
    dist = np.minimum(gap, n - gap).astype(float)
    return FiniteMetricSpace(tuple(labels) if labels else tuple(range(1, n + 1)), dist)


def line_space(coords: Sequence[float], labels: Sequence[Hashable] | None = None) -> FiniteMetricSpace:
    c = np.asarray(coords, dtype=float)
    return FiniteMetricSpace(tuple(labels) if labels else tuple(range(len(c))),
                             np.abs(c[:, None] - c[None, :]))


def from_points(points, metric="euclidean", labels=None) -> FiniteMetricSpace:
    """Distance table of a point cloud; metric is 'euclidean', 'linf' or 'circle'."""
    pts = np.asarray(points, dtype=float)
    if metric == "circle":
        dist = circle_dist(pts[:, None], pts[None, :])
    elif metric == "linf":
        dist = linf_dist(pts[:, None, :], pts[None, :, :])
    elif metric == "euclidean":
        dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
    elif metric == "sphere":
        dist = np.arccos(np.clip(pts @ pts.T, -1.0, 1.0))
        np.fill_diagonal(dist, 0.0)
    else:
        raise ValueError(f"unknown metric {metric!r}")
    dist = 0.5 * (dist + dist.T)
    return FiniteMetricSpace(tuple(labels) if labels else tuple(range(len(pts))), dist)


def tree_metric(n_nodes: int, edges, weights) -> FiniteMetricSpace:
    """Path metric of a weighted tree given as an edge list on 0..n_nodes-1."""
    adj = [[] for _ in range(n_nodes)]
    for (a, b), w in zip(edges, weights):
        adj[a].append((b, float(w)))
        adj[b].append((a, float(w)))
    dist = np.full((n_nodes, n_nodes), np.inf)
    for src in range(n_nodes):
        dist[src, src] = 0.0
        stack = [src]
        while stack:
            u = stack.pop()
            for v, w in adj[u]:
                if not np.isfinite(dist[src, v]):
                    dist[src, v] = dist[src, u] + w
                    stack.append(v)
    if not np.all(np.isfinite(dist)):
        raise PreconditionError("edge list does not span a connected tree")
    return FiniteMetricSpace(tuple(range(n_nodes)), dist)


def random_tree(rng: np.random.Generator, n_nodes: int, max_weight: int = 10):
    """Random labelled tree (random recursive attachment) with integer weights.

    Returns ``(edges, weights)``.
    """
    edges = [(int(rng.integers(0, v)), v) for v in range(1, n_nodes)]
    weights = rng.integers(1, max_weight + 1, size=len(edges)).astype(float)
    return edges, weights


def random_tree_metric(rng: np.random.Generator, n_nodes: int, max_weight: int = 10) -> FiniteMetricSpace:
    edges, weights = random_tree(rng, n_nodes, max_weight)
    return tree_metric(n_nodes, edges, weights)
