"""Cone geometry in R^n with the sup-norm.

At a base point p the 2n cones p + xi*Lambda_i (axis i, sign xi) hold the
points z whose largest coordinate gap to p is xi*(z_i - p_i). Axes are
0-based here. A point p is X-surrounding when every cone at p meets X and
X-minimal when d(p, .) restricted to X is a minimal function, i.e. for each
x in X some y in X has p in the metric interval I_xy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import ConvergenceError, PreconditionError
from .metric_core import TOL_METRIC, linf_dist
from .results import Verdict

TOL_CONE = 1e-6
DYKSTRA_TOL = 1e-9
DYKSTRA_MAX_ITER = 100_000


def _vec(z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise PreconditionError("coordinates must be finite")
    return z


def _same_dim(*arrays):
    dims = {a.shape[-1] for a in arrays}
    if len(dims) != 1:
        raise PreconditionError(f"dimension mismatch: {sorted(dims)}")


@dataclass(frozen=True)
class Cone:
    """The cone base + sign * Lambda_axis (axis is a 0-based coordinate index)."""

    base: np.ndarray
    axis: int
    sign: int = 1

    def __post_init__(self):
        b = _vec(self.base)
        if b.ndim != 1:
            raise PreconditionError("cone base must be a vector")
        if not 0 <= self.axis < len(b):
            raise PreconditionError(f"axis {self.axis} out of range for dimension {len(b)}")
        if self.sign not in (1, -1):
            raise PreconditionError("sign must be +1 or -1")
        object.__setattr__(self, "base", b)

    @property
    def dim(self) -> int:
        return len(self.base)

    def mirror(self) -> "Cone":
        return Cone(self.base, self.axis, -self.sign)


def all_cones(p) -> list[Cone]:
    p = _vec(p)
    return [Cone(p, i, s) for i in range(len(p)) for s in (1, -1)]


def cone_slack(c: Cone, z) -> np.ndarray:
    """d(z, base) - sign * (z_axis - base_axis); zero exactly on the cone."""
    z = _vec(z)
    _same_dim(z, c.base)
    u = z - c.base
    return np.max(np.abs(u), axis=-1) - c.sign * u[..., c.axis]


def in_cone(c: Cone, z, tol: float = TOL_METRIC):
    out = cone_slack(c, z) <= tol
    return bool(out) if np.ndim(out) == 0 else out


def interval_residual(x, y, z):
    """d(x, z) + d(z, y) - d(x, y)."""
    x, y, z = _vec(x), _vec(y), _vec(z)
    _same_dim(x, y, z)
    return linf_dist(x, z) + linf_dist(z, y) - linf_dist(x, y)


def in_interval(x, y, z, tol: float = TOL_METRIC):
    out = np.asarray(interval_residual(x, y, z)) <= tol
    return bool(out) if out.ndim == 0 else out


def dominant_cone(x, y) -> Cone:
    """A cone at x containing y (axis of the largest gap, ties to the lowest index)."""
    x, y = _vec(x), _vec(y)
    _same_dim(x, y)
    u = y - x
    i = int(np.argmax(np.abs(u)))
    return Cone(x, i, 1 if u[i] >= 0 else -1)


def interval_decomposition_check(x, y, probes, tol: float = TOL_METRIC) -> bool:
    """I_xy equals (x + xi Lambda_i) intersect (y - xi Lambda_i) on every probe."""
    c = dominant_cone(x, y)
    back = Cone(_vec(y), c.axis, -c.sign)
    probes = np.atleast_2d(_vec(probes))
    lhs = in_interval(x, y, probes, tol)
    rhs = in_cone(c, probes, tol) & in_cone(back, probes, tol)
    return bool(np.all(np.asarray(lhs) == np.asarray(rhs)))


def sample_interval(rng: np.random.Generator, x, y, count: int) -> np.ndarray:
    """Random points of I_xy, built coordinate by coordinate.

    Along the dominant axis the point moves s in [0, D] away from x; every
    other coordinate is drawn from the range allowed by both cone bounds.
    """
    x, y = _vec(x), _vec(y)
    c = dominant_cone(x, y)
    D = float(linf_dist(x, y))
    s = rng.uniform(0.0, D, size=count)
    lo = np.maximum(x[None, :] - s[:, None], y[None, :] - (D - s)[:, None])
    hi = np.minimum(x[None, :] + s[:, None], y[None, :] + (D - s)[:, None])
    z = lo + rng.random((count, len(x))) * np.clip(hi - lo, 0.0, None)
    z[:, c.axis] = x[c.axis] + c.sign * s
    return z


def random_cone_point(rng: np.random.Generator, c: Cone, scale: float = 1.0, count: int = 1) -> np.ndarray:
    """Random points of the cone c."""
    t = rng.uniform(0.0, scale, size=count)
    u = rng.uniform(-1.0, 1.0, size=(count, c.dim)) * t[:, None]
    u[:, c.axis] = c.sign * t
    return c.base[None, :] + u


# ---------------------------------------------------------------------------
# exact shapes


def _dykstra_min_norm(center: np.ndarray, axis: int, sign: int,
                      tol: float = DYKSTRA_TOL, max_iter: int = DYKSTRA_MAX_ITER) -> np.ndarray:
    """Point of minimal Euclidean norm in each cone c_k + sign*Lambda_axis.

    ``center`` has shape (B, n); the cone is the intersection of half-spaces
    sign*(z_axis - c_axis) -/+ (z_j - c_j) >= 0 for j != axis (and
    sign*(z_axis - c_axis) >= 0 when n = 1). Dykstra's alternating projection
    of the origin onto the half-spaces converges to the nearest cone point.
    """
    B, n = center.shape
    normals = []
    for j in range(n):
        if j == axis:
            continue
        for t in (1.0, -1.0):
            a = np.zeros(n)
            a[axis] = -sign
            a[j] = t
            normals.append(a)        # a . (z - c) <= 0
    if not normals:
        a = np.zeros(n)
        a[axis] = -sign
        normals.append(a)
    A = np.array(normals)
    A_sq = (A * A).sum(axis=1)
    z = np.zeros((B, n))
    incr = np.zeros((len(A), B, n))
    active = np.ones(B, dtype=bool)
    for it in range(max_iter):
        prev = z.copy()
        for k in range(len(A)):
            w = z + incr[k]
            viol = ((w - center) @ A[k]) / A_sq[k]
            proj = w - np.maximum(viol, 0.0)[:, None] * A[k][None, :]
            incr[k] = w - proj
            z = proj
        change = np.abs(z - prev).max(axis=1)
        active = change > tol
        if not np.any(active):
            return z
    raise ConvergenceError(
        f"Dykstra projection did not converge in {max_iter} iterations",
        residual=float(change.max()), iterations=max_iter)


@dataclass(frozen=True)
class SphereShape:
    """Euclidean sphere |z - center|_2 = radius."""

    center: np.ndarray
    radius: float = 1.0
    kind: str = "sphere"

    def contains(self, pts, tol=1e-9):
        return np.abs(np.linalg.norm(pts - self.center, axis=1) - self.radius) <= tol

    def cone_meets(self, P: np.ndarray, axis: int, sign: int, tol: float = TOL_CONE) -> np.ndarray:
        """Exact test for a batch of base points P (rows)."""
        rel = P - self.center[None, :]
        inside = np.linalg.norm(rel, axis=1) <= self.radius
        out = inside.copy()
        if np.any(~inside):
            z = _dykstra_min_norm(rel[~inside], axis, sign)
            out[~inside] = np.linalg.norm(z, axis=1) <= self.radius + tol
        return out


@dataclass(frozen=True)
class BallShape(SphereShape):
    """Closed Euclidean ball |z - center|_2 <= radius."""

    kind: str = "ball"

    def contains(self, pts, tol=1e-9):
        return np.linalg.norm(pts - self.center, axis=1) <= self.radius + tol


@dataclass(frozen=True)
class BoxShape:
    """Axis-parallel box lo <= z <= hi."""

    lo: np.ndarray
    hi: np.ndarray
    kind: str = "box"

    def contains(self, pts, tol=1e-9):
        return np.all((pts >= self.lo - tol) & (pts <= self.hi + tol), axis=1)

    def cone_meets(self, P: np.ndarray, axis: int, sign: int, tol: float = TOL_CONE) -> np.ndarray:
        # push coordinate `axis` as far as the box allows, keep the others closest to p
        far = self.hi[axis] if sign > 0 else self.lo[axis]
        t = sign * (far - P[:, axis])
        gap = np.maximum(np.maximum(self.lo[None, :] - P, P - self.hi[None, :]), 0.0)
        gap[:, axis] = 0.0
        return (t >= -tol) & (t >= gap.max(axis=1) - tol)


@dataclass(frozen=True)
class SegmentsShape:
    """Finite union of closed segments [a_k, b_k] (a point is a segment with a = b)."""

    segments: tuple
    kind: str = "segments"

    def _arrays(self):
        a = np.array([s[0] for s in self.segments], dtype=float)
        b = np.array([s[1] for s in self.segments], dtype=float)
        return a, b

    def contains(self, pts, tol=1e-9):
        a, b = self._arrays()
        d = b - a
        dd = np.maximum((d * d).sum(axis=1), 1e-300)
        s = np.clip(((pts[:, None, :] - a[None]) * d[None]).sum(-1) / dd[None], 0, 1)
        near = a[None] + s[..., None] * d[None]
        return np.linalg.norm(pts[:, None, :] - near, axis=2).min(axis=1) <= tol

    def cone_meets(self, P: np.ndarray, axis: int, sign: int, tol: float = TOL_CONE) -> np.ndarray:
        """Each cone constraint is affine in the segment parameter s in [0, 1]."""
        a, b = self._arrays()
        n = a.shape[1]
        out = np.zeros(len(P), dtype=bool)
        for ak, bk in zip(a, b):
            lo = np.zeros(len(P))
            hi = np.ones(len(P))
            rows = []
            for j in range(n):
                if j == axis:
                    continue
                for t in (1.0, -1.0):
                    rows.append((j, t))
            if not rows:
                rows.append((None, 0.0))
            for j, t in rows:
                # sign*(z_axis - p_axis) + t*(z_j - p_j) >= 0 with z = a + s (b - a)
                alpha = sign * (ak[axis] - P[:, axis])
                beta = np.full(len(P), sign * (bk[axis] - ak[axis]))
                if j is not None:
                    alpha = alpha + t * (ak[j] - P[:, j])
                    beta = beta + t * (bk[j] - ak[j])
                alpha = alpha + tol
                pos = beta > 0
                neg = beta < 0
                with np.errstate(divide="ignore", invalid="ignore"):
                    root = -alpha / beta
                lo = np.where(pos, np.maximum(lo, root), lo)
                hi = np.where(neg, np.minimum(hi, root), hi)
                hi = np.where((beta == 0) & (alpha < 0), -1.0, hi)
            out |= lo <= hi
        return out


@dataclass(frozen=True)
class SampledLinfSet:
    """Finite sample of a set X in R^n_inf, optionally tagged with its exact shape."""

    points: np.ndarray
    shape: object = None
    label: str = ""

    def __post_init__(self):
        pts = np.atleast_2d(_vec(self.points)).copy()
        if pts.size == 0:
            raise PreconditionError("sample must be nonempty")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.shape is not None and not np.all(self.shape.contains(pts)):
            raise PreconditionError("sample points do not lie on the tagged shape")

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return len(self.points)

    def spacing(self) -> float:
        """Median sup-norm distance from a sample point to its nearest neighbour.

        The median ignores isolated points (such as the apex of the
        segment-plus-apex example), which would otherwise dominate.
        """
        s = self.__dict__.get("_spacing")
        if s is None:
            if len(self) < 2:
                s = 0.0
            else:
                d, _ = cKDTree(self.points).query(self.points, k=2, p=np.inf)
                s = float(np.median(d[:, 1]))
            object.__setattr__(self, "_spacing", s)
        return s

    def sample_tol(self) -> float:
        return 2.0 * self.spacing()

    def bounding_box(self):
        return self.points.min(axis=0), self.points.max(axis=0)

    def union(self, extra) -> "SampledLinfSet":
        return SampledLinfSet(np.vstack([self.points, np.atleast_2d(extra)]), None, self.label + "+")

    def untagged(self) -> "SampledLinfSet":
        return SampledLinfSet(self.points, None, self.label)


def _even_sphere_points(dim: int, count: int, rng) -> np.ndarray:
    if dim == 2:
        a = 2 * math.pi * (np.arange(count) + 0.5) / count
        return np.column_stack([np.cos(a), np.sin(a)])
    if dim == 3:
        from .sphere_mountain import fibonacci_sphere
        return fibonacci_sphere(count)
    x = rng.normal(size=(count, dim))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def sphere_sample(dim: int, count: int, seed=0, radius: float = 1.0) -> SampledLinfSet:
    """Sample of the Euclidean unit sphere in R^dim (i.e. S^{dim-1}_inf)."""
    rng = np.random.default_rng(seed)
    pts = radius * _even_sphere_points(dim, count, rng)
    return SampledLinfSet(pts, SphereShape(np.zeros(dim), radius), f"S^{dim - 1}_inf")


def ball_sample(dim: int, count: int, seed=0, radius: float = 1.0) -> SampledLinfSet:
    """Sample of the closed Euclidean unit ball in R^dim (D^dim_inf): shell plus interior."""
    rng = np.random.default_rng(seed)
    shell = _even_sphere_points(dim, count // 2, rng)
    x = rng.normal(size=(count - count // 2, dim))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    inner = x * rng.random(len(x))[:, None] ** (1.0 / dim)
    pts = radius * np.vstack([shell, inner])
    return SampledLinfSet(pts, BallShape(np.zeros(dim), radius), f"D^{dim}_inf")


def box_sample(lo, hi, count: int, seed=0) -> SampledLinfSet:
    """Random sample of a box, including all corners."""
    lo, hi = _vec(lo), _vec(hi)
    rng = np.random.default_rng(seed)
    corners = np.array(np.meshgrid(*[[a, b] for a, b in zip(lo, hi)], indexing="ij")).reshape(len(lo), -1).T
    inner = lo + rng.random((max(count - len(corners), 0), len(lo))) * (hi - lo)
    return SampledLinfSet(np.vstack([corners, inner]), BoxShape(lo, hi), "box")


def segment_apex_example(count: int = 200) -> SampledLinfSet:
    """X = ([-1, 1] x {0}) union {(0, 3)} sampled with ``count`` points."""
    t = np.linspace(-1.0, 1.0, count - 1)
    pts = np.vstack([np.column_stack([t, np.zeros_like(t)]), [[0.0, 3.0]]])
    shape = SegmentsShape((((-1.0, 0.0), (1.0, 0.0)), ((0.0, 3.0), (0.0, 3.0))))
    return SampledLinfSet(pts, shape, "segment+apex")


# ---------------------------------------------------------------------------
# surrounding and minimal points


def cone_set_intersects(c: Cone, X: SampledLinfSet, exact: bool | None = None,
                        tol: float | None = None) -> bool:
    """Whether the cone meets X.

    With a shape tag (and ``exact`` not False) the decision is exact up to
    ``TOL_CONE``; otherwise a sample point must satisfy the cone equality up
    to ``tol`` (default twice the sample spacing).
    """
    return bool(cones_meet(np.atleast_2d(c.base), c.axis, c.sign, X, exact, tol)[0])


def cones_meet(P: np.ndarray, axis: int, sign: int, X: SampledLinfSet,
               exact: bool | None = None, tol: float | None = None) -> np.ndarray:
    """Vectorized ``cone_set_intersects`` for base points P (rows)."""
    P = np.atleast_2d(_vec(P))
    _same_dim(P, X.points)
    if exact is None:
        exact = X.shape is not None
    if exact:
        if X.shape is None:
            raise PreconditionError("exact cone test needs a shape tag")
        return X.shape.cone_meets(P, axis, sign, TOL_CONE if tol is None else tol)
    tol = X.sample_tol() if tol is None else tol
    out = np.empty(len(P), dtype=bool)
    for k, p in enumerate(P):
        u = X.points - p
        s = np.max(np.abs(u), axis=1) - sign * u[:, axis]
        out[k] = s.min() <= tol
    return out


def surrounding_mask(P, X: SampledLinfSet, exact: bool | None = None, tol: float | None = None) -> np.ndarray:
    P = np.atleast_2d(_vec(P))
    ok = np.ones(len(P), dtype=bool)
    for i in range(X.dim):
        for s in (1, -1):
            ok &= cones_meet(P, i, s, X, exact, tol)
    return ok


def is_surrounding(p, X: SampledLinfSet, exact: bool | None = None, tol: float | None = None) -> bool:
    """All 2n cones at p meet X."""
    return bool(surrounding_mask(np.atleast_2d(p), X, exact, tol)[0])


def minimality_residual(p, X: SampledLinfSet) -> float:
    """max over x in X of min over y in X of d(x,p) + d(p,y) - d(x,y).

    Uses d(x,p) + d(p,y) - d(x,y) = min over (k, xi) of
    slack_{k,xi}(x) + slack_{k,-xi}(y), where slack_{k,xi}(z) is
    d(z,p) - xi (z_k - p_k), so the inner minimum over y separates.
    """
    p = _vec(p)
    _same_dim(p, X.points)
    u = X.points - p
    norm = np.max(np.abs(u), axis=1)
    plus = norm[:, None] - u          # slack for xi = +1, shape (m, n)
    minus = norm[:, None] + u         # slack for xi = -1
    best_y_plus = plus.min(axis=0)
    best_y_minus = minus.min(axis=0)
    per_x = np.minimum((plus + best_y_minus[None, :]).min(axis=1),
                       (minus + best_y_plus[None, :]).min(axis=1))
    return float(per_x.max())


def minimality_residuals(P, X: SampledLinfSet, chunk: int = 32) -> np.ndarray:
    """``minimality_residual`` for each row of P."""
    P = np.atleast_2d(_vec(P))
    _same_dim(P, X.points)
    out = np.empty(len(P))
    for s in range(0, len(P), chunk):
        u = X.points[None, :, :] - P[s:s + chunk, None, :]      # (b, m, n)
        norm = np.max(np.abs(u), axis=2)[..., None]
        plus = norm - u
        minus = norm + u
        per_x = np.minimum((plus + minus.min(axis=1, keepdims=True)).min(axis=2),
                           (minus + plus.min(axis=1, keepdims=True)).min(axis=2))
        out[s:s + chunk] = per_x.max(axis=1)
    return out


def minimality_residual_pairwise(p, X: SampledLinfSet) -> float:
    """Same quantity by brute force over all pairs (quadratic in |X|)."""
    p = _vec(p)
    dp = linf_dist(X.points, p)
    dxy = linf_dist(X.points[:, None, :], X.points[None, :, :])
    return float((dp[:, None] + dp[None, :] - dxy).min(axis=1).max())


def is_minimal_point(p, X: SampledLinfSet, tol: float | None = None) -> bool:
    """Every sample x has a sample y with p in I_xy, up to ``tol``.

    The default tolerance is twice the sample spacing; passing at that
    density certifies minimality only up to perturbations of that size.
    """
    if len(X) == 0:
        raise PreconditionError("X must be nonempty")
    tol = X.sample_tol() if tol is None else tol
    return minimality_residual(p, X) <= tol


def surrounding_distance_preservation(p, q, X: SampledLinfSet, tol: float | None = None,
                                      check_pre: bool = True) -> Verdict:
    """sup over x in X of |d(p,x) - d(q,x)| equals d(p,q)."""
    p, q = _vec(p), _vec(q)
    if check_pre and not (is_surrounding(p, X) and is_surrounding(q, X)):
        raise PreconditionError("both points must be X-surrounding")
    tol = X.sample_tol() if tol is None else tol
    lhs = float(np.abs(linf_dist(X.points, p) - linf_dist(X.points, q)).max())
    rhs = float(linf_dist(p, q))
    return Verdict(abs(lhs - rhs) <= tol, abs(lhs - rhs), tol, {"sup_gap": lhs, "distance": rhs})


def mirror_lemma_check(p, X: SampledLinfSet, margin: float = TOL_CONE,
                       exact: bool | None = None, check_pre: bool = True,
                       min_tol: float | None = None) -> Verdict:
    """Every cone whose interior holds a sample point has a mirror meeting X."""
    p = _vec(p)
    if check_pre and not is_minimal_point(p, X, min_tol):
        raise PreconditionError("mirror lemma needs an X-minimal point")
    u = X.points - p
    absu = np.abs(u)
    checked, failed = [], []
    for i in range(X.dim):
        others = np.delete(absu, i, axis=1)
        bound = others.max(axis=1) if others.shape[1] else np.zeros(len(u))
        for s in (1, -1):
            if np.any(s * u[:, i] > bound + margin):
                checked.append((i, s))
                if not cones_meet(p[None, :], i, -s, X, exact)[0]:
                    failed.append((i, s))
    return Verdict(not failed, float(len(failed)), margin,
                   {"interior_cones": checked, "failed": failed})


# ---------------------------------------------------------------------------
# the non-injectivity witness


def witness_lambda_max(n: int) -> float:
    """Largest lambda with lambda^2 + 2 lambda <= (n-1)^2 / (4n)."""
    return -1.0 + math.sqrt(1.0 + (n - 1) ** 2 / (4.0 * n))


@dataclass
class WitnessResult:
    point: np.ndarray
    valid: bool
    reason: str
    discriminant: float
    root: float | None = None
    residuals: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "VALID" if self.valid else "INVALID"

    def to_dict(self):
        return {"point": self.point.tolist(), "verdict": self.verdict, "reason": self.reason,
                "discriminant": self.discriminant, "root": self.root, "residuals": self.residuals}


def witness_point(n: int, lam: float, tol: float = 1e-9) -> WitnessResult:
    """Candidate point of F(S^n_inf) outside the unit ball.

    p = (1 + lam)/sqrt(n+1) * (1, ..., 1) in R^{n+1}. For each axis i the
    sign-flipped diagonal v^i lies in p - Lambda_i, and p - t v^i lies in
    p + Lambda_i for t > 0; it reaches the sphere when
    t^2 - 2(n-1)(1+lam)/(n+1) t + lam^2 + 2 lam = 0 has a positive root.
    """
    if lam <= 0:
        raise PreconditionError("lambda must be positive")
    if n < 1:
        raise PreconditionError("n must be at least 1")
    d = n + 1
    r = math.sqrt(d)
    p = np.full(d, (1.0 + lam) / r)
    disc = (n - 1) ** 2 * (1 + lam) ** 2 - (n + 1) ** 2 * (lam * lam + 2 * lam)
    if disc < 0:
        return WitnessResult(p, False, "discriminant is negative: no real root", disc)
    b = 2.0 * (n - 1) * (1 + lam) / (n + 1)
    # the quadratic's discriminant in t is b^2 - 4c = 4 disc / (n+1)^2
    sq = math.sqrt(max(b * b - 4.0 * (lam * lam + 2.0 * lam), 0.0))
    t = 0.5 * (b + sq)
    if t <= 0:
        return WitnessResult(p, False, "no positive root", disc, t)
    res = {"cone_minus": 0.0, "cone_plus": 0.0, "sphere": 0.0, "v_norm": 0.0}
    for i in range(d):
        v = np.full(d, 1.0 / r)
        v[i] = -1.0 / r
        res["v_norm"] = max(res["v_norm"], abs(float(np.linalg.norm(v)) - 1.0))
        res["cone_minus"] = max(res["cone_minus"], abs(float(cone_slack(Cone(p, i, -1), v))))
        z = p - t * v
        res["cone_plus"] = max(res["cone_plus"], abs(float(cone_slack(Cone(p, i, 1), z))))
        res["sphere"] = max(res["sphere"], abs(float(np.linalg.norm(z)) - 1.0))
    res["norm_p"] = float(np.linalg.norm(p))
    ok = all(res[k] <= tol for k in ("cone_minus", "cone_plus", "sphere", "v_norm")) \
        and res["norm_p"] > 1.0
    reason = "all cone witnesses on the sphere" if ok else "a cone witness misses the sphere"
    return WitnessResult(p, ok, reason, disc, t, res)


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class CoincidenceReport:
    requested: int
    candidates: int
    accepted: int
    surrounding: int
    outside_ball: int
    mirror_passed: int
    worst_min_residual: float
    worst_outside_norm: float
    sample_size: int
    sample_spacing: float
    accept_tol: float
    points: np.ndarray = field(repr=False, default=None)

    @property
    def passed(self) -> bool:
        return (self.accepted >= self.requested and self.surrounding == self.accepted
                and self.mirror_passed == self.accepted)

    def to_dict(self):
        d = {k: v for k, v in self.__dict__.items() if k != "points"}
        d["passed"] = self.passed
        return d


def s2_coincidence_sweep(samples: int = 500, seed=0, sample_size: int = 20_000,
                         accept_tol: float = 1e-9, outside_fraction: float = 0.9,
                         max_candidates: int = 2_000_000, batch: int = 500) -> CoincidenceReport:
    """Minimal points of a dense S^2_inf sample are surrounding.

    Candidates are drawn from the bounding box [-1, 1]^3, half of them
    biased (``outside_fraction``) to the shell 1 <= |z|_2 <= 1.1 where the
    points outside the ball live.
    A candidate is accepted when its sampled minimality residual is at most
    ``accept_tol``; accepted points are then tested with the exact cone test
    and the mirror lemma.
    """
    X = sphere_sample(3, sample_size, seed)
    rng = np.random.default_rng(seed)
    accepted = []
    worst = 0.0
    seen = 0
    while len(accepted) < samples and seen < max_candidates:
        k_out = int(batch * outside_fraction)
        box = rng.uniform(-1, 1, size=(batch - k_out, 3))
        dirs = rng.normal(size=(k_out, 3))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        shell = dirs * rng.uniform(1.0, 1.1, size=(k_out, 1))
        shell = shell[np.all(np.abs(shell) <= 1.0, axis=1)]
        cand = np.vstack([box, shell])
        seen += len(cand)
        res = minimality_residuals(cand, X)
        for z, r in zip(cand, res):
            if r <= accept_tol:
                accepted.append(z)
                worst = max(worst, r)
                if len(accepted) >= samples:
                    break
    pts = np.array(accepted).reshape(-1, 3)
    surr = surrounding_mask(pts, X, exact=True) if len(pts) else np.zeros(0, bool)
    mirror = sum(bool(mirror_lemma_check(z, X, exact=True, check_pre=False)) for z in pts)
    norms = np.linalg.norm(pts, axis=1) if len(pts) else np.zeros(0)
    return CoincidenceReport(samples, seen, len(pts), int(surr.sum()), int((norms > 1).sum()),
                             int(mirror), worst, float(norms.max()) if len(norms) else 0.0,
                             len(X), X.spacing(), accept_tol, pts)


def random_surrounding_points(X: SampledLinfSet, count: int, rng, batch: int = 2000,
                              max_draws: int = 1_000_000) -> np.ndarray:
    """Rejection sample of exactly-surrounding points from the bounding box."""
    lo, hi = X.bounding_box()
    out = []
    drawn = 0
    while sum(len(o) for o in out) < count and drawn < max_draws:
        cand = lo + rng.random((batch, X.dim)) * (hi - lo)
        drawn += batch
        out.append(cand[surrounding_mask(cand, X, exact=True)])
    pts = np.vstack(out) if out else np.zeros((0, X.dim))
    return pts[:count]


def convexity_sweep(X: SampledLinfSet, trials: int = 200, seed=0) -> Verdict:
    """Midpoints of random surrounding pairs are surrounding (convex X only)."""
    if X.shape is None or X.shape.kind not in ("box", "ball"):
        raise PreconditionError("convexity sweep needs a box or ball tag")
    rng = np.random.default_rng(seed)
    pts = random_surrounding_points(X, 2 * trials, rng)
    if len(pts) < 2 * trials:
        raise ConvergenceError("could not draw enough surrounding points")
    mids = 0.5 * (pts[:trials] + pts[trials:])
    ok = surrounding_mask(mids, X, exact=True)
    return Verdict(bool(ok.all()), float((~ok).sum()), TOL_CONE, {"trials": trials})


def idempotence_probe(X: SampledLinfSet, candidates, tol: float | None = None) -> Verdict:
    """Minimal points of X stay minimal for the sample X plus the candidates."""
    cand = np.atleast_2d(_vec(candidates))
    tol = X.sample_tol() if tol is None else tol
    for z in cand:
        if minimality_residual(z, X) > tol:
            raise PreconditionError("every candidate must be X-minimal")
    Y = X.union(cand)
    resid = max(minimality_residual(z, Y) for z in cand)
    return Verdict(resid <= tol, resid, tol, {"candidates": len(cand), "augmented_size": len(Y)})
