"""Grid model of the tight span of the circle.

The circle is R / 2pi with its geodesic metric. A member of the reduced
span F(S^1) is a 1-Lipschitz function f on [0, pi] with f(0) + f(pi) = pi,
stored by its values at theta_j = j pi / N, j = 0..N (``GridFunction``).
Reflecting it through f(theta + pi) = pi - f(theta) gives a function on the
whole circle (``CircleGridFunction``, 2N values at the same spacing).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import trapezoid

from .errors import PreconditionError, SchemaError
from .metric_core import TOL_METRIC, TWO_PI, circle_dist, normalize_angle

PI = math.pi
DEFAULT_N = 360
TOL_SLOPE = 1e-6


def tol_grid(n_half: int) -> float:
    """Default tolerance for grid checks with N cells on [0, pi]."""
    return 2.0 * PI / n_half


def _values(v) -> np.ndarray:
    arr = np.array(v, dtype=float)
    if arr.ndim != 1 or not np.all(np.isfinite(arr)):
        raise PreconditionError("grid values must be a finite 1-d array")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class GridFunction:
    """Values at j pi / N for j = 0..N (so ``len(values) == n_cells + 1``)."""

    n_cells: int
    values: np.ndarray

    def __post_init__(self):
        vals = _values(self.values)
        object.__setattr__(self, "values", vals)
        if self.n_cells < 1 or vals.shape != (self.n_cells + 1,):
            raise PreconditionError(
                f"GridFunction with {self.n_cells} cells needs {self.n_cells + 1} values")

    @property
    def step(self) -> float:
        return PI / self.n_cells

    @property
    def angles(self) -> np.ndarray:
        return np.arange(self.n_cells + 1) * self.step

    @classmethod
    def from_callable(cls, fn, n_cells: int = DEFAULT_N) -> "GridFunction":
        theta = np.arange(n_cells + 1) * (PI / n_cells)
        return cls(n_cells, np.broadcast_to(fn(theta), theta.shape))

    def to_dict(self):
        return {"n_cells": self.n_cells, "values": self.values.tolist()}


@dataclass(frozen=True)
class CircleGridFunction:
    """Values at j pi / N for j = 0..2N-1; ``n_cells`` is 2N."""

    n_cells: int
    values: np.ndarray

    def __post_init__(self):
        vals = _values(self.values)
        object.__setattr__(self, "values", vals)
        if self.n_cells < 2 or self.n_cells % 2 or vals.shape != (self.n_cells,):
            raise PreconditionError(
                "CircleGridFunction needs an even number of cells and one value per cell")

    @property
    def half(self) -> int:
        return self.n_cells // 2

    @property
    def step(self) -> float:
        return TWO_PI / self.n_cells

    @property
    def angles(self) -> np.ndarray:
        return np.arange(self.n_cells) * self.step

    @classmethod
    def from_callable(cls, fn, n_half: int = DEFAULT_N) -> "CircleGridFunction":
        theta = np.arange(2 * n_half) * (PI / n_half)
        return cls(2 * n_half, np.broadcast_to(fn(theta), theta.shape))

    def restrict(self) -> GridFunction:
        return GridFunction(self.half, self.values[: self.half + 1])

    def to_dict(self):
        return {"n_cells": self.n_cells, "values": self.values.tolist()}


def grid_function_from_dict(obj):
    """Parse ``{"n_cells": N, "values": [...]}``.

    N+1 values give a GridFunction on [0, pi]; N values (N even) give a
    CircleGridFunction on the full circle.
    """
    if not isinstance(obj, dict) or "n_cells" not in obj or "values" not in obj:
        raise SchemaError('expected an object with keys "n_cells" and "values"')
    n, vals = obj["n_cells"], obj["values"]
    if not isinstance(n, int) or n < 1 or not isinstance(vals, list):
        raise SchemaError('"n_cells" must be a positive integer and "values" an array')
    try:
        arr = np.array(vals, dtype=float)
    except (TypeError, ValueError):
        raise SchemaError("grid values must be numbers") from None
    if arr.shape == (n + 1,):
        return GridFunction(n, arr)
    if arr.shape == (n,) and n % 2 == 0:
        return CircleGridFunction(n, arr)
    raise SchemaError(f"{len(vals)} values do not fit a grid with {n} cells")


# ---------------------------------------------------------------------------
# membership


def in_F(f: GridFunction, tol: float | None = None) -> bool:
    """Discrete 1-Lipschitz, endpoint sum pi, and range [0, pi]."""
    tol = tol_grid(f.n_cells) if tol is None else tol
    v = f.values
    return bool(np.all(np.abs(np.diff(v)) <= f.step + tol)
                and abs(v[0] + v[-1] - PI) <= tol
                and v.min() >= -tol and v.max() <= PI + tol)


def in_E(F: CircleGridFunction, tol: float | None = None) -> bool:
    """1-Lipschitz around the circle and f(theta) + f(theta + pi) = pi."""
    tol = tol_grid(F.half) if tol is None else tol
    v = F.values
    lip = np.abs(np.diff(v, append=v[0])).max() <= F.step + tol
    anti = np.abs(v + np.roll(v, -F.half) - PI).max() <= tol
    return bool(lip and anti)


def e_residuals(F: CircleGridFunction) -> dict:
    """Worst Lipschitz excess and antipodal-sum defect."""
    v = F.values
    return {
        "lipschitz_excess": float(np.abs(np.diff(v, append=v[0])).max() - F.step),
        "antipodal_defect": float(np.abs(v + np.roll(v, -F.half) - PI).max()),
    }


def extend_to_circle(f: GridFunction, tol: float | None = None) -> CircleGridFunction:
    """f on [0, pi] and pi - f(theta - pi) on (pi, 2pi)."""
    if not in_F(f, tol):
        raise PreconditionError("extend_to_circle needs a member of F(S^1)")
    v = f.values
    return CircleGridFunction(2 * f.n_cells, np.concatenate([v, PI - v[1:-1]]))


def sup_dist(f, g) -> float:
    if type(f) is not type(g) or f.n_cells != g.n_cells:
        raise PreconditionError("sup_dist needs two functions on the same grid")
    return float(np.abs(f.values - g.values).max())


def center(n_half: int = DEFAULT_N) -> CircleGridFunction:
    """The constant function pi/2."""
    return CircleGridFunction(2 * n_half, np.full(2 * n_half, PI / 2))


def kuratowski_circle(theta: float, n_half: int = DEFAULT_N) -> CircleGridFunction:
    """d(theta, .) sampled on the circle grid."""
    ang = np.arange(2 * n_half) * (PI / n_half)
    return CircleGridFunction(2 * n_half, circle_dist(ang, theta))


def kuratowski_grid(theta: float, n_cells: int = DEFAULT_N) -> GridFunction:
    """d(theta, .) restricted to [0, pi]."""
    ang = np.arange(n_cells + 1) * (PI / n_cells)
    return GridFunction(n_cells, circle_dist(ang, theta))


# ---------------------------------------------------------------------------
# subsets of [0, pi] and the extreme functions h_A


@dataclass(frozen=True)
class IntervalSubset:
    """Finite union of disjoint closed intervals inside [0, pi]."""

    intervals: tuple = ()

    def __post_init__(self):
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        prev = 0.0
        for a, b in ivs:
            if not (prev - TOL_METRIC <= a <= b <= PI + TOL_METRIC):
                raise PreconditionError(
                    "intervals must be sorted, disjoint and inside [0, pi]")
            prev = b
        object.__setattr__(self, "intervals", ivs)

    @property
    def bounds(self) -> np.ndarray:
        return np.array(self.intervals, dtype=float).reshape(-1, 2)

    def measure(self) -> float:
        b = self.bounds
        return float((b[:, 1] - b[:, 0]).sum())

    def measure_up_to(self, phi):
        """mu(A intersect [0, phi]), vectorized over phi."""
        phi = np.asarray(phi, dtype=float)
        b = self.bounds
        if b.size == 0:
            return np.zeros_like(phi)
        part = np.clip(phi[..., None] - b[:, 0], 0.0, b[:, 1] - b[:, 0])
        return part.sum(axis=-1)

    def intersection_measure(self, other: "IntervalSubset") -> float:
        a, b = self.bounds, other.bounds
        if a.size == 0 or b.size == 0:
            return 0.0
        lo = np.maximum(a[:, None, 0], b[None, :, 0])
        hi = np.minimum(a[:, None, 1], b[None, :, 1])
        return float(np.clip(hi - lo, 0.0, None).sum())

    def symmetric_difference_measure(self, other: "IntervalSubset") -> float:
        return self.measure() + other.measure() - 2.0 * self.intersection_measure(other)

    def to_dict(self):
        return {"intervals": [list(iv) for iv in self.intervals]}

    @classmethod
    def from_dict(cls, obj) -> "IntervalSubset":
        if not isinstance(obj, dict) or not isinstance(obj.get("intervals"), list):
            raise SchemaError('expected an object with an "intervals" array')
        try:
            ivs = [(float(a), float(b)) for a, b in obj["intervals"]]
        except (TypeError, ValueError):
            raise SchemaError("each interval must be a pair of numbers") from None
        try:
            return cls(tuple(ivs))
        except PreconditionError as exc:
            raise SchemaError(str(exc)) from None

    @classmethod
    def from_cells(cls, mask, n_cells: int) -> "IntervalSubset":
        """Union of the grid cells [j pi/N, (j+1) pi/N] with ``mask[j]`` set."""
        mask = np.asarray(mask, dtype=bool)
        edges = np.flatnonzero(np.diff(np.concatenate([[0], mask.astype(np.int8), [0]])))
        h = PI / n_cells
        return cls(tuple((s * h, e * h) for s, e in zip(edges[::2], edges[1::2])))


def random_interval_subset(rng: np.random.Generator, max_pieces: int = 6,
                           n_cells: int | None = None) -> IntervalSubset:
    """Random union of up to ``max_pieces`` intervals.

    With ``n_cells`` set, all endpoints are grid nodes j pi / n_cells.
    """
    k = int(rng.integers(0, max_pieces + 1))
    if n_cells is None:
        cuts = np.sort(rng.uniform(0.0, PI, size=2 * k))
    else:
        cuts = np.sort(rng.integers(0, n_cells + 1, size=2 * k)) * (PI / n_cells)
    pairs = [(a, b) for a, b in zip(cuts[::2], cuts[1::2]) if b > a]
    return IntervalSubset(tuple(pairs))


def h_A(A: IntervalSubset, n_cells: int = DEFAULT_N) -> GridFunction:
    """h_A(phi) = pi - mu(A) + 2 mu(A intersect [0, phi]) - phi at grid nodes."""
    phi = np.arange(n_cells + 1) * (PI / n_cells)
    return GridFunction(n_cells, PI - A.measure() + 2.0 * A.measure_up_to(phi) - phi)


def slopes(f: GridFunction) -> np.ndarray:
    return np.diff(f.values) / f.step


def is_extreme(f: GridFunction, tol_slope: float = TOL_SLOPE, tol: float | None = None) -> bool:
    """Every discrete slope is +1 or -1 (within ``tol_slope``)."""
    if not in_F(f, tol):
        raise PreconditionError("is_extreme needs a member of F(S^1)")
    return bool(np.all(np.abs(np.abs(slopes(f)) - 1.0) <= tol_slope))


@dataclass
class Decomposition:
    signs: np.ndarray          # (m, N) entries +1 / -1
    approximation: GridFunction
    error: float

    def subsets(self, limit: int | None = None):
        """The sampled extreme points as sets A (cells carrying slope +1)."""
        rows = self.signs if limit is None else self.signs[:limit]
        n = self.approximation.n_cells
        return [IntervalSubset.from_cells(r > 0, n) for r in rows]


def anchored_path(signs: np.ndarray, n_cells: int) -> np.ndarray:
    """±1-slope paths shifted so that the endpoint values sum to pi."""
    h = PI / n_cells
    steps = np.asarray(signs, dtype=float) * h
    partial = np.concatenate([np.zeros(steps.shape[:-1] + (1,)), np.cumsum(steps, axis=-1)], axis=-1)
    start = 0.5 * (PI - partial[..., -1:])
    return start + partial


def decompose_extreme(f: GridFunction, m: int, seed=0, tol: float | None = None) -> Decomposition:
    """Monte-Carlo average of extreme functions approximating f.

    Cell j gets slope +1 with probability (1 + s_j) / 2 where s_j is the
    slope of f there, so the anchored paths are unbiased for f.
    """
    if not in_F(f, tol):
        raise PreconditionError("decompose_extreme needs a member of F(S^1)")
    if m < 1:
        raise PreconditionError("sample count must be positive")
    rng = np.random.default_rng(seed)
    p_up = 0.5 * (1.0 + np.clip(slopes(f), -1.0, 1.0))
    signs = np.where(rng.random((m, f.n_cells)) < p_up, 1, -1).astype(np.int8)
    approx = anchored_path(signs, f.n_cells).mean(axis=0)
    g = GridFunction(f.n_cells, approx)
    return Decomposition(signs, g, sup_dist(f, g))


# ---------------------------------------------------------------------------
# center, thickenings and the retraction


@dataclass
class CenterReport:
    n_functions: int
    max_dist_to_center: float
    bound: float
    within_bound: bool
    n_kuratowski: int
    kuratowski_max_error: float
    kuratowski_ok: bool
    witness_failures: int
    tol: float

    @property
    def passed(self) -> bool:
        return self.within_bound and self.kuratowski_ok and self.witness_failures == 0


def _as_circle(f, tol=None) -> CircleGridFunction:
    return f if isinstance(f, CircleGridFunction) else extend_to_circle(f, tol)


def center_check(fs: Sequence, kuratowski_bases: Sequence[float] = (),
                 n_half: int | None = None, tol: float | None = None) -> CenterReport:
    """Radius pi/2 around the constant function, with a farther witness.

    For every f: ||f - pi/2|| <= pi/2 + tol. If f deviates from pi/2 by
    margin m, the Kuratowski function at the antipode of argmin f lies at
    distance >= pi/2 + m - tol, so no other function can serve as a center.
    Kuratowski functions at ``kuratowski_bases`` must sit at exactly pi/2.
    """
    circles = [_as_circle(f) for f in fs]
    if n_half is None:
        n_half = circles[0].half if circles else DEFAULT_N
    tol = tol_grid(n_half) if tol is None else tol
    f0 = center(n_half)
    worst = 0.0
    failures = 0
    for F in circles:
        if F.half != n_half:
            raise PreconditionError("all functions must share one grid")
        d = sup_dist(F, f0)
        worst = max(worst, d)
        j = int(np.argmin(F.values))
        witness = kuratowski_circle(F.angles[j] + PI, n_half)
        if sup_dist(F, witness) < PI / 2 + d - tol:
            failures += 1
    kerr = 0.0
    for theta in kuratowski_bases:
        kerr = max(kerr, abs(sup_dist(kuratowski_circle(theta, n_half), f0) - PI / 2))
    return CenterReport(len(circles), worst, PI / 2 + tol, worst <= PI / 2 + tol,
                        len(kuratowski_bases), kerr, kerr <= tol, failures, tol)


def _require_E(F: CircleGridFunction, what: str, tol=None):
    if not in_E(F, tol):
        raise PreconditionError(f"{what} needs a member of E(S^1)")


def in_thickening(F: CircleGridFunction, r: float, tol: float = 0.0) -> bool:
    """Whether min f < r - tol.

    The grid minimum is never below the true minimum, so with tol = 0 a
    True answer is always correct; callers wanting a margin pass ``tol``.
    """
    _require_E(F, "in_thickening")
    return bool(F.values.min() < r - tol)


def complement_lemma_check(F: CircleGridFunction, r: float, tol_band: float | None = None):
    """Compare min f < r with ||f - pi/2|| > pi/2 - r.

    Returns True or False when both quantities are farther than ``tol_band``
    from their thresholds and None (indeterminate) otherwise.
    """
    if not 0 < r <= PI / 2:
        raise PreconditionError("r must lie in (0, pi/2]")
    tol_band = tol_grid(F.half) if tol_band is None else tol_band
    _require_E(F, "complement_lemma_check")
    lo = float(F.values.min())
    dev = float(np.abs(F.values - PI / 2).max())
    if abs(lo - r) <= tol_band or abs(dev - (PI / 2 - r)) <= tol_band:
        return None
    return (lo < r) == (dev > PI / 2 - r)


def sublevel_arc(F: CircleGridFunction, r: float):
    """Shortest arc (start, length) holding all nodes with f < r, or None."""
    if not 0 < r <= PI / 3 + TOL_METRIC:
        raise PreconditionError("r must lie in (0, pi/3]")
    _require_E(F, "sublevel_arc")
    idx = np.flatnonzero(F.values < r)
    if idx.size == 0:
        return None
    n = F.n_cells
    gaps = np.diff(np.concatenate([idx, [idx[0] + n]]))
    k = int(np.argmax(gaps))
    start = int(idx[(k + 1) % idx.size])
    length = (n - int(gaps[k])) * F.step
    if length > 2 * r + 2 * F.step + TOL_METRIC:
        raise PreconditionError(
            f"sublevel set spans an arc of {length:.6g} > 2r; input is not in E(S^1)")
    return start * F.step, length


def barycenter(F: CircleGridFunction, r: float, theta_f: float | None = None) -> float:
    """Weighted center of mass of the sublevel set {f < r}.

    Integrates x (r - f(x)) and (r - f(x)) over [theta_f, theta_f + pi] with
    the trapezoid rule on grid nodes (plus the node just before theta_f, where
    the weight is zero) and returns the ratio reduced mod 2pi.
    ``theta_f`` defaults to the start of the shortest covering arc; any
    other value whose half circle contains the sublevel set gives the same
    point.
    """
    arc = sublevel_arc(F, r)
    if arc is None:
        raise PreconditionError("barycenter needs min f < r")
    if theta_f is None:
        theta_f = arc[0]
    # start one node early so the zero-weight neighbour on each side of the
    # sublevel set enters the trapezoid sum symmetrically
    lo = theta_f - F.step
    lifted = lo + np.mod(F.angles - lo, TWO_PI)
    # nodes within one float ulp of lo + 2pi are lo itself
    lifted = np.where(lifted >= lo + TWO_PI - 1e-12, lo, lifted)
    inside = lifted <= theta_f + PI + 1e-12
    weight = np.where(F.values < r, r - F.values, 0.0)
    if np.any(weight[~inside] > 0):
        raise PreconditionError("theta_f does not cover the sublevel set")
    order = np.argsort(lifted[inside])
    x = lifted[inside][order]
    w = weight[inside][order]
    S = trapezoid(w, x)
    E = trapezoid(x * w, x)
    return float(normalize_angle(E / S))


def homotopy_step(F: CircleGridFunction, t: float, r: float) -> CircleGridFunction:
    """t f + (1 - t) d(m, .) where m is the barycenter of f at level r."""
    if not 0.0 <= t <= 1.0:
        raise PreconditionError("t must lie in [0, 1]")
    if t == 1.0:
        _require_E(F, "homotopy_step")
        return F
    m = barycenter(F, r)
    K = kuratowski_circle(m, F.half)
    return CircleGridFunction(F.n_cells, t * F.values + (1.0 - t) * K.values)


def linear_bicombing(F: CircleGridFunction, G: CircleGridFunction, t: float) -> CircleGridFunction:
    """(1 - t) f + t g, a constant-speed geodesic inside E(S^1)."""
    _require_E(F, "linear_bicombing")
    _require_E(G, "linear_bicombing")
    if F.n_cells != G.n_cells:
        raise PreconditionError("functions live on different grids")
    return CircleGridFunction(F.n_cells, (1.0 - t) * F.values + t * G.values)


# ---------------------------------------------------------------------------
# random members of F(S^1)


def random_member(rng: np.random.Generator, n_cells: int = DEFAULT_N, kind: str | None = None) -> GridFunction:
    """A random element of F(S^1).

    kinds: 'walk' (random slopes in [-1, 1], anchored), 'kuratowski'
    (convex combination of a few d(theta, .)), 'extreme' (convex
    combination of a few h_A).
    """
    kinds = ("walk", "kuratowski", "extreme")
    if kind is None:
        kind = kinds[int(rng.integers(len(kinds)))]
    if kind == "walk":
        # smooth the slopes a little so that some runs sit near +-1
        raw = rng.uniform(-1, 1, size=n_cells)
        width = int(rng.integers(1, 30))
        s = np.clip(np.convolve(raw, np.ones(width) / width, mode="same") * rng.uniform(1, 3), -1, 1)
        return GridFunction(n_cells, anchored_path(s, n_cells))
    k = int(rng.integers(1, 5))
    w = rng.dirichlet(np.ones(k))
    if kind == "kuratowski":
        parts = [kuratowski_grid(th, n_cells).values for th in rng.uniform(0, TWO_PI, size=k)]
    elif kind == "extreme":
        parts = [h_A(random_interval_subset(rng), n_cells).values for _ in range(k)]
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return GridFunction(n_cells, w @ np.stack(parts))
