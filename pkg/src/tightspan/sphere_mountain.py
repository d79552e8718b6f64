"""Mountain-range functions on round spheres.

For a finite configuration P on S^n with values v, the mountain range is
MR(x) = min_i d(x, p_i) + v_i. With constant value half the diameter of P
it lies in the tight span of the sphere exactly when P is admissible; the
checks here evaluate that on antipodally closed sample grids.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import ndtri
from scipy.stats import qmc

from .errors import PreconditionError
from .metric_core import TOL_METRIC, TOL_UNIT, TWO_PI
from .results import Verdict

PI = math.pi
TOL_COMAX = 1e-9
TOL_HELD = 1e-9
#: coarsest off-axis spacing at which rotation invariance is still checked
SYMMETRY_MAX_SPACING = 0.25


def _chord_to_angle(c):
    return 2.0 * np.arcsin(np.clip(np.asarray(c) / 2.0, 0.0, 1.0))


def _unit_rows(points, tol=TOL_UNIT) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if np.any(np.abs(np.linalg.norm(pts, axis=1) - 1.0) > tol):
        raise PreconditionError("sphere points must have unit norm")
    return pts


def _geodesic(u, v) -> np.ndarray:
    """Pairwise geodesic distances between row sets (accurate near 0 and pi)."""
    dot = np.clip(u @ v.T, -1.0, 1.0)
    # arccos loses precision near +-1; use the chord there
    out = np.arccos(dot)
    near = np.abs(dot) > 0.99
    if np.any(near):
        ii, jj = np.nonzero(near)
        chord = np.linalg.norm(u[ii] - v[jj], axis=1)
        out[ii, jj] = _chord_to_angle(chord)
    return out


@dataclass(frozen=True)
class SphereConfig:
    """Points on S^n (rows of length n+1) with one value each."""

    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        pts = _unit_rows(self.points)
        vals = np.broadcast_to(np.asarray(self.values, dtype=float), (len(pts),)).copy()
        if not np.all(np.isfinite(vals)):
            raise PreconditionError("values must be finite")
        pts = pts.copy()
        pts.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.points.shape[1] - 1

    def __len__(self):
        return len(self.points)

    def with_values(self, values) -> "SphereConfig":
        return SphereConfig(self.points, values)

    @property
    def tree(self) -> cKDTree:
        t = self.__dict__.get("_tree")
        if t is None:
            t = cKDTree(self.points)
            object.__setattr__(self, "_tree", t)
        return t


def config_from_angles(angles, values=0.0) -> SphereConfig:
    """Configuration on S^1 from angles in radians."""
    a = np.asarray(angles, dtype=float)
    return SphereConfig(np.column_stack([np.cos(a), np.sin(a)]), values)


def regular_polygon(k: int, values=0.0, offset: float = 0.0) -> SphereConfig:
    return config_from_angles(offset + TWO_PI * np.arange(k) / k, values)


@dataclass(frozen=True)
class SphereSampleGrid:
    """Antipodally closed sample of S^n."""

    points: np.ndarray
    resolution: str = ""

    def __post_init__(self):
        pts = _unit_rows(self.points).copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        dist, _ = cKDTree(pts).query(-pts)
        if np.any(dist > 1e-9):
            raise PreconditionError("sample grid is not closed under x -> -x")

    @property
    def n(self) -> int:
        return self.points.shape[1] - 1

    def __len__(self):
        return len(self.points)

    @property
    def antipode_index(self) -> np.ndarray:
        idx = self.__dict__.get("_anti")
        if idx is None:
            _, idx = cKDTree(self.points).query(-self.points)
            object.__setattr__(self, "_anti", idx)
        return idx

    def spacing(self) -> float:
        """Largest nearest-neighbour geodesic distance."""
        d, _ = cKDTree(self.points).query(self.points, k=2)
        return float(_chord_to_angle(d[:, 1]).max())

    def tol_sphere(self) -> float:
        return 3.0 * self.spacing()


def circle_grid(count: int) -> SphereSampleGrid:
    if count < 2 or count % 2:
        raise PreconditionError("circle grid needs an even number of points")
    a = TWO_PI * np.arange(count) / count
    return SphereSampleGrid(np.column_stack([np.cos(a), np.sin(a)]), f"circle:{count}")


def fibonacci_sphere(count: int) -> np.ndarray:
    """Fibonacci lattice of ``count`` points on S^2."""
    i = np.arange(count) + 0.5
    z = 1.0 - 2.0 * i / count
    rho = np.sqrt(1.0 - z * z)
    phi = PI * (1.0 + math.sqrt(5.0)) * i
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def s2_grid(count: int) -> SphereSampleGrid:
    """Fibonacci lattice with ``count // 2`` points plus all antipodes."""
    half = fibonacci_sphere(count // 2)
    return SphereSampleGrid(np.vstack([half, -half]), f"fibonacci-s2:{2 * (count // 2)}")


def random_sphere_grid(n: int, count: int, seed=0) -> SphereSampleGrid:
    """``count // 2`` uniform random points on S^n plus their antipodes."""
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(count // 2, n + 1))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return SphereSampleGrid(np.vstack([x, -x]), f"random-s{n}:{2 * (count // 2)}:seed={seed}")


def default_grid(n: int, count: int = 2000, seed=0) -> SphereSampleGrid:
    if n == 1:
        return circle_grid(count + (-count) % 8)
    if n == 2:
        return s2_grid(count)
    return random_sphere_grid(n, count, seed)


# ---------------------------------------------------------------------------
# mountain ranges


def dist_to_set(P: SphereConfig, x) -> np.ndarray:
    """d(x, P) for each row of x."""
    x = _unit_rows(x)
    chord, _ = P.tree.query(x)
    return _chord_to_angle(chord)


def mr_eval(P: SphereConfig, x, chunk: int = 2048):
    """min over i of d(x, p_i) + v_i."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    x = _unit_rows(x)
    if x.shape[1] != P.points.shape[1]:
        raise PreconditionError("point and configuration live on different spheres")
    if np.all(P.values == P.values[0]):
        out = dist_to_set(P, x) + P.values[0]
    else:
        out = np.concatenate([
            (_geodesic(x[s:s + chunk], P.points) + P.values[None, :]).min(axis=1)
            for s in range(0, len(x), chunk)])
    return float(out[0]) if single else out


def diam(P: SphereConfig) -> float:
    """Largest pairwise distance, as pi minus the closest approach of -p to P."""
    chord, _ = P.tree.query(-P.points)
    return float(PI - _chord_to_angle(chord).min())


def is_antipodal_free(P: SphereConfig, tol: float = TOL_METRIC) -> bool:
    cached = P.__dict__.get("_afree")
    if cached is not None and tol == TOL_METRIC:
        return cached
    chord, _ = P.tree.query(-P.points)
    out = bool(_chord_to_angle(chord).min() > tol)
    if tol == TOL_METRIC:
        object.__setattr__(P, "_afree", out)
    return out


def _pairs(n_points: int, max_pairs: int, seed):
    if n_points * n_points <= max_pairs:
        i, j = np.meshgrid(np.arange(n_points), np.arange(n_points), indexing="ij")
        return i.ravel(), j.ravel()
    rng = np.random.default_rng(seed)
    return rng.integers(0, n_points, max_pairs), rng.integers(0, n_points, max_pairs)


def mr_delta1_check(P: SphereConfig, grid: SphereSampleGrid, tol: float = 1e-9,
                    max_pairs: int = 250_000, seed=0) -> Verdict:
    """MR satisfies the Delta inequality and is 1-Lipschitz on grid pairs."""
    pp = _geodesic(P.points, P.points)
    if (P.values[:, None] + P.values[None, :] - pp).min() < -TOL_METRIC:
        raise PreconditionError("values must satisfy v_i + v_j >= d(p_i, p_j)")
    f = mr_eval(P, grid.points)
    i, j = _pairs(len(grid), max_pairs, seed)
    dij = np.arccos(np.clip(np.sum(grid.points[i] * grid.points[j], axis=1), -1, 1))
    delta_gap = float((dij - f[i] - f[j]).max())
    lip_gap = float((np.abs(f[i] - f[j]) - dij).max())
    resid = max(delta_gap, lip_gap)
    return Verdict(resid <= tol, resid, tol,
                   {"delta_excess": delta_gap, "lipschitz_excess": lip_gap, "pairs": int(len(i))})


def _diam_cached(P: SphereConfig) -> float:
    d = P.__dict__.get("_diam")
    if d is None:
        d = diam(P)
        object.__setattr__(P, "_diam", d)
    return d


def comax(P: SphereConfig, i: int, tol: float = TOL_COMAX) -> np.ndarray:
    """Indices j with d(p_i, p_j) >= diam(P) - tol."""
    if len(P) < 2:
        raise PreconditionError("comax needs at least two points")
    d = _geodesic(P.points[i:i + 1], P.points)[0]
    return np.flatnonzero(d >= _diam_cached(P) - tol)


def tangent_basis(p: np.ndarray) -> np.ndarray:
    """Orthonormal basis (rows) of the tangent space at p."""
    _, _, vt = np.linalg.svd(p[None, :])
    return vt[1:]


def tangent_directions(p: np.ndarray, count: int) -> np.ndarray:
    """Deterministic, roughly uniform unit tangent vectors at p."""
    basis = tangent_basis(p)
    k = len(basis)
    if k == 1:
        coef = np.array([[1.0], [-1.0]])
    elif k == 2:
        a = TWO_PI * np.arange(count) / count
        coef = np.column_stack([np.cos(a), np.sin(a)])
    elif k == 3:
        coef = fibonacci_sphere(count)
    else:
        u = qmc.Halton(d=k, scramble=False).random(count + 1)[1:]
        coef = ndtri(np.clip(u, 1e-12, 1 - 1e-12))
        coef /= np.linalg.norm(coef, axis=1, keepdims=True)
    return coef @ basis


def log_direction(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Unit tangent vector at p pointing along the shortest geodesic to q."""
    w = q - np.dot(p, q) * p
    return w / np.linalg.norm(w)


def _require_antipodal_free(P):
    if not is_antipodal_free(P):
        raise PreconditionError("configuration contains an antipodal pair")


def is_held(P: SphereConfig, i: int, dir_samples: int = 64, tol: float = TOL_HELD,
            tol_comax: float = TOL_COMAX) -> bool:
    """Every sampled tangent direction at p_i is met by some comaximal point.

    For a finite sample of a continuum pass ``tol`` and ``tol_comax`` of the
    order of the sample spacing, since exact partners may be missing.
    """
    _require_antipodal_free(P)
    p = P.points[i]
    partners = comax(P, i, tol_comax)
    partners = partners[partners != i]
    if partners.size == 0:
        return False
    logs = np.stack([log_direction(p, P.points[j]) for j in partners])
    dirs = tangent_directions(p, dir_samples)
    return bool(np.all((dirs @ logs.T).max(axis=1) >= -tol))


def sample_spacing(P: SphereConfig) -> float:
    """Median nearest-neighbour distance of P (isolated points do not skew it)."""
    if len(P) < 2:
        return 0.0
    chord, _ = P.tree.query(P.points, k=2)
    return float(np.median(_chord_to_angle(chord[:, 1])))


def sample_tol(P: SphereConfig) -> float:
    """Squared typical spacing of P.

    When P is a finite sample of a continuum, d(., P) overshoots the
    continuum distance by a second-order amount in the spacing; this is the
    slack to allow in the local-max test.
    """
    return sample_spacing(P) ** 2


def is_local_max_at_antipode(P: SphereConfig, i: int, radius: float = 0.05,
                             dir_samples: int = 64, rings: int = 8, tol: float = 1e-12) -> bool:
    """d(., P) has a local maximum at -p_i on a sampled neighbourhood.

    Neighbourhood points lie on ``rings`` circles of geodesic radius up to
    ``radius`` around -p_i; ``tol`` is the allowed overshoot.
    """
    centre = -P.points[i]
    dirs = tangent_directions(centre, dir_samples)
    rho = radius * np.arange(1, rings + 1) / rings
    pts = (np.cos(rho)[:, None, None] * centre[None, None, :]
           + np.sin(rho)[:, None, None] * dirs[None, :, :]).reshape(-1, len(centre))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    base = dist_to_set(P, centre[None, :])[0]
    return bool(np.all(dist_to_set(P, pts) <= base + tol))


def held_criteria(P: SphereConfig, i: int, dir_samples: int = 64, radius: float = 0.05,
                  sampled: bool = False):
    """Both held-point tests at p_i: (tangent test, local-max test).

    With ``sampled`` set, both use tolerances derived from the spacing of P.
    """
    if sampled:
        h = sample_spacing(P)
        return (is_held(P, i, dir_samples, tol=h, tol_comax=h),
                is_local_max_at_antipode(P, i, radius, dir_samples, tol=h * h))
    return is_held(P, i, dir_samples), is_local_max_at_antipode(P, i, radius, dir_samples)


def is_pointwise_extremal(P: SphereConfig, dir_samples: int = 64, sampled: bool = False) -> bool:
    """Every point of P is held (see ``is_held``; ``sampled`` as in ``held_criteria``)."""
    _require_antipodal_free(P)
    h = sample_spacing(P) if sampled else None
    kw = {"tol": h, "tol_comax": h} if sampled else {}
    return all(is_held(P, i, dir_samples, **kw) for i in range(len(P)))


def admissible_check(P: SphereConfig, grid: SphereSampleGrid, tol: float | None = None,
                     lipschitz_pairs: int = 20_000, seed=0) -> Verdict:
    """MR(P, diam/2) has antipodal sums pi on the grid and is 1-Lipschitz.

    The residual is the largest |MR(u) + MR(-u) - pi|; the default tolerance
    is three times the grid's nearest-neighbour spacing.
    """
    if grid.points.shape[1] != P.points.shape[1]:
        raise PreconditionError("grid and configuration live on different spheres")
    tol = grid.tol_sphere() if tol is None else tol
    a = 0.5 * diam(P)
    f = dist_to_set(P, grid.points) + a
    sums = np.abs(f + f[grid.antipode_index] - PI)
    worst = int(np.argmax(sums))
    i, j = _pairs(len(grid), lipschitz_pairs, seed)
    dij = np.arccos(np.clip(np.sum(grid.points[i] * grid.points[j], axis=1), -1, 1))
    lip = float((np.abs(f[i] - f[j]) - dij).max())
    resid = float(sums[worst])
    return Verdict(resid <= tol and lip <= TOL_METRIC, resid, tol, {
        "value": a, "lipschitz_excess": lip, "worst_point": grid.points[worst].tolist(),
        "grid": grid.resolution, "grid_size": len(grid)})


# ---------------------------------------------------------------------------
# revolved odd-gons


def q_profile(m: int) -> np.ndarray:
    """Polar angles 2k pi / (2m+1) that lie in [0, pi]."""
    k = np.arange(m + 2)
    q = 2.0 * k * PI / (2 * m + 1)
    return q[q <= PI]


def revolve_profile(polar, n: int, resolution: int = 256, axis_first: bool = True) -> np.ndarray:
    """Points of S^n whose polar angle from e_1 lies in ``polar``.

    ``resolution`` is the number of samples per full great circle; latitude
    spheres get proportionally fewer points.
    """
    out = []
    for q in np.atleast_1d(polar):
        s, c = math.sin(q), math.cos(q)
        if s < 1e-12:
            w = np.zeros((1, n))
        elif n == 1:
            w = np.array([[1.0], [-1.0]])
        elif n == 2:
            cnt = max(2, 2 * math.ceil(resolution * s / 2))
            a = TWO_PI * np.arange(cnt) / cnt
            w = np.column_stack([np.cos(a), np.sin(a)])
        elif n == 3:
            cnt = max(4, math.ceil(resolution ** 2 * s * s / PI))
            w = fibonacci_sphere(cnt)
        else:
            raise PreconditionError("revolved sets are sampled for n <= 3")
        pts = np.column_stack([np.full(len(w), c), s * w])
        out.append(pts)
    pts = np.vstack(out)
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def build_P_mn(m: int, n: int, resolution: int = 256) -> SphereConfig:
    """Sample of the revolved odd-gon: polar angles in {2k pi/(2m+1)} n [0, pi].

    The axis is e_1. For n = 1 this is exactly the regular (2m+1)-gon.
    """
    if m < 1 or n < 1:
        raise PreconditionError("m and n must be positive")
    pts = revolve_profile(q_profile(m), n, resolution)
    return SphereConfig(pts, m * PI / (2 * m + 1))


def _random_axis_rotation(axis: np.ndarray, rng) -> np.ndarray:
    """Random orthogonal map fixing ``axis``."""
    basis = tangent_basis(axis)          # (n, n+1)
    k = len(basis)
    q, r = np.linalg.qr(rng.normal(size=(k, k)))
    q = q * np.sign(np.diag(r))
    return np.outer(axis, axis) + basis.T @ q @ basis


def revolved_admissibility_check(P: SphereConfig, axis, grid: SphereSampleGrid,
                                 n_rotations: int = 8, n_slice_probes: int = 2000,
                                 slice_grid: int = 2048, seed=0) -> Verdict:
    """Admissibility of a set that is invariant under rotations about ``axis``.

    Steps: certify the symmetry on random rotations, read off the polar
    profile, check that the meridian slice (a finite set on a great circle)
    is admissible, confirm d(x, P) equals the slice distance on probe
    points, and finally run ``admissible_check`` on the full grid.
    """
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    rng = np.random.default_rng(seed)
    pts = P.points
    # points on the axis are fixed by every rotation and may be isolated, so
    # the spacing that bounds the symmetry residual is taken off the axis
    off_axis = np.abs(pts @ axis) < 1.0 - 1e-9
    spacing = 0.0
    if off_axis.sum() > 1:
        chord, _ = P.tree.query(pts[off_axis], k=2)
        spacing = float(_chord_to_angle(chord[:, 1]).max())
    if spacing > SYMMETRY_MAX_SPACING:
        raise PreconditionError(
            f"sample spacing {spacing:.3g} off the axis is too coarse to certify rotation invariance")
    sym_tol = 2.0 * spacing + 1e-9
    sym_resid = 0.0
    for _ in range(n_rotations):
        R = _random_axis_rotation(axis, rng)
        sym_resid = max(sym_resid, float(dist_to_set(P, pts @ R.T).max()))
    if sym_resid > sym_tol:
        raise PreconditionError(
            f"configuration is not rotation invariant about the axis (residual {sym_resid:.3g})")

    polar = np.arccos(np.clip(pts @ axis, -1, 1))
    profile = np.unique(np.round(polar, 9))
    slice_cfg = config_from_angles(np.concatenate([profile, -profile]))
    slice_cfg = SphereConfig(np.unique(np.round(slice_cfg.points, 12), axis=0), 0.0)
    if not is_antipodal_free(slice_cfg):
        return Verdict(False, PI, 0.0, {"reason": "slice contains an antipodal pair",
                                         "profile": profile.tolist()})
    slice_verdict = admissible_check(slice_cfg, circle_grid(slice_grid))

    probes = rng.normal(size=(n_slice_probes, len(axis)))
    probes /= np.linalg.norm(probes, axis=1, keepdims=True)
    phi = np.arccos(np.clip(probes @ axis, -1, 1))
    slice_dist = np.abs(phi[:, None] - profile[None, :]).min(axis=1)
    reduction = float(np.abs(dist_to_set(P, probes) - slice_dist).max())
    reduction_ok = reduction <= sym_tol

    full = admissible_check(P, grid)
    passed = bool(slice_verdict) and reduction_ok and bool(full)
    return Verdict(passed, full.residual, full.tol, {
        "profile": profile.tolist(), "symmetry_residual": sym_resid, "symmetry_tol": sym_tol,
        "slice_admissible": bool(slice_verdict), "slice_residual": slice_verdict.residual,
        "slice_reduction_residual": reduction, "full_admissible": bool(full)})
