"""Delta(X) and E(X) for finite metric spaces.

A radius function is a plain float vector indexed like ``X.labels``.
``f`` lies in Delta(X) when f(x) + f(x') >= d(x, x') for every pair, and in
the tight span E(X) when it is additionally minimal, i.e. every x has a
partner x' with f(x) + f(x') = d(x, x').
"""
from __future__ import annotations

import itertools
from typing import Hashable, Sequence

import numpy as np

from .errors import ConvergenceError, PreconditionError
from .metric_core import TOL_METRIC, FiniteMetricSpace, antipode_map

#: projection stops once an averaging step moves less than this
PROJECT_STEP_TOL = 1e-10
PROJECT_MAX_ITER = 100_000
#: minimality is asserted on the projection output at this tolerance
PROJECT_MINIMAL_TOL = 1e-6
MAX_VERTEX_K = 16


def _as_function(X: FiniteMetricSpace, f) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape != (len(X),):
        raise PreconditionError(
            f"function has shape {f.shape}, space has {len(X)} points")
    if not np.all(np.isfinite(f)):
        raise PreconditionError("function values must be finite")
    return f


def pair_slack(X: FiniteMetricSpace, f) -> np.ndarray:
    """Matrix f(x) + f(x') - d(x, x')."""
    f = _as_function(X, f)
    return f[:, None] + f[None, :] - X.dist


def in_delta(X: FiniteMetricSpace, f, tol: float = TOL_METRIC) -> bool:
    return bool(pair_slack(X, f).min() >= -tol)


def is_minimal(X: FiniteMetricSpace, f, tol: float = TOL_METRIC) -> bool:
    """True iff f is in E(X): every row of the slack matrix touches zero."""
    slack = pair_slack(X, f)
    if slack.min() < -tol:
        raise PreconditionError("is_minimal needs a function in Delta(X)")
    return bool(np.all(slack.min(axis=1) <= tol))


def minimality_residual(X: FiniteMetricSpace, f) -> float:
    """max over x of min over x' of the slack; 0 exactly for minimal f."""
    return float(pair_slack(X, f).min(axis=1).max())


def q_map(X: FiniteMetricSpace, g) -> np.ndarray:
    """q(g)(x) = max over x' of d(x, x') - g(x')."""
    g = np.asarray(g, dtype=float)
    return (X.dist - g[None, :]).max(axis=1)


def project_to_span(X: FiniteMetricSpace, f, *, step_tol: float = PROJECT_STEP_TOL,
                    max_iter: int = PROJECT_MAX_ITER,
                    minimal_tol: float = PROJECT_MINIMAL_TOL) -> np.ndarray:
    """A minimal function below f.

    Runs g <- (g + q(g)) / 2 starting at g = f. For f in Delta(X) we have
    q(g) <= g, so the iterates decrease, stay in Delta(X), and converge to a
    fixed point g = q(g), which is exactly a minimal function. Which minimal
    minorant is reached depends on f and is not canonical.
    """
    g = _as_function(X, f).copy()
    if not in_delta(X, g):
        raise PreconditionError("project_to_span needs a function in Delta(X)")
    for it in range(1, max_iter + 1):
        new = 0.5 * (g + q_map(X, g))
        change = float(np.abs(new - g).max())
        g = new
        if change < step_tol:
            break
    resid = minimality_residual(X, g)
    if resid > minimal_tol or not in_delta(X, g, minimal_tol):
        raise ConvergenceError(
            f"projection did not reach a minimal function (residual {resid:.3g})",
            residual=resid, iterations=it)
    return g


def kuratowski(X: FiniteMetricSpace, label: Hashable) -> np.ndarray:
    """The function d(x, .) as a vector."""
    return np.array(X.dist[X.index(label)])


# ---------------------------------------------------------------------------
# vertices of E(C_2k)


def _half_indicator(k: int, i: int) -> np.ndarray:
    """+1/2 on vertices i..i+k-1 (mod 2k, labels 1..2k) and -1/2 elsewhere."""
    out = np.full(2 * k, -0.5)
    idx = (np.arange(i - 1, i - 1 + k)) % (2 * k)
    out[idx] = 0.5
    return out


def circular_vertex(k: int, sigma: Sequence[int]) -> np.ndarray:
    """h_sigma = k/2 + sum_i sigma_i g_i on the vertices 1..2k of C_2k."""
    sigma = np.asarray(sigma)
    if sigma.shape != (k,):
        raise PreconditionError(f"sign vector must have length {k}")
    if not np.all(np.isin(sigma, (-1, 1))):
        raise PreconditionError("sign vector entries must be +1 or -1")
    h = np.full(2 * k, k / 2.0)
    for i, s in enumerate(sigma, start=1):
        h += s * _half_indicator(k, i)
    return h


def circular_vertex_family(k: int):
    """All 2^k vertices of E(C_2k) and their pairwise sup-distances.

    Returns ``(signs, values, dists)`` where ``signs`` is (2^k, k),
    ``values`` is (2^k, 2k) and ``dists`` is the (2^k, 2^k) sup-distance
    matrix.
    """
    if k < 1:
        raise PreconditionError("k must be positive")
    if k > MAX_VERTEX_K:
        raise PreconditionError(f"k={k} too large to enumerate (cap {MAX_VERTEX_K})")
    signs = np.array(list(itertools.product((1, -1), repeat=k)), dtype=int)
    base = np.stack([_half_indicator(k, i) for i in range(1, k + 1)])  # (k, 2k)
    values = k / 2.0 + signs @ base
    if len(signs) <= 4096:
        dists = np.abs(values[:, None, :] - values[None, :, :]).max(axis=2)
    else:
        dists = np.stack([np.abs(values - v).max(axis=1) for v in values])
    return signs, values, dists


# ---------------------------------------------------------------------------
# extensions and convexity probes


def extend_via_mr(X: FiniteMetricSpace, P: Sequence[Hashable], f) -> np.ndarray:
    """Mountain-range extension g(x) = min over p in P of d(x, p) + f(p)."""
    idx = [X.index(p) for p in P]
    if not idx:
        raise PreconditionError("P must be nonempty")
    f = np.asarray(f, dtype=float)
    if f.shape != (len(idx),):
        raise PreconditionError("f must have one value per point of P")
    sub = X.dist[np.ix_(idx, idx)]
    if (f[:, None] + f[None, :] - sub).min() < -TOL_METRIC:
        raise PreconditionError("f must lie in Delta(P)")
    return (X.dist[:, idx] + f[None, :]).min(axis=1)


def is_lipschitz(X: FiniteMetricSpace, f, tol: float = TOL_METRIC) -> bool:
    f = _as_function(X, f)
    return bool(np.all(np.abs(f[:, None] - f[None, :]) <= X.dist + tol))


def midpoint_minimality_probe(X: FiniteMetricSpace, f, g, tol: float = TOL_METRIC) -> bool:
    """Whether the midpoint of two minimal functions is again minimal."""
    if not (is_minimal(X, f, tol) and is_minimal(X, g, tol)):
        raise PreconditionError("both functions must be minimal")
    return is_minimal(X, 0.5 * (np.asarray(f) + np.asarray(g)), tol)


def find_nonminimal_midpoint(X: FiniteMetricSpace, tol: float = TOL_METRIC):
    """Search Kuratowski pairs for a midpoint leaving E(X).

    Returns the first failing label pair, or None when every midpoint of two
    Kuratowski functions is minimal.
    """
    for a, b in itertools.combinations(range(len(X)), 2):
        mid = 0.5 * (X.dist[a] + X.dist[b])
        if not is_minimal(X, mid, tol):
            return X.labels[a], X.labels[b]
    return None


def is_antipodal(X: FiniteMetricSpace, tol: float = TOL_METRIC) -> bool:
    return antipode_map(X, tol) is not None


# ---------------------------------------------------------------------------
# random instances


def random_delta_function(X: FiniteMetricSpace, rng: np.random.Generator,
                          low: float = 0.6, high: float = 1.4) -> np.ndarray:
    """Eccentricity scaled by independent U[low, high] factors.

    With low >= 1/2 the result is always in Delta(X); the loop is a guard
    for other choices of ``low``.
    """
    ecc = X.dist.max(axis=1)
    while True:
        f = ecc * rng.uniform(low, high, size=len(X))
        if in_delta(X, f):
            return f


def random_metric_space(rng: np.random.Generator, n: int, kind: str | None = None) -> FiniteMetricSpace:
    """Small random metric spaces of a few qualitatively different kinds."""
    kinds = ("band", "euclidean", "graph", "tree")
    if kind is None:
        kind = kinds[int(rng.integers(len(kinds)))]
    if kind == "band":
        # entries in [1, 2] always satisfy the triangle inequality
        w = rng.uniform(1.0, 2.0, size=(n, n))
        d = np.triu(w, 1)
        d = d + d.T
    elif kind == "euclidean":
        pts = rng.normal(size=(n, int(rng.integers(1, 4))))
        d = np.linalg.norm(pts[:, None] - pts[None, :], axis=-1)
        if np.any(d[~np.eye(n, dtype=bool)] < 1e-6):
            return random_metric_space(rng, n, kind)
    elif kind == "graph":
        from scipy.sparse.csgraph import shortest_path
        w = rng.integers(1, 5, size=(n, n)).astype(float)
        w = np.triu(w, 1)
        keep = np.triu(rng.random((n, n)) < 0.6, 1)
        keep[np.arange(n - 1), np.arange(1, n)] = True  # a path keeps it connected
        d = shortest_path(np.where(keep, w, 0.0), directed=False)
    elif kind == "tree":
        from .metric_core import random_tree_metric
        return random_tree_metric(rng, n, max_weight=5)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return FiniteMetricSpace(tuple(range(n)), d)
