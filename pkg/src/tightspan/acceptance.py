"""Acceptance criteria as callable checks.

Each ``criterion_<k>(seed)`` runs one end-to-end check at the agreed
tolerances and returns a ``CriterionResult``. The CLI ``verify`` command and
the acceptance tests both run these.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import circle_span as cs
from . import linf_span as ls
from . import metric_core as mc
from . import sphere_mountain as sm
from . import tight_span_finite as tsf
from . import vr_filtration as vr

PI = math.pi


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number:2d}: {self.title}"

    def to_dict(self, timing: bool = True):
        out = {"criterion": self.number, "title": self.title, "passed": bool(self.passed),
               "details": _plain(self.details)}
        if timing:
            out["seconds"] = round(self.seconds, 3)
        return out


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def _timed(number, title):
    def wrap(fn):
        def run(seed: int = 0) -> CriterionResult:
            t0 = time.perf_counter()
            passed, details = fn(seed)
            return CriterionResult(number, title, bool(passed), details, time.perf_counter() - t0)
        run.number = number
        run.title = title
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


@_timed(1, "E(C_2k) vertex family is minimal with 2^k members, k = 1..8")
def criterion_1(seed):
    rows = {}
    ok = True
    for k in range(1, 9):
        X = mc.cycle_graph(2 * k)
        _, values, _ = tsf.circular_vertex_family(k)
        minimal = all(tsf.is_minimal(X, h, tol=1e-9) for h in values)
        distinct = len(np.unique(values, axis=0))
        rows[k] = {"minimal": minimal, "distinct": distinct, "expected": 2 ** k}
        ok &= minimal and distinct == 2 ** k
    return ok, {"tol": 1e-9, "per_k": rows}


@_timed(2, "projection onto E(X) is below the input, minimal and idempotent")
def criterion_2(seed):
    rng = np.random.default_rng(seed)
    tol = 1e-6
    worst = {"above_input": 0.0, "minimal_residual": 0.0, "idempotence": 0.0}
    for _ in range(200):
        X = tsf.random_metric_space(rng, int(rng.integers(3, 8)))
        for _ in range(5):
            f = tsf.random_delta_function(X, rng)
            g = tsf.project_to_span(X, f)
            worst["above_input"] = max(worst["above_input"], float((g - f).max()))
            worst["minimal_residual"] = max(worst["minimal_residual"], tsf.minimality_residual(X, g))
            g2 = tsf.project_to_span(X, g)
            worst["idempotence"] = max(worst["idempotence"], float(np.abs(g2 - g).max()))
    ok = worst["above_input"] <= tol and abs(worst["minimal_residual"]) <= tol \
        and worst["idempotence"] <= tol
    return ok, {"tol": tol, "spaces": 200, "functions_per_space": 5, **worst}


@_timed(3, "h_A lies in F(S^1), extends into E(S^1), and the extension is an isometry")
def criterion_3(seed):
    rng = np.random.default_rng(seed)
    N = 360
    tg = cs.tol_grid(N)
    in_f = in_e = 0
    for _ in range(1000):
        f = cs.h_A(cs.random_interval_subset(rng), N)
        in_f += cs.in_F(f, tol=mc.TOL_METRIC)
        in_e += cs.in_E(cs.extend_to_circle(f), tol=tg)
    # the reflection pi - f(theta) is rounded once, so "exact" means to a few ulps of pi
    ulp_tol = 4 * np.spacing(PI)
    iso = 0
    worst = 0.0
    for _ in range(500):
        f, g = cs.random_member(rng, N), cs.random_member(rng, N)
        gap = abs(cs.sup_dist(f, g) - cs.sup_dist(cs.extend_to_circle(f), cs.extend_to_circle(g)))
        worst = max(worst, gap)
        iso += gap <= ulp_tol
    ok = in_f == 1000 and in_e == 1000 and iso == 500
    return ok, {"grid": N, "tol_grid": tg, "in_F_tol": mc.TOL_METRIC, "in_F_exact": in_f,
                "in_E": in_e, "isometry_tol": ulp_tol, "isometry_pairs": iso,
                "isometry_max_gap": worst}


@_timed(4, "every member is within pi/2 of the center; Kuratowski functions at exactly pi/2")
def criterion_4(seed):
    rng = np.random.default_rng(seed)
    N = 360
    fs = [cs.random_member(rng, N) for _ in range(500)]
    bases = [2 * PI * k / 360 for k in range(360)]
    rep = cs.center_check(fs, kuratowski_bases=bases, n_half=N)
    return rep.passed, dict(rep.__dict__)


@_timed(5, "thickening/complement biconditional outside the guard band")
def criterion_5(seed):
    rng = np.random.default_rng(seed)
    N = 360
    band = 2 * PI / 360
    counts = {}
    bad_total = 0
    radii = {"pi/6": PI / 6, "pi/4": PI / 4, "pi/3": PI / 3, "0.45pi": 0.45 * PI}
    members = [cs.extend_to_circle(cs.random_member(rng, N)) for _ in range(1000)]
    for name, r in radii.items():
        res = [cs.complement_lemma_check(F, r, band) for F in members]
        bad = sum(v is False for v in res)
        counts[name] = {"held": sum(v is True for v in res), "indeterminate": sum(v is None for v in res),
                        "counterexamples": bad}
        bad_total += bad
    return bad_total == 0, {"tol_band": band, "members": 1000, "per_r": counts}


@_timed(6, "barycenter fixes the circle; homotopy stays in E(S^1) and B_r")
def criterion_6(seed):
    rng = np.random.default_rng(seed)
    N = 360
    step = 2 * PI / 720
    worst = 0.0
    for k in range(360):
        th = 2 * PI * k / 360
        worst = max(worst, mc.circle_dist(cs.barycenter(cs.kuratowski_circle(th, N), PI / 4), th))
    tg = cs.tol_grid(N)
    passed_h = 0
    radii = (PI / 6, PI / 4, PI / 3)
    for trial in range(200):
        r = radii[trial % 3]
        while True:
            F = cs.extend_to_circle(cs.random_member(rng, N))
            if F.values.min() < r:
                break
        t = float(rng.uniform())
        H = cs.homotopy_step(F, t, r)
        passed_h += cs.in_E(H, tg) and H.values.min() < r + tg
    ok = worst <= 2 * step and passed_h == 200
    return ok, {"max_retraction_error": worst, "bound": 2 * step, "homotopy_pairs_passed": passed_h,
                "homotopy_pairs": 200, "tol_grid": tg}


def decomposition_targets(rng, count: int = 20, n_cells: int = 180):
    """Members of F(S^1) with genuinely fractional slopes."""
    out = []
    for _ in range(count):
        raw = rng.uniform(-1, 1, size=n_cells)
        w = int(rng.integers(3, 20))
        s = np.convolve(raw, np.ones(w) / w, mode="same")
        s = 0.9 * s / max(np.abs(s).max(), 1e-12)
        out.append(cs.GridFunction(n_cells, cs.anchored_path(s, n_cells)))
    return out


@_timed(7, "averages of random extreme points converge to the target")
def criterion_7(seed):
    rng = np.random.default_rng(seed)
    targets = decomposition_targets(rng)
    rows = []
    ok = True
    for j, f in enumerate(targets):
        e500 = cs.decompose_extreme(f, 500, seed=(seed, j, 500)).error
        e2000 = cs.decompose_extreme(f, 2000, seed=(seed, j, 2000)).error
        e8000 = cs.decompose_extreme(f, 8000, seed=(seed, j, 8000)).error
        rows.append({"m500": e500, "m2000": e2000, "m8000": e8000})
        ok &= e2000 <= 0.1 and e8000 < e500
    return ok, {"grid": 180, "bound_m2000": 0.1, "targets": rows,
                "max_error_m2000": max(r["m2000"] for r in rows)}


@_timed(8, "odd-gons and revolved odd-gons are admissible; the square is not")
def criterion_8(seed):
    rows = {}
    ok = True
    g1 = sm.circle_grid(2000)
    for m in (1, 2, 3):
        v = sm.admissible_check(sm.regular_polygon(2 * m + 1), g1)
        rows[f"{2 * m + 1}-gon"] = v.to_dict()
        ok &= v.passed
    for n in (2, 3):
        grid = sm.default_grid(n, 2000 if n == 2 else 4000, seed)
        for m in (1, 2):
            P = sm.build_P_mn(m, n, resolution=256 if n == 2 else 64)
            v = sm.revolved_admissibility_check(P, np.eye(n + 1)[0], grid, seed=seed)
            d = v.to_dict()
            d.pop("worst_point", None)
            rows[f"P_{m}^{n}"] = {**d, "grid_size": len(grid), "config_size": len(P)}
            ok &= v.passed and len(grid) >= 2000
    sq = sm.admissible_check(sm.regular_polygon(4), g1)
    rows["4-gon"] = sq.to_dict()
    ok &= (not sq.passed) and sq.residual >= PI / 2 - sq.tol
    for r in rows.values():
        r.pop("worst_point", None)
    return ok, rows


@_timed(9, "non-injectivity witness verdicts and their sampled certificates")
def criterion_9(seed):
    cases = [(2, 0.05, True)]
    cases += [(n, 0.9 * ls.witness_lambda_max(n), True) for n in (3, 4, 5)]
    cases += [(1, lam, False) for lam in (0.01, 0.05, 0.2)]
    cases += [(n, 1.1 * ls.witness_lambda_max(n), False) for n in (2, 3, 4, 5)]
    rows = []
    ok = True
    for n, lam, expect in cases:
        w = ls.witness_point(n, lam)
        row = {"n": n, "lambda": lam, "verdict": w.verdict, "expected": "VALID" if expect else "INVALID"}
        good = w.valid == expect
        if w.valid:
            S = ls.sphere_sample(n + 1, 5000, seed)
            row["minimal_residual"] = ls.minimality_residual(w.point, S)
            row["minimal_tol"] = S.sample_tol()
            row["minimal"] = row["minimal_residual"] <= row["minimal_tol"]
            row["surrounding_exact"] = ls.is_surrounding(w.point, S, exact=True)
            row["surrounding_sampled"] = ls.is_surrounding(w.point, S, exact=False)
            good &= row["minimal"] and row["surrounding_exact"] and row["surrounding_sampled"]
        row["passed"] = bool(good)
        ok &= good
        rows.append(row)
    return ok, {"cases": rows}


@_timed(10, "minimal points of S^2_inf are surrounding and satisfy the mirror lemma")
def criterion_10(seed):
    rep = ls.s2_coincidence_sweep(500, seed)
    return rep.passed, rep.to_dict()


@_timed(11, "cone partition, transitivity, interval decomposition and nesting")
def criterion_11(seed):
    rng = np.random.default_rng(seed)
    tol = 1e-9
    trials = 10_000
    fails = {"partition": 0, "transitivity": 0, "decomposition": 0, "nesting": 0}
    for t in range(trials):
        d = int(rng.integers(2, 6))
        p = rng.normal(size=d)
        z = rng.normal(size=d) * rng.uniform(0.1, 3)
        if not (np.all(z == p) or any(ls.in_cone(c, z, tol) for c in ls.all_cones(p))):
            fails["partition"] += 1

        c = ls.Cone(p, int(rng.integers(d)), int(rng.choice([-1, 1])))
        y = ls.random_cone_point(rng, c, 2.0)[0]
        w = ls.random_cone_point(rng, ls.Cone(y, c.axis, c.sign), 2.0)[0]
        if not ls.in_cone(c, w, tol):
            fails["transitivity"] += 1

        x, y = rng.normal(size=3), rng.normal(size=3)
        lo, hi = np.minimum(x, y) - 1, np.maximum(x, y) + 1
        probe = ls.sample_interval(rng, x, y, 1)[0] if t % 2 else lo + rng.random(3) * (hi - lo)
        if not ls.interval_decomposition_check(x, y, probe[None, :], tol):
            fails["decomposition"] += 1

        x, y = rng.normal(size=d), rng.normal(size=d)
        z = ls.sample_interval(rng, x, y, 1)[0]
        w = ls.sample_interval(rng, x, z, 1)[0]
        if not ls.in_interval(x, y, w, tol):
            fails["nesting"] += 1
    return sum(fails.values()) == 0, {"trials_each": trials, "tol": tol, "failures": fails}


def single_linkage_counts(X: mc.FiniteMetricSpace, scales, closed: bool):
    """Cluster counts from scipy's single-linkage dendrogram."""
    from scipy.cluster.hierarchy import fcluster, linkage
    from scipy.spatial.distance import squareform

    if len(X) == 1:
        return [1 for _ in scales]
    Z = linkage(squareform(X.dist, checks=False), method="single")
    out = []
    for s in scales:
        cut = s if closed else np.nextafter(s, -np.inf)
        out.append(int(fcluster(Z, t=cut, criterion="distance").max()))
    return out


@_timed(12, "tree-like Rips components match single linkage; delta = 0 for trees, 2 for C_4")
def criterion_12(seed):
    rng = np.random.default_rng(seed)
    mismatches = 0
    worst_delta = 0.0
    scales_checked = 0
    for _ in range(100):
        X = mc.random_tree_metric(rng, int(rng.integers(2, 31)))
        worst_delta = max(worst_delta, mc.four_point_delta(X))
        scales = vr.critical_scales(X)
        for closed in (False, True):
            ours = [c for _, c in vr.component_sweep(X, scales, closed)]
            ref = single_linkage_counts(X, scales, closed)
            mismatches += sum(a != b for a, b in zip(ours, ref))
            scales_checked += len(scales)
    c4 = mc.four_point_delta(mc.cycle_graph(4))
    ok = mismatches == 0 and worst_delta <= mc.TOL_METRIC and abs(c4 - 2) <= mc.TOL_METRIC
    return ok, {"trees": 100, "scales_checked": scales_checked, "mismatches": mismatches,
                "max_tree_delta": worst_delta, "c4_delta": c4}


@_timed(13, "Hausdorff distance from 2k equispaced points to the circle is pi/(2k)")
def criterion_13(seed):
    n_probe = 1 << 16
    step = 2 * PI / n_probe
    rows = {}
    ok = True
    for k in (2, 4, 8, 16, 32):
        pts = 2 * PI * np.arange(2 * k) / (2 * k)
        h = mc.hausdorff_circle(pts, n_probe)
        rows[k] = {"value": h, "expected": PI / (2 * k), "error": abs(h - PI / (2 * k))}
        ok &= rows[k]["error"] <= step
    return ok, {"probe_step": step, "per_k": rows}


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12,
            criterion_13]


def run_all(seed: int = 0, which=None, threads: int = 1):
    """Run the selected criteria (all by default) and return results in order."""
    chosen = [c for c in CRITERIA if which is None or c.number in which]
    if threads <= 1:
        return [c(seed) for c in chosen]
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda c: c(seed), chosen))
