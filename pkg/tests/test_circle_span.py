import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tightspan import circle_span as cs
from tightspan.errors import PreconditionError, SchemaError
from tightspan.metric_core import circle_dist

PI = math.pi
N = 360
TG = cs.tol_grid(N)


def kur(theta, n=N):
    return cs.kuratowski_circle(theta, n)


def h_closed_form(A, phi):
    """pi - mu(A) + 2 mu(A cap [0, phi]) - phi, evaluated interval by interval."""
    inside = sum(max(0.0, min(b, phi) - a) for a, b in A.intervals)
    return PI - A.measure() + 2 * inside - phi


# F(S^1) membership and extension ---------------------------------------------

def test_in_F_examples():
    assert cs.in_F(cs.GridFunction(N, np.full(N + 1, PI / 2)))
    assert cs.in_F(cs.GridFunction.from_callable(lambda t: t, N))
    assert not cs.in_F(cs.GridFunction(N, np.zeros(N + 1)))


def test_extension_examples():
    ident = cs.extend_to_circle(cs.GridFunction.from_callable(lambda t: t, N))
    assert np.allclose(ident.values, circle_dist(0.0, ident.angles), atol=1e-12)
    const = cs.extend_to_circle(cs.GridFunction(N, np.full(N + 1, PI / 2)))
    assert np.allclose(const.values, PI / 2)
    refl = cs.extend_to_circle(cs.GridFunction.from_callable(lambda t: PI - t, N))
    assert np.allclose(refl.values, circle_dist(PI, refl.angles), atol=1e-12)


def test_extension_is_a_sup_isometry():
    rng = np.random.default_rng(1)
    for _ in range(100):
        f, g = cs.random_member(rng, N), cs.random_member(rng, N)
        a = cs.sup_dist(f, g)
        b = cs.sup_dist(cs.extend_to_circle(f), cs.extend_to_circle(g))
        assert abs(a - b) <= 4 * np.spacing(PI)


def test_sup_dist_examples():
    f = cs.GridFunction.from_callable(lambda t: t, N)
    assert cs.sup_dist(f, f) == 0
    assert cs.sup_dist(cs.GridFunction(N, np.full(N + 1, PI / 2)), f) == pytest.approx(PI / 2)
    assert cs.sup_dist(kur(0).restrict(), kur(PI).restrict()) == pytest.approx(PI)
    with pytest.raises(PreconditionError):
        cs.sup_dist(f, cs.GridFunction.from_callable(lambda t: t, 180))


def test_grid_function_schema():
    f = cs.random_member(np.random.default_rng(0), 12)
    assert np.array_equal(cs.grid_function_from_dict(f.to_dict()).values, f.values)
    F = cs.extend_to_circle(f)
    assert isinstance(cs.grid_function_from_dict(F.to_dict()), cs.CircleGridFunction)
    with pytest.raises(SchemaError):
        cs.grid_function_from_dict({"n_cells": 4, "values": [0, 1]})
    with pytest.raises(SchemaError):
        cs.IntervalSubset.from_dict({"intervals": [[0, 5]]})


# h_A calculus ----------------------------------------------------------------

def test_h_A_examples():
    alpha = PI / 2
    h = cs.h_A(cs.IntervalSubset([(0, alpha)]), N)
    assert np.allclose(h.values, circle_dist(PI + alpha, h.angles), atol=1e-12)
    assert np.allclose(cs.h_A(cs.IntervalSubset([(0, PI)]), N).values, h.angles)
    assert np.allclose(cs.h_A(cs.IntervalSubset([]), N).values, PI - h.angles)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_h_A_closed_form_and_membership(seed):
    rng = np.random.default_rng(seed)
    A = cs.random_interval_subset(rng)
    h = cs.h_A(A, N)
    oracle = np.array([h_closed_form(A, p) for p in h.angles])
    assert np.allclose(h.values, oracle, atol=1e-12)
    assert cs.in_F(h, 1e-9)
    assert cs.in_E(cs.extend_to_circle(h, 1e-9), TG)


def test_h_A_separation_at_grid_scale():
    rng = np.random.default_rng(2)
    checked = 0
    while checked < 200:
        A = cs.random_interval_subset(rng, n_cells=N)
        B = cs.random_interval_subset(rng, n_cells=N)
        if A.symmetric_difference_measure(B) < 5 * PI / N:
            continue
        assert cs.sup_dist(cs.h_A(A, N), cs.h_A(B, N)) > 0
        checked += 1


def test_extreme_examples():
    rng = np.random.default_rng(3)
    for _ in range(50):
        assert cs.is_extreme(cs.h_A(cs.random_interval_subset(rng, n_cells=N), N))
    assert not cs.is_extreme(cs.GridFunction(N, np.full(N + 1, PI / 2)))
    mid = 0.5 * (cs.h_A(cs.IntervalSubset([(0, PI)]), N).values + cs.h_A(cs.IntervalSubset([]), N).values)
    assert not cs.is_extreme(cs.GridFunction(N, mid))


# decomposition into extreme points -------------------------------------------

def test_decompose_extreme_point_is_exact():
    h = cs.h_A(cs.IntervalSubset([(60 * PI / N, 200 * PI / N)]), N)
    dec = cs.decompose_extreme(h, 1)
    assert dec.error <= 1e-12


@pytest.mark.parametrize("f_values", ["center", "mid"])
def test_decompose_error_small(f_values):
    n = 180
    if f_values == "center":
        f = cs.GridFunction(n, np.full(n + 1, PI / 2))
    else:
        a = cs.h_A(cs.IntervalSubset([(0, PI)]), n).values
        b = cs.h_A(cs.IntervalSubset([]), n).values
        f = cs.GridFunction(n, 0.5 * a + 0.5 * b)
    dec = cs.decompose_extreme(f, 2000, seed=0)
    assert dec.error <= 0.1
    for A in dec.subsets(5):
        assert cs.is_extreme(cs.h_A(A, n))


def test_decomposition_samples_are_extreme_members():
    f = cs.random_member(np.random.default_rng(4), 90)
    dec = cs.decompose_extreme(f, 50, seed=1)
    paths = cs.anchored_path(dec.signs, 90)
    for row in paths:
        g = cs.GridFunction(90, row)
        assert cs.in_F(g, 1e-9) and cs.is_extreme(g)


def test_decompose_is_deterministic():
    f = cs.random_member(np.random.default_rng(5), 60)
    a = cs.decompose_extreme(f, 100, seed=7)
    b = cs.decompose_extreme(f, 100, seed=7)
    assert np.array_equal(a.signs, b.signs)


# center ----------------------------------------------------------------------

def test_center_examples():
    rep = cs.center_check([kur(0).restrict()], kuratowski_bases=[0.0])
    assert rep.max_dist_to_center == pytest.approx(PI / 2)
    assert cs.sup_dist(cs.center(N), cs.center(N)) == 0
    ident = cs.h_A(cs.IntervalSubset([(0, PI)]), N)
    assert cs.sup_dist(cs.extend_to_circle(ident), cs.center(N)) == pytest.approx(PI / 2)


def test_center_report_on_random_members():
    rng = np.random.default_rng(6)
    fs = [cs.random_member(rng, N) for _ in range(100)]
    rep = cs.center_check(fs, kuratowski_bases=np.linspace(0, 2 * PI, 36, endpoint=False))
    assert rep.passed


# thickenings and the complement lemma ----------------------------------------

def test_in_thickening_examples():
    assert cs.in_thickening(kur(1.0), 0.01)
    assert not cs.in_thickening(cs.center(N), PI / 4)
    assert cs.in_thickening(cs.center(N), PI / 2 + 0.01)


def test_complement_examples():
    assert cs.complement_lemma_check(kur(0.0), PI / 4) is True
    assert cs.complement_lemma_check(cs.center(N), PI / 4) is True
    assert not cs.in_thickening(cs.center(N), PI / 4)


def test_complement_on_convex_combinations():
    rng = np.random.default_rng(7)
    decided = 0
    for _ in range(300):
        k = int(rng.integers(1, 5))
        w = rng.dirichlet(np.ones(k))
        vals = sum(wi * kur(t).values for wi, t in zip(w, rng.uniform(0, 2 * PI, k)))
        F = cs.CircleGridFunction(2 * N, vals)
        for r in (PI / 6, PI / 4, PI / 3, 0.45 * PI):
            v = cs.complement_lemma_check(F, r)
            assert v is not False
            decided += v is True
    assert decided > 500


# sublevel arcs, barycenter, homotopy -----------------------------------------

def test_sublevel_arc_examples():
    start, length = cs.sublevel_arc(kur(0.0), PI / 4)
    assert length < PI / 2
    assert circle_dist(start + length / 2, 0.0) <= TG
    assert cs.sublevel_arc(cs.center(N), PI / 4) is None
    tri = np.min([circle_dist(a, kur(0).angles) for a in (0, 2 * PI / 3, 4 * PI / 3)], axis=0) + PI / 3
    assert cs.sublevel_arc(cs.CircleGridFunction(2 * N, tri), PI / 3) is None


def test_barycenter_examples():
    for theta in (0.0, 1.234, 3 * PI / 2):
        m = cs.barycenter(kur(theta), PI / 4)
        assert circle_dist(m, theta) <= 2 * PI / N
    F = cs.CircleGridFunction(2 * N, 0.5 * kur(0).values + 0.5 * cs.center(N).values)
    assert circle_dist(cs.barycenter(F, PI / 3), 0.0) <= 1e-9
    assert circle_dist(cs.barycenter(kur(3 * PI / 2), PI / 6), 3 * PI / 2) <= 2 * PI / N


def test_barycenter_independent_of_representative():
    rng = np.random.default_rng(8)
    for _ in range(50):
        theta = rng.uniform(0, 2 * PI)
        F = cs.CircleGridFunction(2 * N, 0.7 * kur(theta).values + 0.3 * kur(theta + 0.2).values)
        start, _ = cs.sublevel_arc(F, PI / 4)
        a = cs.barycenter(F, PI / 4)
        b = cs.barycenter(F, PI / 4, theta_f=start - 2 * PI)
        assert circle_dist(a, b) <= 1e-9


def test_barycenter_needs_sublevel_points():
    with pytest.raises(PreconditionError):
        cs.barycenter(cs.center(N), PI / 4)


def test_homotopy_examples():
    F = cs.CircleGridFunction(2 * N, 0.6 * kur(1.0).values + 0.4 * cs.center(N).values)
    assert cs.homotopy_step(F, 1.0, PI / 4) is F
    K = kur(2.0)
    H = cs.homotopy_step(K, 0.0, PI / 4)
    assert cs.sup_dist(H, K) <= 2 * PI / N


def test_homotopy_stays_in_thickening():
    rng = np.random.default_rng(9)
    r = PI / 4
    done = 0
    while done < 50:
        F = cs.extend_to_circle(cs.random_member(rng, N))
        if not cs.in_thickening(F, r):
            continue
        H = cs.homotopy_step(F, 0.5, r)
        assert cs.in_E(H, TG)
        assert H.values.min() < r + TG
        done += 1


def test_linear_bicombing():
    F, G = kur(0.0), kur(PI / 2)
    assert np.array_equal(cs.linear_bicombing(F, G, 0.0).values, F.values)
    assert cs.in_E(cs.linear_bicombing(F, G, 0.5))
    rng = np.random.default_rng(10)
    for _ in range(50):
        F = cs.extend_to_circle(cs.random_member(rng, N))
        G = cs.extend_to_circle(cs.random_member(rng, N))
        s, t = sorted(rng.uniform(0, 1, 2))
        d = cs.sup_dist(cs.linear_bicombing(F, G, s), cs.linear_bicombing(F, G, t))
        assert d == pytest.approx((t - s) * cs.sup_dist(F, G), abs=1e-12)


def test_convex_combinations_stay_members():
    rng = np.random.default_rng(11)
    for _ in range(100):
        fs = [cs.extend_to_circle(cs.random_member(rng, N)) for _ in range(3)]
        w = rng.dirichlet(np.ones(3))
        F = cs.CircleGridFunction(2 * N, sum(wi * f.values for wi, f in zip(w, fs)))
        assert cs.in_E(F, TG)
