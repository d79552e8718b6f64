import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tightspan import linf_span as ls
from tightspan.errors import PreconditionError
from tightspan.metric_core import linf_dist

cp = pytest.importorskip("cvxpy")

APEX = ls.segment_apex_example(200)


@pytest.fixture(scope="module")
def s2():
    return ls.sphere_sample(3, 4000, seed=0)


@pytest.fixture(scope="module")
def d3():
    return ls.ball_sample(3, 3000, seed=0)


def cvx_min_norm(c, axis, sign):
    """Nearest point to the origin in c + sign * Lambda_axis, via a conic solver."""
    n = len(c)
    z = cp.Variable(n)
    cons = [sign * (z[axis] - c[axis]) >= cp.abs(z[j] - c[j]) for j in range(n) if j != axis]
    if not cons:
        cons = [sign * (z[axis] - c[axis]) >= 0]
    cp.Problem(cp.Minimize(cp.sum_squares(z)), cons).solve()
    return z.value


def cvx_box_cone_feasible(p, axis, sign, lo, hi):
    n = len(p)
    z = cp.Variable(n)
    cons = [z >= lo, z <= hi]
    cons += [sign * (z[axis] - p[axis]) >= cp.abs(z[j] - p[j]) for j in range(n) if j != axis]
    prob = cp.Problem(cp.Minimize(0), cons)
    prob.solve()
    return prob.status in ("optimal", "optimal_inaccurate")


# cones and intervals ---------------------------------------------------------

def test_in_cone_examples():
    assert ls.in_cone(ls.Cone((0, 0), 0, 1), (2, 1))
    assert not ls.in_cone(ls.Cone((0, 0), 0, 1), (1, 2))
    p = np.array([0.3, -1.0, 2.0])
    assert all(ls.in_cone(c, p) for c in ls.all_cones(p))


def test_in_interval_examples():
    x, y = np.array([0.0, 3.0]), np.array([0.0, -1.0])
    assert ls.in_interval(x, y, x) and ls.in_interval(x, y, y)
    assert ls.in_interval(x, y, (0, 2))
    assert not ls.in_interval((0, 0), (2, 0), (1, 5))
    with pytest.raises(PreconditionError):
        ls.in_interval((0, 0), (1, 1, 1), (0, 0))


def test_interval_decomposition_examples():
    rng = np.random.default_rng(0)
    x, y = rng.normal(size=3), rng.normal(size=3)
    seg = x[None] + np.linspace(0, 1, 11)[:, None] * (y - x)[None]
    assert ls.interval_decomposition_check(x, y, seg)
    assert all(ls.in_interval(x, y, z) for z in seg)
    far = np.array([[50.0, 50.0, 50.0]])
    assert ls.interval_decomposition_check(x, y, far)
    assert not ls.in_interval(x, y, far[0])


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_cone_partition(seed, n):
    rng = np.random.default_rng(seed)
    p, z = rng.normal(size=n), rng.normal(size=n)
    assert any(ls.in_cone(c, z) for c in ls.all_cones(p))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_cone_transitivity(seed, n):
    rng = np.random.default_rng(seed)
    i, s = int(rng.integers(n)), int(rng.choice([-1, 1]))
    x = rng.normal(size=n)
    y = ls.random_cone_point(rng, ls.Cone(x, i, s))[0]
    z = ls.random_cone_point(rng, ls.Cone(y, i, s))[0]
    assert ls.in_cone(ls.Cone(x, i, s), z, 1e-9)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_interval_nesting_and_decomposition(seed, n):
    rng = np.random.default_rng(seed)
    x, y = rng.normal(size=n), rng.normal(size=n)
    z = ls.sample_interval(rng, x, y, 1)[0]
    assert ls.in_interval(x, y, z, 1e-9)
    for w in ls.sample_interval(rng, x, z, 20):
        assert ls.in_interval(x, y, w, 1e-9)
    probes = rng.uniform(-3, 3, size=(200, n))
    assert ls.interval_decomposition_check(x, y, probes)


# exact cone tests against independent solvers --------------------------------

@pytest.mark.parametrize("seed", range(6))
def test_dykstra_matches_conic_solver(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 5))
    c = rng.normal(size=n) * 2
    axis, sign = int(rng.integers(n)), int(rng.choice([-1, 1]))
    z = ls._dykstra_min_norm(c[None], axis, sign)[0]
    ref = cvx_min_norm(c, axis, sign)
    assert np.linalg.norm(z) == pytest.approx(np.linalg.norm(ref), abs=1e-5)
    assert ls.cone_slack(ls.Cone(c, axis, sign), z) <= 1e-7


def test_box_cone_closed_form_matches_lp():
    rng = np.random.default_rng(1)
    lo, hi = -np.ones(3), np.ones(3)
    box = ls.BoxShape(lo, hi)
    for _ in range(40):
        p = rng.uniform(-2.5, 2.5, 3)
        axis, sign = int(rng.integers(3)), int(rng.choice([-1, 1]))
        assert bool(box.cone_meets(p[None], axis, sign, tol=1e-9)[0]) == \
            cvx_box_cone_feasible(p, axis, sign, lo, hi)


def test_segment_cone_test_matches_dense_sampling():
    dense = ls.segment_apex_example(20001)
    rng = np.random.default_rng(2)
    for _ in range(200):
        p = rng.uniform(-2, 4, 2)
        axis, sign = int(rng.integers(2)), int(rng.choice([-1, 1]))
        exact = bool(APEX.shape.cone_meets(p[None], axis, sign, tol=0.0)[0])
        u = dense.points - p
        slack = np.abs(u).max(axis=1) - sign * u[:, axis]
        if slack.min() > 1e-3:
            assert not exact
        elif slack.min() == 0.0:
            assert exact


# surrounding points ----------------------------------------------------------

def test_cone_set_intersects_examples(s2):
    assert all(ls.cone_set_intersects(c, s2) for c in ls.all_cones(np.zeros(3)))
    assert not ls.cone_set_intersects(ls.Cone((0, 2), 0, 1), APEX)
    corners = ls.box_sample(-np.ones(2), np.ones(2), 4)
    assert not ls.cone_set_intersects(ls.Cone((1.5, 0.2), 0, 1), corners)


def test_is_surrounding_examples(d3):
    circle = ls.sphere_sample(2, 720)
    assert ls.is_surrounding(np.array([math.cos(0.4), math.sin(0.4)]), circle)
    assert not ls.is_surrounding((0, 2), APEX)
    assert ls.is_surrounding(np.zeros(3), d3)


def test_exact_and_sampled_surrounding_agree_away_from_boundary(s2):
    rng = np.random.default_rng(3)
    P = rng.uniform(-1.2, 1.2, size=(300, 3))
    exact = ls.surrounding_mask(P, s2, exact=True)
    sampled = ls.surrounding_mask(P, s2, exact=False)
    # the sampled test is looser by about the spacing, never stricter
    assert np.all(sampled | ~exact)


# minimal points --------------------------------------------------------------

@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_minimality_residual_matches_pairwise(seed):
    rng = np.random.default_rng(seed)
    X = ls.SampledLinfSet(rng.normal(size=(int(rng.integers(1, 60)), 3)), None)
    p = rng.normal(size=3)
    r = ls.minimality_residual(p, X)
    assert r == pytest.approx(ls.minimality_residual_pairwise(p, X), abs=1e-9)
    assert ls.minimality_residuals(p[None], X)[0] == pytest.approx(r, abs=1e-12)


def test_is_minimal_examples():
    assert ls.is_minimal_point(APEX.points[17], APEX)
    assert ls.is_minimal_point((0, 2), APEX, tol=1e-9)
    two = ls.SampledLinfSet(np.array([[0.0, 0.0], [1.0, 0.0]]), None)
    assert not ls.is_minimal_point((0.5, 3.0), two, tol=1e-9)
    with pytest.raises(PreconditionError):
        ls.is_minimal_point((0, 0), ls.SampledLinfSet(np.zeros((0, 2)), None))


def test_surrounding_implies_minimal_and_bounded(d3):
    rng = np.random.default_rng(4)
    P = ls.random_surrounding_points(d3, 100, rng)
    lo, hi = d3.bounding_box()
    for p in P:
        assert ls.is_minimal_point(p, d3)
        assert np.all(p >= lo - 1e-9) and np.all(p <= hi + 1e-9)


def test_distance_preservation(d3):
    circle = ls.sphere_sample(2, 2000)
    rng = np.random.default_rng(5)
    for X in (circle, d3):
        P = ls.random_surrounding_points(X, 60, rng)
        assert ls.surrounding_distance_preservation(P[0], P[0], X).residual == 0
        for p, q in zip(P[:30], P[30:]):
            assert ls.surrounding_distance_preservation(p, q, X).passed


def test_mirror_lemma_examples(s2):
    assert ls.mirror_lemma_check(np.zeros(3), s2).passed
    v = ls.mirror_lemma_check((0, 2), APEX, min_tol=1e-9)
    assert v.passed
    assert (1, 1) in v.details["interior_cones"]
    assert ls.in_cone(ls.Cone((0, 2), 1, -1), (0, 0))


# the witness -----------------------------------------------------------------

def test_witness_examples():
    assert ls.witness_point(2, 0.05).valid
    assert not ls.witness_point(1, 0.05).valid
    w = ls.witness_point(2, 0.07)
    assert not w.valid
    assert w.discriminant == pytest.approx(1.1449 - 9 * 0.1449)


def test_witness_root_solves_quadratic():
    n, lam = 2, 0.05
    w = ls.witness_point(n, lam)
    b = 2 * (n - 1) * (1 + lam) / (n + 1)
    assert w.root ** 2 - b * w.root + lam ** 2 + 2 * lam == pytest.approx(0, abs=1e-12)
    assert np.linalg.norm(w.point) == pytest.approx(1 + lam)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_witness_validity_region(n):
    lm = ls.witness_lambda_max(n)
    assert lm ** 2 + 2 * lm == pytest.approx((n - 1) ** 2 / (4 * n))
    assert ls.witness_point(n, 0.9 * lm).valid
    assert not ls.witness_point(n, 1.1 * lm).valid


@pytest.mark.parametrize("lam", [0.01, 0.05, 0.2, 1.0])
def test_witness_fails_for_circle(lam):
    assert not ls.witness_point(1, lam).valid


def test_witness_is_minimal_and_surrounding(s2):
    p = ls.witness_point(2, 0.05).point
    assert ls.is_surrounding(p, s2, exact=True)
    assert ls.is_minimal_point(p, s2)


# sweeps ----------------------------------------------------------------------

def test_small_coincidence_sweep():
    rep = ls.s2_coincidence_sweep(40, seed=1, sample_size=4000)
    assert rep.passed
    assert rep.accepted == 40


def test_points_inside_ball_are_minimal_and_surrounding(s2):
    rng = np.random.default_rng(6)
    x = rng.normal(size=(50, 3))
    x *= (0.9 * rng.random(50) / np.linalg.norm(x, axis=1))[:, None]
    assert ls.surrounding_mask(x, s2, exact=True).all()
    assert np.all(ls.minimality_residuals(x, s2) <= s2.sample_tol())


@pytest.mark.parametrize("make", [lambda: ls.ball_sample(3, 2000),
                                  lambda: ls.box_sample(-np.ones(3), np.ones(3), 2000)])
def test_convexity(make):
    assert ls.convexity_sweep(make(), 100, seed=0).passed


def test_convexity_needs_convex_tag(s2):
    with pytest.raises(PreconditionError):
        ls.convexity_sweep(s2, 10)


def test_idempotence():
    X = APEX
    assert ls.idempotence_probe(X, X.points[:10]).passed
    rng = np.random.default_rng(7)
    cand = rng.uniform(-1, 1, size=(4000, 2)) * [1, 3] + [0, 1.5]
    res = ls.minimality_residuals(cand, X)
    good = cand[res <= 1e-9][:100]
    assert len(good) >= 50
    assert ls.idempotence_probe(X, good, tol=1e-9).passed
    with pytest.raises(PreconditionError):
        ls.idempotence_probe(X, [[0.5, 2.9]], tol=1e-9)
