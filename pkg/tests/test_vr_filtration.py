import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.spatial.distance import squareform

from tightspan import vr_filtration as vr
from tightspan.errors import PreconditionError
from tightspan.metric_core import FiniteMetricSpace, cycle_graph, from_points, line_space, random_tree_metric

PI = math.pi


def single_linkage_count(X, s, closed):
    if len(X) == 1:
        return 1
    Z = linkage(squareform(X.dist, checks=False), method="single")
    t = s if closed else np.nextafter(s, -np.inf)
    return len(set(fcluster(Z, t=t, criterion="distance")))


def test_union_find():
    uf = vr.UnionFind(5)
    assert uf.union(0, 1) and uf.union(3, 4) and not uf.union(1, 0)
    assert uf.count == 3
    assert uf.find(4) == uf.find(3) != uf.find(0)


def test_component_count_examples():
    X = line_space([0, 1, 3, 7])
    assert vr.component_count(vr.ScaleGraph(X, 100)) == 1
    assert vr.component_count(vr.ScaleGraph(X, 0.5, closed=True)) == 4
    # open vs closed at a critical value
    assert vr.component_count(vr.ScaleGraph(X, 2.0)) == 3
    assert vr.component_count(vr.ScaleGraph(X, 2.0, closed=True)) == 2
    with pytest.raises(PreconditionError):
        vr.ScaleGraph(X, 0.0)


@pytest.mark.parametrize("seed", range(10))
def test_tree_counts_match_single_linkage(seed):
    rng = np.random.default_rng(seed)
    X = random_tree_metric(rng, int(rng.integers(2, 31)))
    for closed in (False, True):
        for s, c in vr.component_sweep(X, closed=closed):
            assert c == single_linkage_count(X, s, closed)
        r = float(rng.uniform(0.5, 10))
        assert vr.thickening_components(X, r, closed) == single_linkage_count(X, 2 * r, closed)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_count_monotone_in_scale(seed):
    rng = np.random.default_rng(seed)
    X = from_points(rng.normal(size=(int(rng.integers(2, 20)), 2)))
    rows = vr.component_sweep(X, np.linspace(0.01, 8, 40))
    counts = [c for _, c in rows]
    assert all(a >= b for a, b in zip(counts, counts[1:]))
    assert vr.component_count(vr.ScaleGraph(X, X.dist.max() * 1.01)) == 1


def test_is_tree_like_examples():
    rng = np.random.default_rng(0)
    assert all(vr.is_tree_like(random_tree_metric(rng, 12)) for _ in range(10))
    assert not vr.is_tree_like(cycle_graph(4))
    for n in (1, 2, 3):
        pts = rng.normal(size=(n, 2))
        assert vr.is_tree_like(from_points(pts) if n > 1 else FiniteMetricSpace(("p",), [[0.0]]))


def test_critical_scales_are_distinct_distances():
    X = cycle_graph(6)
    assert vr.critical_scales(X).tolist() == [1, 2, 3]


# homotopy labels -------------------------------------------------------------

def test_label_examples():
    assert vr.s1_homotopy_label(PI / 4) == "S^1"
    assert vr.s1_homotopy_label(0.4 * PI) == "S^3"
    assert vr.s1_homotopy_label(PI / 2) == "point"
    assert vr.s1_homotopy_label(2.0) == "point"
    with pytest.raises(PreconditionError):
        vr.s1_homotopy_label(0)


@pytest.mark.parametrize("n", range(0, 6))
def test_label_interval_endpoints(n):
    right = (n + 1) * PI / (2 * n + 3)
    assert vr.s1_homotopy_label(right) == f"S^{2 * n + 1}"
    above = np.nextafter(right, np.inf) + 1e-9
    if above < PI / 2:
        assert vr.s1_homotopy_label(above) == f"S^{2 * n + 3}"
    if n > 0:
        left = n * PI / (2 * n + 1)
        assert vr.s1_homotopy_label(left + 1e-9) == f"S^{2 * n + 1}"


@settings(max_examples=200)
@given(st.floats(1e-6, PI / 2 - 1e-6))
def test_label_matches_interval_search(r):
    n = next(k for k in range(10**6) if r <= (k + 1) * PI / (2 * k + 3) + vr.LABEL_TOL)
    assert vr.s1_homotopy_label(r) == f"S^{2 * n + 1}"
