"""Tight spans of finite metric spaces.

A function f on a finite space X lies in Delta(X) when f(x) + f(y) >= d(x, y)
for all pairs; the tight span E(X) is the set of minimal such functions.
This script walks through membership, projection onto E(X), the hypercube
of vertices of E(C_2k), and the convexity test that separates antipodal
spaces from the rest.

Run: python3 demos/01_finite_tight_spans.py
"""
import itertools

import numpy as np

from tightspan.metric_core import cycle_graph, four_point_delta, line_space
from tightspan.tight_span_finite import (
    circular_vertex_family,
    find_nonminimal_midpoint,
    in_delta,
    is_antipodal,
    is_minimal,
    kuratowski,
    project_to_span,
    random_delta_function,
    random_metric_space,
)

np.set_printoptions(precision=4, suppress=True)

# --- the 4-cycle -------------------------------------------------------------
C4 = cycle_graph(4)
print("C_4 distance matrix\n", C4.dist)
print("four-point delta of C_4:", four_point_delta(C4))

f = np.full(4, 2.0)
print("\nf = 2 everywhere: in Delta?", in_delta(C4, f), " minimal?", is_minimal(C4, f))
g = project_to_span(C4, f)
print("projection onto E(C_4):", g, " minimal?", is_minimal(C4, g))

# Kuratowski functions d(x, .) are always minimal
for x in C4.labels:
    assert is_minimal(C4, kuratowski(C4, x))
print("all Kuratowski functions of C_4 are minimal")

# --- vertices of E(C_2k) -------------------------------------------------------
for k in (2, 3, 4):
    signs, values, dists = circular_vertex_family(k)
    X = cycle_graph(2 * k)
    ok = all(is_minimal(X, h) for h in values)
    print(f"\nk = {k}: {len(values)} sign vectors, "
          f"{len(np.unique(values, axis=0))} distinct vertices, all minimal: {ok}")
    if k == 2:
        for s, h in zip(signs, values):
            print("   sigma =", s, "-> h =", h)
        # sup distances follow the Hamming distance of the sign vectors
        flips = [int(np.sum(np.array(a) != np.array(b))) for a, b in itertools.combinations(signs, 2)]
        sup = [float(dists[i][j]) for i, j in itertools.combinations(range(len(signs)), 2)]
        print("   (sign flips, sup distance):", sorted(set(zip(flips, sup))))

# --- projection on random spaces ---------------------------------------------
rng = np.random.default_rng(0)
worst = 0.0
for _ in range(50):
    X = random_metric_space(rng, int(rng.integers(3, 8)))
    f = random_delta_function(X, rng)
    g = project_to_span(X, f)
    worst = max(worst, float(np.abs(project_to_span(X, g) - g).max()))
    assert np.all(g <= f + 1e-9) and is_minimal(X, g, 1e-6)
print(f"\n50 random projections: below the input and minimal; idempotence gap {worst:.2e}")

# --- convexity and antipodality ----------------------------------------------
for name, X in [("C_6", cycle_graph(6)), ("C_5", cycle_graph(5)), ("line {0,1,2}", line_space([0, 1, 2]))]:
    print(f"\n{name}: antipodal = {is_antipodal(X)}, "
          f"non-minimal midpoint of two Kuratowski functions: {find_nonminimal_midpoint(X)}")
