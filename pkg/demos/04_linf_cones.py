"""Cone geometry in R^n with the sup norm.

A point p is X-surrounding when every one of the 2n cones
p + xi * Lambda_i meets X, and X-minimal when d(p, .) restricted to X is a
minimal function. The Euclidean unit sphere with the sup metric has
surrounding points outside the unit ball; for S^2 the two sets coincide.

Run: python3 demos/04_linf_cones.py
"""
import numpy as np

from tightspan import linf_span as ls

np.set_printoptions(precision=4, suppress=True)

# --- the planar example: a segment plus an apex ---------------------------------
X = ls.segment_apex_example(200)
p = np.array([0.0, 2.0])
print("X = [-1,1] x {0} plus the apex (0, 3); p = (0, 2)")
for c in ls.all_cones(p):
    print(f"  cone axis {c.axis} sign {c.sign:+d} meets X: {ls.cone_set_intersects(c, X)}")
print("  surrounding:", ls.is_surrounding(p, X), "  minimal:", ls.is_minimal_point(p, X, tol=1e-9))
print("  mirror lemma:", ls.mirror_lemma_check(p, X, min_tol=1e-9).details)

# --- the witness outside the ball -----------------------------------------------
print("\nwitness points p = (1 + lambda)/sqrt(n+1) * (1, ..., 1)")
for n in (1, 2, 3, 5):
    lm = ls.witness_lambda_max(n)
    for lam in (0.05, 0.9 * lm if lm > 0 else 0.01):
        w = ls.witness_point(n, lam)
        print(f"  n = {n}, lambda = {lam:.4f} (max {lm:.4f}): {w.verdict}  ({w.reason})")

S2 = ls.sphere_sample(3, 5000)
w = ls.witness_point(2, 0.05)
print("  the n = 2 witness against a 5000-point sample of S^2:",
      "surrounding", ls.is_surrounding(w.point, S2, exact=True),
      " minimal", ls.is_minimal_point(w.point, S2))

# --- minimal points of S^2 are surrounding ---------------------------------------
rep = ls.s2_coincidence_sweep(100, seed=0, sample_size=10_000)
print(f"\nS^2 sweep: {rep.accepted} minimal points accepted from {rep.candidates} candidates, "
      f"{rep.surrounding} surrounding, {rep.outside_ball} outside the unit ball "
      f"(largest norm {rep.worst_outside_norm:.4f}), mirror lemma held on {rep.mirror_passed}")

# --- convex sets have convex surrounding sets ---------------------------------------
for name, Y in [("ball", ls.ball_sample(3, 2000)), ("box", ls.box_sample(-np.ones(3), np.ones(3), 2000))]:
    print(f"{name}: midpoints of 200 surrounding pairs surrounding: {ls.convexity_sweep(Y, 200).passed}")
