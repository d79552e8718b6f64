"""The tight span of the round circle on a grid.

E(S^1) is modelled by 1-Lipschitz functions on [0, pi] with f(0) + f(pi) = pi,
extended to the whole circle by f(theta + pi) = pi - f(theta). The script
shows the extreme points h_A, a Monte-Carlo decomposition into them, the
center f0 = pi/2, and the retraction of a thickening onto the circle via the
weighted barycenter.

Run: python3 demos/02_circle_tight_span.py
"""
import math

import numpy as np

from tightspan import circle_span as cs
from tightspan.metric_core import circle_dist
from tightspan.vr_filtration import s1_homotopy_label

PI = math.pi
N = 360
rng = np.random.default_rng(0)

# --- extreme points ------------------------------------------------------------
A = cs.IntervalSubset([(0.0, PI / 2)])
h = cs.h_A(A, N)
K = cs.kuratowski_circle(PI + PI / 2, N).restrict()
print("h_A for A = [0, pi/2] equals d(3pi/2, .):", cs.sup_dist(h, K) < 1e-12)
print("h_A extreme:", cs.is_extreme(h), "  constant pi/2 extreme:",
      cs.is_extreme(cs.GridFunction(N, np.full(N + 1, PI / 2))))

# --- decomposition into extreme points ----------------------------------------
f = cs.random_member(rng, 180, kind="walk")
for m in (50, 500, 5000):
    dec = cs.decompose_extreme(f, m, seed=1)
    print(f"average of {m:5d} random extreme points: sup error {dec.error:.4f}")

# --- the center ----------------------------------------------------------------
fs = [cs.random_member(rng, N) for _ in range(300)]
rep = cs.center_check(fs, kuratowski_bases=np.linspace(0, 2 * PI, 24, endpoint=False))
print(f"\nmax distance to f0 over 300 members: {rep.max_dist_to_center:.6f} (pi/2 = {PI / 2:.6f})")
print("Kuratowski functions at distance pi/2 within", rep.tol, ":", rep.kuratowski_ok)

# --- thickenings and the retraction --------------------------------------------
r = PI / 4
errors = [circle_dist(cs.barycenter(cs.kuratowski_circle(t, N), r), t)
          for t in np.linspace(0, 2 * PI, 90, endpoint=False)]
print(f"\nbarycenter of d(theta, .) at r = pi/4 returns theta to within {max(errors):.2e}")

F = cs.CircleGridFunction(2 * N, 0.6 * cs.kuratowski_circle(1.0, N).values
                          + 0.4 * cs.kuratowski_circle(1.4, N).values)
print("a function near the circle: min value", round(float(F.values.min()), 4),
      " barycenter", round(cs.barycenter(F, r), 4))
for t in (1.0, 0.5, 0.0):
    H = cs.homotopy_step(F, t, r)
    print(f"  H(f, {t}): in E(S^1) {cs.in_E(H)}, min {H.values.min():.4f}")

print("\nhomotopy type of the r-thickening of S^1:")
for r in (0.2, PI / 3, 0.4 * PI, 0.45 * PI, PI / 2):
    print(f"  r = {r:.4f}: {s1_homotopy_label(r)}")
