"""Mountain ranges on spheres.

For a configuration P on S^n the mountain range MR(x) = min_i d(x, p_i) + a
with a = diam(P)/2 belongs to the tight span of the sphere exactly when its
antipodal sums equal pi. Regular odd polygons pass, the square fails, and
revolving an odd polygon about an axis gives admissible sets on S^2 and S^3.

Run: python3 demos/03_mountain_ranges.py
"""
import math

import numpy as np

from tightspan import sphere_mountain as sm

PI = math.pi
grid1 = sm.circle_grid(2048)

print("regular polygons on S^1")
for k in (3, 4, 5, 6, 7):
    P = sm.regular_polygon(k)
    v = sm.admissible_check(P, grid1)
    extremal = sm.is_pointwise_extremal(P) if sm.is_antipodal_free(P) else "n/a (antipodes)"
    print(f"  k = {k}: admissible {v.passed!s:5}  residual {v.residual:.4f}  pointwise extremal {extremal}")

print("\nheld points of two-point sets fail both tests:")
P = sm.config_from_angles([0.0, PI / 2])
print("  (tangent test, local max at antipode) =", sm.held_criteria(P, 0))

print("\nrevolved odd-gons")
for m, n in [(1, 2), (2, 2), (1, 3)]:
    P = sm.build_P_mn(m, n, 256 if n == 2 else 48)
    grid = sm.default_grid(n, 2000 if n == 2 else 4000)
    v = sm.revolved_admissibility_check(P, np.eye(n + 1)[0], grid)
    print(f"  P_{m}^{n}: {len(P)} points, value {P.values[0]:.4f}, admissible {v.passed}, "
          f"residual {v.residual:.4f} <= tol {v.tol:.4f}")
    print(f"         slice admissible {v.details['slice_admissible']}, "
          f"slice reduction residual {v.details['slice_reduction_residual']:.4f}")

print("\na latitude circle without the pole is not admissible:")
circle = sm.SphereConfig(sm.revolve_profile([2 * PI / 3], 2, 256), 0.0)
v = sm.revolved_admissibility_check(circle, np.eye(3)[0], sm.s2_grid(2000))
print(f"  admissible {v.passed}, worst antipodal sum defect {v.residual:.4f}")
