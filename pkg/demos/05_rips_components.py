"""Rips graphs of tree-like spaces.

For a tree metric, the r-thickening inside the tight span is homotopy
equivalent to a discrete set with one point per connected component of the
Rips graph at scale 2r. This script builds a random weighted tree, checks
that it is 0-hyperbolic, and sweeps the component count across all critical
scales, comparing open and closed conventions.

Run: python3 demos/05_rips_components.py
"""
import numpy as np

from tightspan.metric_core import cycle_graph, four_point_delta, random_tree_metric
from tightspan.vr_filtration import component_sweep, is_tree_like, thickening_components

rng = np.random.default_rng(0)
X = random_tree_metric(rng, 10, max_weight=6)
print("random tree metric on 10 nodes; four-point delta =", four_point_delta(X),
      "; tree-like:", is_tree_like(X))
print("C_4 for comparison: delta =", four_point_delta(cycle_graph(4)))

open_rows = component_sweep(X, closed=False)
closed_rows = component_sweep(X, closed=True)
print("\n scale   open  closed")
for (s, a), (_, b) in zip(open_rows, closed_rows):
    print(f"{s:6.1f}  {a:5d}  {b:6d}")

print("\nhomotopy type of the r-thickening (number of points):")
for r in (0.5, 1.5, 3.0, 6.0):
    print(f"  r = {r}: {thickening_components(X, r)} point(s)")
