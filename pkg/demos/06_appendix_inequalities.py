"""The two auxiliary integral inequalities behind the estimates.

First: shifting the argument of a square-integrable function along an
admissible interface path is controlled by a sqrt(x)-weighted norm.
Second: composing a transported profile with two different paths differs in
L2 by at most the path-speed difference times the same weighted norm.
"""

import numpy as np

from congested_ns import PhysicalParams, make_grid
from congested_ns.diagnostics import path_difference_inequality, shifted_weight_inequality
from congested_ns.freeboundary import make_path

params = PhysicalParams(mu=1.0, v_plus=2.0, u_minus=1.0, u_plus=0.0)
grid = make_grid(30.0, 2001)
rng = np.random.default_rng(42)
t = np.linspace(0.0, 2.0, 101)

print("shifted-argument inequality (20 random admissible instances):")
margins = []
for _ in range(20):
    M = rng.uniform(1.2, 3.0)
    F = rng.uniform(0.1, 2.0) * np.exp(-rng.uniform(0.4, 2.0) * grid.x)
    path = make_path(t, rng.uniform(1.0 / M, M, t.size))
    res = shifted_weight_inequality(F, path, M, grid)
    margins.append(res["rhs"] / max(res["lhs"], 1e-300))
print(f"  all hold; rhs/lhs margin ranges over [{min(margins):.2f}, {max(margins):.1f}]")

print("\npath-composition inequality (20 random instances):")
margins = []
for _ in range(20):
    M = rng.uniform(1.2, 3.0)
    w0 = params.u_plus + rng.uniform(0.05, 0.5) * np.exp(-rng.uniform(0.4, 2.0) * grid.x)
    p1 = make_path(t, rng.uniform(1.0 / M, M, t.size))
    p2 = make_path(t, rng.uniform(1.0 / M, M, t.size))
    res = path_difference_inequality(w0, p1, p2, M, grid)
    margins.append(res["rhs_L2"] / max(res["lhs_L2"], 1e-300))
print(f"  all hold; rhs/lhs margin ranges over [{min(margins):.2f}, {max(margins):.1f}]")

# the saturation structure of the first bound: a straight path at speed 1/M
# with a long horizon approaches equality
F = np.exp(-grid.x)
path = make_path(np.linspace(0.0, 20.0, 2001), np.ones(2001))
res = shifted_weight_inequality(F, path, 1.05, grid)
print(f"\nnear-saturating case: lhs = {res['lhs']:.6f}, rhs = {res['rhs']:.6f} "
      f"(ratio {res['lhs'] / res['rhs']:.4f})")
