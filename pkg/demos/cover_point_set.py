"""Covering a set of diameter 1 by a rotated copy of the rhombic dodecahedron U3.

U3 is the intersection of six slabs of width 1. The solver looks for a
rotation at which the six slab mid-planes pass through a common point, then
checks that every input point lies inside.
"""
import numpy as np

from cubecover import rd_mesh, solve_cover
from cubecover.groups import UNIT_TETRA

rng = np.random.default_rng(7)
X = rng.normal(size=(40, 3)) * [1.0, 0.6, 0.3]
X /= np.linalg.norm(X[:, None] - X[None], axis=2).max() * (1 + 1e-12)

r = solve_cover(X)
print(f"rotation (quaternion) {np.round(r.A.q, 6)}")
print(f"centre {np.round(r.x, 6)}, mid-plane mismatch {r.w_residual_norm:.1e}")
print(f"all points inside: {r.contained} (worst slab excess {r.max_violation:.2e})")

mesh = rd_mesh(r.A, r.x)
print(f"U3 copy: {len(mesh.vertices)} vertices, volume {mesh.volume():.6f}")

# The regular tetrahedron of edge 1 sits symmetrically: centre at the origin.
t = solve_cover(UNIT_TETRA)
print(f"tetrahedron: centre {np.linalg.norm(t.x):.1e} from the origin, "
      f"{len(t.clusters)} candidate rotations")
