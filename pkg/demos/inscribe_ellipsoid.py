"""Boxes inscribed in an ellipsoid: numerical search against the closed form.

For the ellipsoid x²/6 + y²/3 + z²/2 = 1 a cube fits in exactly one way up to
symmetry, a 1:1:2 box in three ways and a 1:2:3 box in six. The multistart
solver should find the same rotations as the oracle, one cluster each.
"""
import numpy as np

from cubecover import (Ellipsoid, SolverConfig, ellipsoid_inscriptions, knaster_jacobian,
                       make_template, quotient_distance, solve_knaster, symmetry_group)

E = Ellipsoid([1 / 6, 1 / 3, 1 / 2])

for ratios in [(1, 1, 1), (1, 1, 2), (1, 2, 3)]:
    t = make_template(*ratios)
    found = solve_knaster(E.gauge, t, SolverConfig(starts=256, seed=0))
    exact = ellipsoid_inscriptions(E, t)
    G = symmetry_group(t)
    match = max(min(quotient_distance(b.A, s.A, G) for s in found) for b in exact)
    print(f"box {ratios}: solver found {len(found)}, closed form has {len(exact)}, "
          f"worst rotation mismatch {match:.1e}")

# The cube's vertices land on (+-1, +-1, +-1), and the zero is transversal.
cube = ellipsoid_inscriptions(E, make_template(1, 1, 1))[0]
print("cube vertices:\n", np.round(cube.vertices, 12))
rep = knaster_jacobian(E, cube.vertices)
print(f"Jacobian rank {rep.rank}, transversal {rep.transversal}")
