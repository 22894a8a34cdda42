"""The S4 machinery behind both solvers.

S4 acts on the four tetrahedron vertices, on R³ through rotations of the
cube, and on R⁶ by permuting the six vertex pairs. The six-dimensional
action splits into a 3-dimensional piece V and its complement W.
"""
import numpy as np

from cubecover import frame_sections_check, subgroup_classes, tau6, vw_decomposition
from cubecover.groups import all_permutations, iota_defect

print("subgroup classes of S4:")
for c in subgroup_classes():
    print(f"  {c.label:>6}  order {c.order:2d}  conjugates {c.size}")

print(f"iota is a homomorphism to within {iota_defect():.1e}")

V, W = vw_decomposition()
leak = max(np.abs(W @ tau6(p) @ V.T).max() for p in all_permutations())
print(f"V and W are invariant: largest cross term {leak:.1e}")
print(f"frame sections agree to {frame_sections_check(100):.1e}")
