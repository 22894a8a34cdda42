"""Cutting U3 into four pieces of small diameter.

A cap is sliced off along a direction n and the rest is split into three
sectors around an axis parallel to n. Compass search tunes the eight cut
parameters. The six octahedral vertices of U3 are pairwise at distance at
least 1, so no four-piece cut can beat 1.
"""
import sys

from cubecover.borsuk import (PARAM_NAMES, THETA0, diameter_lower_bound, max_piece_diameter,
                              optimize_partition, partition_u3)

budget = int(sys.argv[1]) if len(sys.argv) > 1 else 2000

start = partition_u3(THETA0)
print(f"starting cut: max piece diameter {max_piece_diameter(start):.6f}")

r = optimize_partition(budget=budget, seed=0)
print(f"after {r.evaluations} evaluations: {r.value:.6f} (recomputed {r.certificate:.6f})")
for name, value in zip(PARAM_NAMES, r.theta):
    print(f"  {name:8s} {value:+.6f}")
best = partition_u3(r.theta)
print("piece diameters", [round(d, 6) for d in best.piece_diameters()])
print(f"lower bound for any 4 pieces: {diameter_lower_bound():.6f}")
