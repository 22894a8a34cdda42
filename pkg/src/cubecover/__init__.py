"""Inscribed boxes in symmetric bodies and rhombic-dodecahedron covers.

Numerical solvers for rotations of a box template that put all its vertices
on the boundary of a centrally symmetric convex body, for placing the
rhombic dodecahedron U3 over any set of diameter at most 1, plus the
closed-form ellipsoid oracles and S4 representation checks behind them.
"""
from .bodies import (BodyError, Ellipsoid, GeneralSet, PointCloudBody, body_from_dict,
                     diameter, gauge, odd_width, support)
from .borsuk import Partition4, max_piece_diameter, optimize_partition, partition_u3
from .cover import (CoverResult, TetraFrame, contains, phi, rd_mesh, solve_cover,
                    solve_cover_2d, w_residual)
from .groups import (Permutation, check_equivariance, fixed_point, frame_sections_check, iota,
                     subgroup_classes, tau6, tetra_action, vw_decomposition)
from .inscribe import (InscribedBox, KnasterSolution, NoSolutionError, SolverConfig,
                       inscribe_box, inscribe_in_surface, knaster_residual, solve_knaster)
from .oracle import (JacobianReport, QuadricSolutionSpace, box_quadric_space,
                     eggleston_family, ellipsoid_inscriptions, knaster_jacobian)
from .rotations import Rotation, quotient_distance, sample_uniform
from .templates import BoxTemplate, make_template, parse_template, symmetry_group

__version__ = "0.1.0"
