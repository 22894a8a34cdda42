"""Closed-form ground truth for boxes inscribed in ellipsoids.

Quadrics through the 8 vertices of a box, the enumeration of boxes of a
given shape inscribed in an axis-aligned ellipsoid, the Jacobian of the
vertex-value map at such a box, and a one-parameter family of ellipsoids
through the 6 points of V but not through (1, 1, 1).
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np

from .bodies import Ellipsoid
from .inscribe import InscribedBox
from .rotations import Rotation
from .templates import BoxTemplate

QUADRIC_TERMS = ("xx", "yy", "zz", "xy", "xz", "yz", "x", "y", "z", "1")


def quadric_row(p) -> np.ndarray:
    """Monomials (x², y², z², xy, xz, yz, x, y, z, 1) at p."""
    x, y, z = p
    return np.array([x * x, y * y, z * z, x * y, x * z, y * z, x, y, z, 1.0])


def quadric_matrix(coeffs):
    """Symmetric 4x4 matrix of a quadric given by its 10 coefficients."""
    a11, a22, a33, a12, a13, a23, b1, b2, b3, c = coeffs
    return np.array([
        [a11, a12 / 2, a13 / 2, b1 / 2],
        [a12 / 2, a22, a23 / 2, b2 / 2],
        [a13 / 2, a23 / 2, a33, b3 / 2],
        [b1 / 2, b2 / 2, b3 / 2, c],
    ])


def transform_quadric(coeffs, R: np.ndarray, center: np.ndarray):
    """Coefficients in coordinates y with x = center + R y."""
    T = np.eye(4)
    T[:3, :3] = R
    T[:3, 3] = center
    Q = T.T @ quadric_matrix(coeffs) @ T
    return np.array([Q[0, 0], Q[1, 1], Q[2, 2], 2 * Q[0, 1], 2 * Q[0, 2], 2 * Q[1, 2],
                     2 * Q[0, 3], 2 * Q[1, 3], 2 * Q[2, 3], Q[3, 3]])


@dataclass
class QuadricSolutionSpace:
    basis: np.ndarray
    dimension: int
    frame: np.ndarray = field(repr=False, default=None)
    center: np.ndarray = field(repr=False, default=None)
    box_frame_basis: np.ndarray = field(repr=False, default=None)

    @property
    def max_off_diagonal(self) -> float:
        """Largest |cross or linear coefficient| of the basis in the box frame."""
        return float(np.abs(self.box_frame_basis[:, 3:9]).max())


def box_frame(vertices) -> tuple[np.ndarray, np.ndarray]:
    """Centre and orthonormal edge frame (columns) of a box given by 8 points."""
    P = np.asarray(vertices, dtype=float)
    if P.shape != (8, 3) or not np.all(np.isfinite(P)):
        raise ValueError("a box needs 8 finite points in R^3")
    c = P.mean(axis=0)
    Q = P - c
    r = np.linalg.norm(Q, axis=1)
    if r.min() < 1e-12 or np.ptp(r) > 1e-9 * r.max():
        raise ValueError("degenerate box: vertices not equidistant from the centre")
    # the edges at vertex 0 are the only pairwise orthogonal triple of
    # displacements to the 6 vertices other than itself and its antipode
    others = [j for j in range(1, 8) if np.linalg.norm(Q[j] + Q[0]) > 1e-9 * r.max()]
    if len(others) != 6:
        raise ValueError("degenerate box: vertex 0 has no unique antipode")
    best, E = np.inf, None
    for tri in itertools.combinations(others, 3):
        edges = Q[list(tri)] - Q[0]
        lengths = np.linalg.norm(edges, axis=1)
        if lengths.min() < 1e-9 * r.max():
            raise ValueError("degenerate box: repeated vertices")
        U = edges / lengths[:, None]
        off = float(np.abs(U @ U.T - np.eye(3)).max())
        if off < best:
            best, E = off, U
    if best > 1e-8:
        raise ValueError("degenerate box: no orthogonal edge triple at vertex 0")
    if np.linalg.det(E) < 0:
        E[2] *= -1
    # every vertex must be c +- half-edges
    coords = Q @ E.T
    half = np.abs(coords)
    if np.ptp(half, axis=0).max() > 1e-8 * r.max():
        raise ValueError("degenerate box: points are not the vertices of a box")
    return c, E.T


def box_quadric_space(vertices, tol: float = 1e-9) -> QuadricSolutionSpace:
    """Quadrics vanishing on the 8 vertices of a box.

    The nullspace of the 8x10 evaluation matrix is 3-dimensional, and in
    box-aligned coordinates every member is diagonal with no linear part.
    """
    P = np.asarray(vertices, dtype=float)
    c, R = box_frame(P)
    M = np.array([quadric_row(p) for p in P])
    _, s, Vt = np.linalg.svd(M)
    rank = int(np.sum(s > tol * s[0]))
    basis = Vt[rank:]
    local = np.array([transform_quadric(b, R, c) for b in basis])
    return QuadricSolutionSpace(basis=basis, dimension=len(basis), frame=R, center=c,
                                box_frame_basis=local)


def _rotation_to_axes(perm_index) -> np.ndarray:
    """Signed permutation with det +1 sending axis k to axis perm_index[k]."""
    M = np.zeros((3, 3))
    for k, j in enumerate(perm_index):
        M[j, k] = 1.0
    if np.linalg.det(M) < 0:
        M[:, 0] *= -1
    return M


def ellipsoid_inscriptions(E: Ellipsoid, t: BoxTemplate) -> list[InscribedBox]:
    """All boxes similar to ``t`` inscribed in an axis-aligned ellipsoid.

    Each assignment of the template's half-edges to the coordinate axes gives
    one box, scaled so that its vertices satisfy sum a_i d_i^2 = 1.
    """
    a = np.asarray(E.coeffs, dtype=float)
    if not np.allclose(E.rotation.matrix, np.eye(3)) or np.any(E.center != 0):
        raise ValueError("ellipsoid must be axis-aligned and centred")
    if len(set(np.round(a, 12))) < 3:
        warnings.warn("repeated ellipsoid coefficients: inscribed boxes are not isolated",
                      stacklevel=2)
    half = np.asarray(t.half_edges, dtype=float)
    out = []
    seen = set()
    for perm in itertools.permutations(range(3)):
        d = np.empty(3)
        d[list(perm)] = half
        key = tuple(np.round(d, 12))
        if key in seen:
            continue
        seen.add(key)
        s = 1.0 / np.sqrt(float(np.sum(a * d * d)))
        M = _rotation_to_axes(perm)
        face = (t.v @ M.T) * s
        # lam is the common gauge of the unit-sphere template directions
        out.append(InscribedBox(vertices=np.vstack([face, -face]), template=t,
                                A=Rotation.from_matrix(M), lam=1.0 / s))
    return out


@dataclass
class JacobianReport:
    J: np.ndarray
    rank: int
    transversal: bool
    singular_values: np.ndarray = field(repr=False, default=None)


def knaster_jacobian(E: Ellipsoid, vertices, rtol: float = 1e-9) -> JacobianReport:
    """Derivative of (q(A x_k))_k at A = identity for the first 4 vertices.

    ``q`` is the ellipsoid's quadratic form and A = exp(S(alpha)); column
    order is (alpha_12, alpha_13, alpha_23).
    """
    a = np.asarray(E.coeffs, dtype=float)
    X = np.asarray(vertices, dtype=float)[:4]
    on = X ** 2 @ a
    if np.abs(on - 1.0).max() > 1e-8:
        raise ValueError("box vertices are not on the ellipsoid boundary")
    pairs = [(0, 1), (0, 2), (1, 2)]
    J = np.column_stack([2 * (a[i] - a[j]) * X[:, i] * X[:, j] for i, j in pairs])
    s = np.linalg.svd(J, compute_uv=False)
    rank = 0 if s[0] == 0 else int(np.sum(s > rtol * s[0]))
    s_aug = np.linalg.svd(np.column_stack([J, np.ones(4)]), compute_uv=False)
    rank_aug = int(np.sum(s_aug > rtol * s_aug[0]))
    transversal = rank == 3 and rank_aug == 4
    return JacobianReport(J=J, rank=rank, transversal=transversal, singular_values=s)


def quadratic_form_values(E: Ellipsoid, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return np.einsum("ni,ij,nj->n", X, E.form, X)


# -- ellipsoids through V but not through (1, 1, 1) --------------------------

OCTAHEDRON_V = np.array([p for p in itertools.product((-1.0, 1.0), repeat=3)
                         if abs(sum(p)) == 1.0])


@dataclass
class EgglestonResult:
    eps: float
    form: np.ndarray
    level: float
    conic: np.ndarray
    eigenvalues: np.ndarray
    v_residual: float
    corner_value: float
    on_v: bool
    off_corner: bool
    distinct: bool

    @property
    def normalized_form(self) -> np.ndarray:
        """The form scaled to level 1."""
        return self.form / self.level


def eggleston_family(eps: float, tol: float = 1e-9) -> EgglestonResult:
    """Ellipsoid through V whose boundary misses (1, 1, 1) unless eps = 0.

    A conic a11 x² + a12 xy + a22 y² + b1 x + b2 y + 1 = 0 in the plane
    z = 1 through (-1,-1), (-1,1), (1,-1), (1+eps,1), (sqrt 3,0) is lifted to
    the centred quadric x^T Q x + C = 0 with Q_ij = a_ij, Q_i3 = b_i / 2,
    Q_33 = -1 and C = 1 - Q_33. Rescaling by -3/2 turns eps = 0 into
    0.5 x² + y² + 1.5 z² = 3; the result is reported as x^T form x = level.
    """
    pts = np.array([[-1, -1], [-1, 1], [1, -1], [1 + eps, 1], [np.sqrt(3.0), 0]], dtype=float)
    M = np.column_stack([pts[:, 0] ** 2, pts[:, 0] * pts[:, 1], pts[:, 1] ** 2,
                         pts[:, 0], pts[:, 1]])
    if np.linalg.cond(M) > 1e12:
        raise ValueError("conic through the five points is degenerate")
    a11, a12, a22, b1, b2 = np.linalg.solve(M, -np.ones(5))
    q33 = -1.0
    Q = np.array([
        [a11, a12 / 2, b1 / 2],
        [a12 / 2, a22, b2 / 2],
        [b1 / 2, b2 / 2, q33],
    ])
    C = 1.0 - q33
    scale = -1.5
    Q, C = scale * Q, -scale * C
    ev = np.linalg.eigvalsh(Q / C)
    if ev.min() <= 0:
        raise ValueError("lifted quadric is not an ellipsoid")
    vals = np.einsum("ni,ij,nj->n", OCTAHEDRON_V, Q, OCTAHEDRON_V)
    vres = float(np.abs(vals / C - 1.0).max())
    corner = float(np.ones(3) @ Q @ np.ones(3) / C - 1.0)
    gaps = np.diff(np.sort(ev))
    return EgglestonResult(
        eps=float(eps), form=Q, level=float(C), conic=np.array([a11, a12, a22, b1, b2]),
        eigenvalues=ev, v_residual=vres, corner_value=corner, on_v=vres <= tol,
        off_corner=abs(corner) > 1e-4 * abs(eps) if eps != 0 else abs(corner) <= tol,
        distinct=bool(gaps.min() > 1e-4),
    )
