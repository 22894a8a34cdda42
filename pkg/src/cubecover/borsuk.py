"""Cutting the rhombic dodecahedron U3 into 4 convex pieces of small diameter.

The cut family has 8 parameters::

    theta = (polar, azimuth, cap, ax, ay, alpha1, alpha2, alpha3)

``polar`` and ``azimuth`` give a unit normal n. The cap piece is
``U3 ∩ {<p, n> >= cap}``. The rest is split into three sectors around the
line through ``ax e1 + ay e2`` parallel to n, where (e1, e2, n) is a
right-handed frame; sector k spans the angles between consecutive sorted
``alpha`` values. Sectors wider than pi are not convex and are rejected.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull, HalfspaceIntersection
from scipy.optimize import linprog

from .bodies import diameter
from .cover import Mesh, halfspace_mesh, rd_mesh, u3_halfspaces

LITERATURE_VALUE = 0.98
MIN_INRADIUS = 1e-7
_U3_NORMALS, _U3_OFFSETS = u3_halfspaces()
_U3_VERTS = None

# cap normal along (1, 1, 1), axis through the centre, 120 degree sectors
THETA0 = np.array([np.arccos(1 / np.sqrt(3.0)), np.pi / 4, 0.3, 0.0, 0.0,
                   0.0, 2 * np.pi / 3, 4 * np.pi / 3])
PARAM_NAMES = ("polar", "azimuth", "cap", "ax", "ay", "alpha1", "alpha2", "alpha3")


class DegenerateCutError(ValueError):
    """A cut leaves some piece empty or non-convex."""


@dataclass
class Partition4:
    pieces: list
    theta: np.ndarray

    @property
    def piece_vertices(self) -> list[np.ndarray]:
        return [p.vertices for p in self.pieces]

    def piece_diameters(self) -> list[float]:
        return [diameter(v) for v in self.piece_vertices]

    def volumes(self) -> list[float]:
        return [float(ConvexHull(v).volume) for v in self.piece_vertices]

    def halfspaces(self) -> list[tuple[np.ndarray, np.ndarray]]:
        return [(p.normals, p.offsets) for p in self.pieces]


@dataclass
class Piece(Mesh):
    normals: np.ndarray = field(default=None, repr=False)
    offsets: np.ndarray = field(default=None, repr=False)


def cut_frame(polar: float, azimuth: float) -> np.ndarray:
    """Rows e1, e2, n of a right-handed frame with n at the given angles."""
    n = np.array([np.sin(polar) * np.cos(azimuth), np.sin(polar) * np.sin(azimuth),
                  np.cos(polar)])
    helper = np.array([0.0, 0.0, 1.0]) if abs(n[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e1 = np.cross(helper, n)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    return np.array([e1, e2, n])


def piece_halfspaces(theta) -> list[tuple[np.ndarray, np.ndarray]]:
    """Extra halfspaces (normals, offsets) cutting U3 into the 4 pieces."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (8,) or not np.all(np.isfinite(theta)):
        raise DegenerateCutError("cut parameters must be 8 finite numbers")
    polar, azimuth, cap, ax, ay = theta[:5]
    e1, e2, n = cut_frame(polar, azimuth)
    alphas = np.sort(np.mod(theta[5:], 2 * np.pi))
    gaps = np.diff(np.append(alphas, alphas[0] + 2 * np.pi))
    if gaps.max() > np.pi + 1e-12:
        raise DegenerateCutError("a sector wider than pi is not convex")
    c = ax * e1 + ay * e2
    out = [(n[None, :] * -1.0, np.array([-cap]))]
    for k in range(3):
        a, b = alphas[k], alphas[(k + 1) % 3]
        # left of the ray at angle a and right of the ray at angle b
        na = -(-np.sin(a) * e1 + np.cos(a) * e2)
        nb = -(np.sin(b) * e1 - np.cos(b) * e2)
        normals = np.array([n, na, nb])
        out.append((normals, normals @ c + np.array([cap - normals[0] @ c, 0.0, 0.0])))
    return out


def _interior(normals, offsets):
    norms = np.linalg.norm(normals, axis=1)
    res = linprog(np.array([0.0, 0.0, 0.0, -1.0]), A_ub=np.column_stack([normals, norms]),
                  b_ub=offsets, bounds=[(None, None)] * 3 + [(0, None)], method="highs")
    if res.status != 0 or res.x[3] < MIN_INRADIUS:
        raise DegenerateCutError("cut leaves an empty piece")
    return res.x[:3]


def _piece(normals, offsets, with_faces: bool):
    if with_faces:
        m = halfspace_mesh(normals, offsets, interior=_interior(normals, offsets))
        return Piece(vertices=m.vertices, faces=m.faces, normals=normals, offsets=offsets)
    hs = HalfspaceIntersection(np.column_stack([normals, -offsets]), _interior(normals, offsets))
    V = hs.intersections
    return Piece(vertices=V[ConvexHull(V).vertices], faces=[], normals=normals, offsets=offsets)


def partition_u3(theta=THETA0, with_faces: bool = True) -> Partition4:
    """Cut U3 (centred, canonical orientation) into 4 convex pieces.

    Raises DegenerateCutError when a piece is empty or a sector is not
    convex.
    """
    pieces = []
    for normals, offsets in piece_halfspaces(theta):
        N = np.vstack([_U3_NORMALS, normals])
        b = np.concatenate([_U3_OFFSETS, offsets])
        pieces.append(_piece(N, b, with_faces))
    return Partition4(pieces=pieces, theta=np.asarray(theta, dtype=float).copy())


def trivial_partition() -> Partition4:
    """U3 as a single piece; a reference for the diameter bound."""
    m = rd_mesh()
    return Partition4(pieces=[Piece(vertices=m.vertices, faces=m.faces, normals=_U3_NORMALS,
                                    offsets=_U3_OFFSETS)], theta=np.full(8, np.nan))


def max_piece_diameter(p: Partition4) -> float:
    """Largest vertex-pair distance over the (convex) pieces."""
    return max(p.piece_diameters())


def covers(p: Partition4, points, tol: float = 1e-9) -> np.ndarray:
    """For each point, whether some piece contains it within ``tol``."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    hit = np.zeros(len(P), dtype=bool)
    for piece in p.pieces:
        norms = np.linalg.norm(piece.normals, axis=1)
        sd = ((P @ piece.normals.T - piece.offsets) / norms).max(axis=1)
        hit |= sd <= tol
    return hit


def sample_u3_faces(n: int, seed: int = 0) -> np.ndarray:
    """About ``n`` points sampled uniformly on the rhombic faces of U3."""
    m = rd_mesh()
    rng = np.random.default_rng(seed)
    per = int(np.ceil(n / len(m.faces)))
    out = []
    for f in m.faces:
        a, b, c, d = m.vertices[f]
        s, t = rng.random((2, per))
        # the rhombus is a parallelogram a + s (b - a) + t (d - a)
        out.append(a + s[:, None] * (b - a) + t[:, None] * (d - a))
    return np.vstack(out)[:n]


def clip(points: np.ndarray, normal: np.ndarray, offset: float) -> np.ndarray:
    """Vertices of conv(points) ∩ {<p, normal> <= offset}, possibly with extras.

    Extra points come from triangulation diagonals and lie inside the clipped
    polytope, so its hull and diameter are unaffected.
    """
    hull = ConvexHull(points)
    P = points[hull.vertices]
    side = P @ normal - offset
    keep = P[side <= 0]
    idx = {v: k for k, v in enumerate(hull.vertices)}
    edges = {tuple(sorted((idx[a], idx[b]))) for simplex in hull.simplices
             for a, b in ((simplex[0], simplex[1]), (simplex[1], simplex[2]),
                          (simplex[0], simplex[2]))}
    cuts = [P[i] + (side[i] / (side[i] - side[j])) * (P[j] - P[i])
            for i, j in edges if side[i] * side[j] < 0]
    return np.vstack([keep, *cuts]) if cuts else keep


def _u3_vertices():
    global _U3_VERTS
    if _U3_VERTS is None:
        _U3_VERTS = rd_mesh().vertices
    return _U3_VERTS


def clipped_pieces(theta) -> list[np.ndarray]:
    """Piece vertex sets by successive clipping of U3's vertices."""
    U = _u3_vertices()
    out = []
    for normals, offsets in piece_halfspaces(theta):
        P = U
        for n, b in zip(normals, offsets):
            P = clip(P, n, b)
            if len(P) < 4:
                raise DegenerateCutError("cut leaves an empty piece")
        try:
            hull = ConvexHull(P)
        except Exception as exc:  # flat pieces make qhull fail
            raise DegenerateCutError("cut leaves a flat piece") from exc
        if hull.volume < MIN_INRADIUS ** 2:
            raise DegenerateCutError("cut leaves an empty piece")
        out.append(P[hull.vertices])
    return out


def evaluate(theta) -> float:
    """Max piece diameter by clipping, or inf for a degenerate cut."""
    try:
        return max(diameter(P) for P in clipped_pieces(theta))
    except DegenerateCutError:
        return np.inf


@dataclass
class OptimizeResult:
    theta: np.ndarray
    value: float
    evaluations: int
    history: list = field(repr=False, default_factory=list)
    certificate: float = np.nan


STEP0 = np.array([0.2, 0.2, 0.1, 0.1, 0.1, 0.3, 0.3, 0.3])
MIN_STEP = 1e-6


def optimize_partition(budget: int = 10_000, seed: int = 0, theta0=THETA0) -> OptimizeResult:
    """Compass search with random restarts on the max piece diameter.

    ``budget`` counts objective evaluations. The returned value is
    recomputed from scratch on the final pieces (``certificate``).
    """
    if budget < 0:
        raise ValueError("budget must be >= 0")
    rng = np.random.default_rng(seed)
    best_t = np.asarray(theta0, dtype=float).copy()
    best_v = evaluate(best_t)
    history = [best_v]
    evals = 0

    def f(y):
        nonlocal evals, best_t, best_v
        v = evaluate(y)
        evals += 1
        if v < best_v:
            best_t, best_v = y.copy(), v
        history.append(best_v)
        return v

    x, fx, step = best_t.copy(), best_v, STEP0.copy()
    while evals < budget:
        improved = False
        for k in rng.permutation(8):
            for sgn in (1.0, -1.0):
                if evals >= budget:
                    break
                y = x.copy()
                y[k] += sgn * step[k]
                fy = f(y)
                if fy < fx:
                    x, fx, improved = y, fy, True
                    break
        if improved:
            continue
        step *= 0.5
        if step.max() < MIN_STEP * 8 and evals < budget:
            # restart from a perturbation of the incumbent
            x = best_t + rng.normal(scale=0.5, size=8) * STEP0
            fx = f(x)
            step = STEP0.copy()
    cert = max_piece_diameter(partition_u3(best_t)) if np.isfinite(best_v) else np.inf
    return OptimizeResult(theta=best_t, value=float(best_v), evaluations=evals,
                          history=history, certificate=float(cert))


def diameter_lower_bound() -> float:
    """Every 4-piece cover of U3 has a piece of diameter at least this.

    The 6 octahedral vertices of U3 are pairwise at distance >= 1, so two of
    them share a piece.
    """
    m = rd_mesh()
    tips = m.vertices[np.isclose(np.abs(m.vertices).max(axis=1), np.sqrt(2) / 2)]
    D = np.linalg.norm(tips[:, None] - tips[None], axis=2)
    return float(D[~np.eye(len(tips), dtype=bool)].min())
