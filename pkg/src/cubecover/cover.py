"""Covering sets of diameter at most one by a rhombic dodecahedron.

The cover ``U3`` is the intersection of the six width-1 strips orthogonal
to the edges ``u_ij = v_j - v_i`` of a unit-edge regular tetrahedron
centred at the origin. A set X fits in ``A U3 + x`` as soon as the six
mid-planes ``<y, A u_ij> = F0(A u_ij)`` of X meet in the point x, where
``F0(u) = (h(u) - h(-u)) / 2``. That happens exactly when the vector of
mid-plane offsets has no component in the subspace W of R^6.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.spatial import ConvexHull, HalfspaceIntersection

from . import descent
from .bodies import BodyError, GeneralSet, diameter, odd_width
from .groups import PAIRS, UNIT_TETRA, cube_rotations, vw_decomposition
from .rotations import Rotation

DIAMETER_SLACK = 1e-12
CONTAIN_TOL = 1e-9


@dataclass(frozen=True)
class TetraFrame:
    """Unit-edge regular tetrahedron centred at the origin."""

    v: np.ndarray = field(default_factory=lambda: UNIT_TETRA.copy())

    @property
    def edges(self) -> np.ndarray:
        """Rows u_ij = v_j - v_i ordered 12, 13, 14, 23, 24, 34."""
        return np.array([self.v[j] - self.v[i] for i, j in PAIRS])


FRAME = TetraFrame()
EDGES = FRAME.edges
V_BASIS, W_BASIS = vw_decomposition()


@dataclass
class CoverConfig:
    starts: int = 16
    seed: int = 0
    tol: float = 1e-10
    max_iter: int = 100
    radius: float = 1e-3
    contain_tol: float = CONTAIN_TOL


@dataclass
class CoverResult:
    A: Rotation
    x: np.ndarray
    w_residual_norm: float
    ls_residual: float
    contained: bool
    max_violation: float
    clusters: list = field(default_factory=list, repr=False)
    degenerate: bool = False


class NoCoverError(RuntimeError):
    def __init__(self, msg, search=None):
        super().__init__(msg)
        self.search = search


def odd_function(X) -> Callable:
    """F0 of a point set, evaluated on rows of directions."""
    S = X if isinstance(X, GeneralSet) else GeneralSet(np.asarray(X, dtype=float))
    return lambda U: odd_width(S, np.atleast_2d(U))


def _matrix(A):
    return A.matrix if isinstance(A, Rotation) else np.asarray(A, dtype=float)


def phi(F0: Callable, A) -> np.ndarray:
    """Mid-plane offsets F0(A u_ij) in the order 12, 13, 14, 23, 24, 34."""
    vals = np.asarray(F0(EDGES @ _matrix(A).T), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ValueError("F0 returned a non-finite value")
    return vals


def w_residual(F0: Callable, A) -> np.ndarray:
    """Coordinates of phi(F0, A) in the orthonormal basis of W."""
    return W_BASIS @ phi(F0, A)


def concurrency_point(F0: Callable, A):
    """Least-squares common point of the six mid-planes and its defect."""
    M = EDGES @ _matrix(A).T
    b = phi(F0, A)
    x, *_ = np.linalg.lstsq(M, b, rcond=None)
    return x, float(np.linalg.norm(M @ x - b))


def contains(A, x, X, tol: float = CONTAIN_TOL):
    """Whether X lies in A U3 + x; returns (flag, max violation)."""
    P = np.atleast_2d(np.asarray(X.points if isinstance(X, GeneralSet) else X, dtype=float))
    proj = (P - np.asarray(x, dtype=float)) @ (EDGES @ _matrix(A).T).T
    viol = float(np.abs(proj).max() - 0.5)
    return viol <= tol, viol


def cover_group() -> list[Rotation]:
    """Rotation group of U3 (the 24 rotations of the cube)."""
    return cube_rotations()


def _cluster_key(c):
    return (round(c.rotation.angle(), 9), tuple(np.round(c.rotation.q, 9)))


def solve_cover(X, config: CoverConfig | None = None) -> CoverResult:
    """Place U3 over a set of diameter at most 1.

    Raises BodyError when the diameter exceeds 1 and NoCoverError when no
    start reaches a zero of the W-projection.
    """
    cfg = config or CoverConfig()
    S = X if isinstance(X, GeneralSet) else GeneralSet(np.asarray(X, dtype=float))
    d = diameter(S.points)
    if d > 1.0 + DIAMETER_SLACK:
        raise BodyError(f"set diameter {d:.17g} exceeds 1")
    P = S.points

    def residual(M):
        D = P @ (EDGES @ M.T).T
        return W_BASIS @ (0.5 * (D.max(axis=0) + D.min(axis=0)))

    F0 = odd_function(S)
    G = cover_group()
    search = descent.multistart(residual, G, starts=cfg.starts, seed=cfg.seed, tol=cfg.tol,
                                max_iter=cfg.max_iter, radius=cfg.radius)
    if not search.clusters:
        raise NoCoverError(
            f"no start converged ({search.starts} starts, max "
            f"{max(search.iterations, default=0)} iterations)", search)
    # zeros usually come in several clusters with residuals at roundoff
    # level; order them by the canonical representative's angle instead
    clusters = sorted(search.clusters, key=_cluster_key)
    best = None
    for c in clusters:
        x, ls = concurrency_point(F0, c.rotation)
        ok, viol = contains(c.rotation, x, P, cfg.contain_tol)
        res = CoverResult(A=c.rotation, x=x, w_residual_norm=c.residual, ls_residual=ls,
                          contained=ok, max_violation=viol, clusters=clusters,
                          degenerate=search.degenerate)
        if best is None:
            best = res
        if ok:
            return res
    return best


# -- polytope meshes ---------------------------------------------------------

@dataclass
class Mesh:
    vertices: np.ndarray
    faces: list

    def diameter(self) -> float:
        return diameter(self.vertices)

    def volume(self) -> float:
        """Volume by the divergence theorem over fan-triangulated faces."""
        c = self.vertices.mean(axis=0)
        vol = 0.0
        for f in self.faces:
            p0 = self.vertices[f[0]] - c
            for a, b in zip(f[1:-1], f[2:]):
                vol += np.dot(p0, np.cross(self.vertices[a] - c, self.vertices[b] - c)) / 6.0
        return abs(vol)

    def to_off(self) -> str:
        lines = ["OFF", f"{len(self.vertices)} {len(self.faces)} 0"]
        lines += [" ".join(f"{c:.17g}" for c in v) for v in self.vertices]
        lines += [" ".join(str(i) for i in [len(f), *f]) for f in self.faces]
        return "\n".join(lines) + "\n"


def halfspace_mesh(normals: np.ndarray, offsets: np.ndarray, interior=None,
                   tol: float = 1e-9) -> Mesh:
    """Polytope {p : normals @ p <= offsets} as vertices and planar faces.

    Faces are listed counter-clockwise seen from outside.
    """
    normals = np.asarray(normals, dtype=float)
    offsets = np.asarray(offsets, dtype=float)
    if interior is None:
        interior = chebyshev_center(normals, offsets)
    hs = HalfspaceIntersection(np.column_stack([normals, -offsets]), np.asarray(interior, float))
    pts = hs.intersections
    # merge duplicate vertices produced at degenerate (over-determined) corners
    verts = []
    for p in pts:
        if not any(np.linalg.norm(p - q) < tol * 10 for q in verts):
            verts.append(p)
    verts = np.array(verts)
    faces = []
    for n, b in zip(normals, offsets):
        on = np.where(np.abs(verts @ n - b) < tol * max(1.0, abs(b)) * 10)[0]
        if len(on) < 3:
            continue
        c = verts[on].mean(axis=0)
        nn = n / np.linalg.norm(n)
        e1 = verts[on[0]] - c
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(nn, e1)
        ang = np.arctan2((verts[on] - c) @ e2, (verts[on] - c) @ e1)
        faces.append([int(i) for i in on[np.argsort(ang)]])
    return Mesh(vertices=verts, faces=faces)


def chebyshev_center(normals, offsets):
    """Centre of the largest ball inside {normals @ p <= offsets}."""
    from scipy.optimize import linprog

    norms = np.linalg.norm(normals, axis=1)
    c = np.array([0.0, 0.0, 0.0, -1.0])
    A = np.column_stack([normals, norms])
    res = linprog(c, A_ub=A, b_ub=offsets, bounds=[(None, None)] * 3 + [(0, None)],
                  method="highs")
    if res.status != 0 or res.x[3] <= 1e-12:
        raise ValueError("halfspace intersection has empty interior")
    return res.x[:3]


def u3_halfspaces(A=None, x=None):
    """The 12 halfspaces |<p - x, A u_ij>| <= 1/2 as (normals, offsets)."""
    M = EDGES @ (_matrix(A).T if A is not None else np.eye(3))
    x = np.zeros(3) if x is None else np.asarray(x, dtype=float)
    normals = np.vstack([M, -M])
    offsets = 0.5 + normals @ x
    return normals, offsets


def rd_mesh(A=None, x=None) -> Mesh:
    """Mesh of the rhombic dodecahedron A U3 + x."""
    normals, offsets = u3_halfspaces(A, x)
    x0 = np.zeros(3) if x is None else np.asarray(x, dtype=float)
    return halfspace_mesh(normals, offsets, interior=x0)


def octahedron_mesh() -> Mesh:
    """Regular octahedron with distance 1 between opposite faces."""
    normals = np.array([[a, b, c] for a in (1, -1) for b in (1, -1) for c in (1, -1)],
                       dtype=float) / np.sqrt(3.0)
    return halfspace_mesh(normals, np.full(8, 0.5), interior=np.zeros(3))


def hull_volume(points) -> float:
    return float(ConvexHull(np.asarray(points, dtype=float)).volume)


# -- the planar analogue ------------------------------------------------------

@dataclass
class HexCover:
    theta: float
    center: np.ndarray
    contained: bool
    max_violation: float
    evaluations: int
    residual: float


def _hex_dirs(theta):
    ang = theta + np.array([0.0, np.pi / 3, 2 * np.pi / 3])
    return np.column_stack([np.cos(ang), np.sin(ang)])


def solve_cover_2d(X, tol: float = CONTAIN_TOL, max_evals: int = 60) -> HexCover:
    """Place the regular hexagon of width 1 over a planar set of diameter <= 1.

    With u_k the unit vectors at angles theta + k pi/3, the three mid-lines
    are concurrent iff r(theta) = F0(u_0) - F0(u_1) + F0(u_2) vanishes, and
    r(theta + pi/3) = -r(theta), so bisection on [0, pi/3] finds a root.
    """
    P = np.atleast_2d(np.asarray(X, dtype=float))
    if P.shape[1] != 2:
        raise ValueError("planar set must be (n, 2)")
    d = float(np.max(np.linalg.norm(P[:, None] - P[None], axis=2)))
    if d > 1.0 + DIAMETER_SLACK:
        raise BodyError(f"set diameter {d:.17g} exceeds 1")
    evals = 0

    def r(theta):
        nonlocal evals
        evals += 1
        D = P @ _hex_dirs(theta).T
        f0 = 0.5 * (D.max(axis=0) + D.min(axis=0))
        return f0[0] - f0[1] + f0[2]

    lo, hi = 0.0, np.pi / 3
    rlo = r(lo)
    if rlo == 0.0:
        theta = lo
    else:
        rhi = r(hi)
        theta = hi if rhi == 0.0 else None
        while theta is None and evals < max_evals:
            mid = 0.5 * (lo + hi)
            rm = r(mid)
            if rm == 0.0 or hi - lo < 1e-15:
                theta = mid
            elif np.sign(rm) == np.sign(rlo):
                lo, rlo = mid, rm
            else:
                hi = mid
        if theta is None:
            theta = 0.5 * (lo + hi)
    U = _hex_dirs(theta)
    D = P @ U.T
    f0 = 0.5 * (D.max(axis=0) + D.min(axis=0))
    center, *_ = np.linalg.lstsq(U, f0, rcond=None)
    viol = float(np.abs((P - center) @ U.T).max() - 0.5)
    return HexCover(theta=float(theta), center=center, contained=viol <= tol,
                    max_violation=viol, evaluations=evals, residual=float(f0[0] - f0[1] + f0[2]))
