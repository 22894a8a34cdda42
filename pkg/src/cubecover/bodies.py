"""Convex bodies and the scalar functions the solvers consume.

Every query accepts a single 3-vector or an ``(n, 3)`` array of rows and
returns a float or an ``(n,)`` array accordingly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from .rotations import Rotation


class BodyError(ValueError):
    """Raised when a body is invalid for the requested query."""


def _rows(x):
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    return np.atleast_2d(x), single


def _out(vals, single):
    return float(vals[0]) if single else vals


def _nonzero(U):
    if np.any(np.linalg.norm(U, axis=1) == 0.0):
        raise BodyError("direction must be nonzero")


@dataclass(frozen=True, eq=False)
class Ellipsoid:
    """The body ``{x : sum a_i y_i^2 <= 1}`` with ``y = R^T (x - center)``."""

    coeffs: np.ndarray
    rotation: Rotation = field(default_factory=Rotation.identity)
    center: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        a = np.asarray(self.coeffs, dtype=float)
        if a.shape != (3,) or np.any(~np.isfinite(a)) or np.any(a <= 0):
            raise BodyError("ellipsoid coefficients must be 3 positive floats")
        object.__setattr__(self, "coeffs", a)
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))

    @property
    def symmetric(self) -> bool:
        return bool(np.all(self.center == 0.0))

    @cached_property
    def form(self) -> np.ndarray:
        """Matrix Q with body ``(x-c)^T Q (x-c) <= 1``."""
        R = self.rotation.matrix
        return R @ np.diag(self.coeffs) @ R.T

    def support(self, u):
        U, single = _rows(u)
        _nonzero(U)
        Y = U @ self.rotation.matrix
        vals = np.sqrt(np.einsum("ij,j,ij->i", Y, 1.0 / self.coeffs, Y)) + U @ self.center
        return _out(vals, single)

    def gauge(self, x):
        if not self.symmetric:
            raise BodyError("gauge needs a body centred at the origin")
        X, single = _rows(x)
        Y = X @ self.rotation.matrix
        return _out(np.sqrt(np.einsum("ij,j,ij->i", Y, self.coeffs, Y)), single)


@dataclass(frozen=True, eq=False)
class PointCloudBody:
    """Convex hull of a point cloud, optionally symmetrized to ``conv{+-p}``.

    ``gauge_method`` selects how the Minkowski gauge is evaluated: ``"lp"``
    solves a linear program per query; ``"facets"`` evaluates the hull's
    facet inequalities, which is exact and much faster for repeated calls.
    """

    points: np.ndarray
    symmetrize: bool = True
    gauge_method: str = "lp"

    def __post_init__(self):
        P = np.asarray(self.points, dtype=float)
        if P.ndim != 2 or P.shape[1] != 3 or not np.all(np.isfinite(P)):
            raise BodyError("points must be an (n, 3) array of finite floats")
        if self.gauge_method not in ("lp", "facets"):
            raise BodyError(f"unknown gauge method {self.gauge_method!r}")
        object.__setattr__(self, "points", P)
        V = np.vstack([P, -P]) if self.symmetrize else P
        if len(V) < 4 or np.linalg.matrix_rank(V - V.mean(axis=0), tol=1e-12) < 3:
            raise BodyError("point cloud must span 3-space")

    @property
    def symmetric(self) -> bool:
        return self.symmetrize

    @cached_property
    def generators(self) -> np.ndarray:
        return np.vstack([self.points, -self.points]) if self.symmetrize else self.points

    def support(self, u):
        U, single = _rows(u)
        _nonzero(U)
        return _out((U @ self.generators.T).max(axis=1), single)

    @cached_property
    def _facets(self):
        hull = ConvexHull(self.generators)
        normals = hull.equations[:, :3]
        offsets = -hull.equations[:, 3]
        if np.any(offsets <= 1e-12):
            raise BodyError("origin is not interior to the body")
        return normals / offsets[:, None]

    def _gauge_lp(self, x):
        G = self.generators
        n = len(G)
        # x = G^T w, w >= 0, minimize sum(w)
        res = linprog(np.ones(n), A_eq=G.T, b_eq=x, bounds=(0, None), method="highs")
        if res.status != 0:
            raise BodyError("gauge LP failed: " + res.message)
        return res.fun

    def gauge(self, x):
        if not self.symmetrize:
            raise BodyError("gauge needs a centrally symmetric body (set symmetrize=True)")
        X, single = _rows(x)
        if self.gauge_method == "facets":
            vals = np.maximum((X @ self._facets.T).max(axis=1), 0.0)
        else:
            vals = np.array([0.0 if not np.any(r) else self._gauge_lp(r) for r in X])
        return _out(vals, single)


@dataclass(frozen=True, eq=False)
class GeneralSet:
    """A finite, not necessarily symmetric, point set."""

    points: np.ndarray

    def __post_init__(self):
        P = np.atleast_2d(np.asarray(self.points, dtype=float))
        if P.size == 0 or P.ndim != 2 or P.shape[1] != 3 or not np.all(np.isfinite(P)):
            raise BodyError("set must be a nonempty (n, 3) array of finite floats")
        object.__setattr__(self, "points", P)

    symmetric = False

    def support(self, u):
        U, single = _rows(u)
        _nonzero(U)
        return _out((U @ self.points.T).max(axis=1), single)


def support(body, u):
    """Support function h(u) = max over the body of <x, u>."""
    return body.support(u)


def gauge(body, x):
    """Minkowski gauge: smallest lambda >= 0 with x in lambda * body."""
    if not hasattr(body, "gauge"):
        raise BodyError(f"{type(body).__name__} has no gauge")
    return body.gauge(x)


def odd_width(body, u):
    """Mid-plane offset (h(u) - h(-u)) / 2, odd in u by construction."""
    U, single = _rows(u)
    _nonzero(U)
    h = body.support(np.vstack([U, -U]))
    n = len(U)
    return _out(0.5 * (h[:n] - h[n:]), single)


def diameter(points) -> float:
    """Largest pairwise Euclidean distance, by brute force."""
    if isinstance(points, (GeneralSet, PointCloudBody)):
        points = points.points
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if len(P) == 0:
        raise BodyError("diameter of an empty set")
    best = 0.0
    # row blocks keep memory bounded for large N
    for i in range(0, len(P), 1024):
        d = np.linalg.norm(P[i:i + 1024, None, :] - P[None, :, :], axis=2)
        best = max(best, float(d.max()))
    return best


def body_from_dict(doc: dict):
    """Build a body from a parsed body-specification document."""
    if not isinstance(doc, dict) or "type" not in doc:
        raise BodyError("body document needs a 'type' field")
    kind = doc["type"]
    if kind == "ellipsoid":
        if "coeffs" not in doc:
            raise BodyError("ellipsoid needs 'coeffs'")
        return Ellipsoid(np.asarray(doc["coeffs"], dtype=float))
    if kind in ("pointcloud", "set"):
        if "points" not in doc:
            raise BodyError(f"{kind} needs 'points'")
        pts = np.asarray(doc["points"], dtype=float)
        if kind == "set":
            return GeneralSet(pts)
        return PointCloudBody(pts, symmetrize=bool(doc.get("symmetrize", True)))
    raise BodyError(f"unknown body type {kind!r}")
