"""Rotating a box template until an even function agrees on its vertices.

For an even function F on the sphere and a box template with face
``v_1..v_4``, the solver looks for rotations A with
``F(A v_1) = ... = F(A v_4)``. With F the gauge of a symmetric body this
inscribes a copy of the box in the body, centred at the origin.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import descent
from .bodies import BodyError
from .rotations import Rotation
from .templates import BoxTemplate, symmetry_group

# orthonormal basis of the complement of the diagonal (1, 1, 1, 1)
DIAG_COMPLEMENT = 0.5 * np.array([
    [1.0, 1.0, -1.0, -1.0],
    [1.0, -1.0, 1.0, -1.0],
    [1.0, -1.0, -1.0, 1.0],
])


@dataclass
class SolverConfig:
    starts: int = 256
    seed: int = 0
    tol: float = 1e-10
    max_iter: int = 100
    radius: float = 1e-3


@dataclass
class KnasterSolution:
    A: Rotation
    values: np.ndarray
    residual: float
    lam: float
    size: int = 1


@dataclass
class KnasterSearch:
    """Clusters found by :func:`solve_knaster` plus run diagnostics."""

    clusters: list
    starts: int
    converged: int
    degenerate: bool
    iterations: list = field(repr=False, default_factory=list)

    def __len__(self):
        return len(self.clusters)

    def __iter__(self):
        return iter(self.clusters)

    def __getitem__(self, i):
        return self.clusters[i]


@dataclass
class InscribedBox:
    vertices: np.ndarray
    template: BoxTemplate
    A: Rotation
    lam: float
    residual: float = 0.0
    degenerate: bool = False


class NoSolutionError(RuntimeError):
    """No start converged; carries the search diagnostics."""

    def __init__(self, msg, search=None):
        super().__init__(msg)
        self.search = search


def knaster_values(F: Callable, t: BoxTemplate, A) -> np.ndarray:
    """F at the rotated face vertices A v_1..A v_4."""
    M = A.matrix if isinstance(A, Rotation) else np.asarray(A)
    vals = np.asarray(F(t.v @ M.T), dtype=float)
    if vals.shape != (4,) or not np.all(np.isfinite(vals)):
        raise ValueError("F must return 4 finite values for 4 directions")
    return vals


def knaster_residual(F: Callable, t: BoxTemplate, A) -> np.ndarray:
    """Projection of (F(A v_i))_i onto the complement of the diagonal."""
    return DIAG_COMPLEMENT @ knaster_values(F, t, A)


def _solution(F, t, R, size=1):
    vals = knaster_values(F, t, R)
    res = float(np.linalg.norm(vals - vals.mean()))
    return KnasterSolution(A=R, values=vals, residual=res, lam=float(vals.mean()), size=size)


def solve_knaster(F: Callable, t: BoxTemplate, config: SolverConfig | None = None,
                  initial=None) -> KnasterSearch:
    """Multistart search for rotations equalizing F on the template face.

    Solutions are clustered modulo the template's rotation group and sorted
    by (residual, canonical quaternion).
    """
    cfg = config or SolverConfig()
    if cfg.starts < 1 and not initial:
        raise ValueError("config.starts must be >= 1")
    G = symmetry_group(t)
    V = t.v

    def residual(M):
        vals = np.asarray(F(V @ M.T), dtype=float)
        return DIAG_COMPLEMENT @ vals

    s = descent.multistart(residual, G, starts=cfg.starts, seed=cfg.seed, tol=cfg.tol,
                           max_iter=cfg.max_iter, radius=cfg.radius, initial=initial)
    clusters = [_solution(F, t, c.rotation, c.size) for c in s.clusters]
    clusters.sort(key=lambda c: (c.residual, tuple(c.A.q)))
    return KnasterSearch(clusters=clusters, starts=s.starts, converged=s.converged,
                         degenerate=s.degenerate, iterations=s.iterations)


def _gauge_function(body):
    if not getattr(body, "symmetric", False) or not hasattr(body, "gauge"):
        raise BodyError("inscription needs a centrally symmetric body with the origin inside")
    return body.gauge


def inscribe_box(body, t: BoxTemplate, config: SolverConfig | None = None) -> InscribedBox:
    """Box similar to ``t`` with all 8 vertices on the boundary of ``body``."""
    F = _gauge_function(body)
    search = solve_knaster(F, t, config)
    if not search.clusters:
        raise NoSolutionError(
            f"no start converged ({search.starts} starts, max "
            f"{max(search.iterations, default=0)} iterations)", search)
    best = search.clusters[0]
    face = t.v @ best.A.matrix.T / best.lam
    return InscribedBox(vertices=np.vstack([face, -face]), template=t, A=best.A,
                        lam=best.lam, residual=best.residual, degenerate=search.degenerate)


def inscribe_in_surface(g: Callable, t: BoxTemplate,
                        config: SolverConfig | None = None) -> InscribedBox:
    """Box with vertices on the star-shaped surface {g(u) u : u in S^2}.

    ``g`` must be even and positive; vertex i is ``g(A v_i) A v_i``.
    """
    def F(U):
        vals = np.asarray(g(U), dtype=float)
        if np.any(vals <= 0):
            raise ValueError("surface radial function must be positive")
        return vals

    search = solve_knaster(F, t, config)
    if not search.clusters:
        raise NoSolutionError("no start converged", search)
    best = search.clusters[0]
    dirs = t.v @ best.A.matrix.T
    face = dirs * best.lam
    return InscribedBox(vertices=np.vstack([face, -face]), template=t, A=best.A,
                        lam=1.0 / best.lam, residual=best.residual, degenerate=search.degenerate)
