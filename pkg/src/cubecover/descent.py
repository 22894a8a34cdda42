"""Multistart Levenberg-Marquardt descent over SO(3) and solution clustering.

Residuals are functions of a 3x3 rotation matrix. Each iteration re-centres
the exponential chart at the current iterate (``A -> A exp(S(t))``) and
forms a central finite-difference Jacobian in the chart coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .rotations import Rotation, coset_representative, sample_uniform

FD_STEP = 1e-6
MAX_STEP = 0.5


def expm_skew(t) -> np.ndarray:
    """Rodrigues formula for exp(S(t)), S with upper entries (a12, a13, a23)."""
    a12, a13, a23 = t
    w = np.array([-a23, a13, -a12])
    th = np.sqrt(w @ w)
    K = np.array([[0.0, a12, a13], [-a12, 0.0, a23], [-a13, -a23, 0.0]])
    if th < 1e-8:
        return np.eye(3) + K + 0.5 * K @ K
    return np.eye(3) + (np.sin(th) / th) * K + ((1 - np.cos(th)) / th ** 2) * K @ K


def fd_jacobian(residual: Callable, A: np.ndarray, h: float = FD_STEP) -> np.ndarray:
    """Central-difference Jacobian of ``residual(A exp(S(t)))`` at t = 0."""
    cols = []
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        rp = np.asarray(residual(A @ expm_skew(e)))
        rm = np.asarray(residual(A @ expm_skew(-e)))
        cols.append((rp - rm) / (2 * h))
    return np.column_stack(cols)


@dataclass
class Descent:
    A: np.ndarray
    r: np.ndarray
    norm: float
    iterations: int
    evaluations: int


def refine(residual: Callable, A0: np.ndarray, *, target: float = 1e-14,
           max_iter: int = 100, h: float = FD_STEP) -> Descent:
    """Damped Gauss-Newton from ``A0`` until ``|r| < target`` or stagnation."""
    A = np.array(A0, dtype=float)
    r = np.asarray(residual(A), dtype=float)
    if not np.all(np.isfinite(r)):
        raise ValueError("residual returned a non-finite value")
    nr = float(np.linalg.norm(r))
    evals = 1
    mu = None
    it = 0
    for it in range(1, max_iter + 1):
        if nr < target:
            it -= 1
            break
        J = fd_jacobian(residual, A, h)
        evals += 6
        H = J.T @ J
        g = J.T @ r
        scale = float(np.max(np.diag(H)))
        if scale == 0.0:
            break
        if mu is None:
            mu = 1e-4 * scale
        accepted = False
        for _ in range(30):
            step = np.linalg.solve(H + mu * np.eye(3), -g)
            sn = np.linalg.norm(step)
            if sn > MAX_STEP:
                step *= MAX_STEP / sn
            An = A @ expm_skew(step)
            rn = np.asarray(residual(An), dtype=float)
            evals += 1
            nn = float(np.linalg.norm(rn))
            if np.isfinite(nn) and nn < nr:
                A, r, nr = An, rn, nn
                mu = max(mu / 3.0, 1e-15 * scale)
                accepted = True
                break
            mu *= 4.0
        if not accepted:
            break
    # re-orthonormalize accumulated products
    U, _, Vt = np.linalg.svd(A)
    A = U @ Vt
    r = np.asarray(residual(A), dtype=float)
    return Descent(A=A, r=r, norm=float(np.linalg.norm(r)), iterations=it, evaluations=evals + 1)


def _qmul(p, q):
    pw, px, py, pz = np.moveaxis(p, -1, 0)
    qw, qx, qy, qz = np.moveaxis(q, -1, 0)
    return np.stack([
        pw * qw - px * qx - py * qy - pz * qz,
        pw * qx + px * qw + py * qz - pz * qy,
        pw * qy - px * qz + py * qw + pz * qx,
        pw * qz + px * qy - py * qx + pz * qw,
    ], axis=-1)


def coset_distances(R: Rotation, others: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Quotient distances from R to each quaternion row of ``others`` modulo G."""
    conj = R.q * np.array([1.0, -1.0, -1.0, -1.0])
    prod = _qmul(conj, _qmul(others[:, None, :], G[None, :, :]))
    ang = 2.0 * np.arctan2(np.linalg.norm(prod[..., 1:], axis=-1), np.abs(prod[..., 0]))
    return ang.min(axis=1)


@dataclass
class Cluster:
    rotation: Rotation
    residual: float
    r: np.ndarray
    size: int
    span: float
    singular: bool
    members: list = field(default_factory=list, repr=False)


@dataclass
class Search:
    clusters: list
    starts: int
    converged: int
    degenerate: bool
    iterations: list
    evaluations: int

    def __len__(self):
        return len(self.clusters)

    def __iter__(self):
        return iter(self.clusters)

    def __getitem__(self, i):
        return self.clusters[i]


def multistart(residual: Callable, G: Sequence[Rotation], *, starts: int = 64,
               seed: int = 0, tol: float = 1e-10, max_iter: int = 100,
               radius: float = 1e-3, initial: Sequence[Rotation] | None = None) -> Search:
    """Run ``starts`` independent descents and cluster converged ones modulo G.

    ``initial`` overrides the random starting rotations.
    """
    if starts < 1 and not initial:
        raise ValueError("need at least one start")
    if tol <= 0:
        raise ValueError("tol must be positive")
    rng = np.random.default_rng(seed)
    inits = list(initial) if initial else [sample_uniform(rng) for _ in range(starts)]
    sols = []
    iters = []
    evals = 0
    for R0 in inits:
        d = refine(residual, R0.matrix, max_iter=max_iter)
        iters.append(d.iterations)
        evals += d.evaluations
        if d.norm < tol:
            sols.append((d.norm, Rotation.from_matrix(d.A), d.r))
    # deterministic merge order
    sols.sort(key=lambda s: (s[0], tuple(s[1].q)))
    Gq = np.array([g.q for g in G])
    groups = []
    for norm, R, r in sols:
        if groups:
            reps = np.array([grp[0][1].q for grp in groups])
            dist = coset_distances(R, reps, Gq)
            k = int(np.argmin(dist))
            if dist[k] < radius:
                groups[k].append((norm, R, r))
                continue
        groups.append([(norm, R, r)])
    clusters = []
    for grp in groups:
        norm, R, r = grp[0]
        qs = np.array([m[1].q for m in grp])
        span = float(coset_distances(R, qs, Gq).max())
        J = fd_jacobian(residual, R.matrix)
        sv = np.linalg.svd(J, compute_uv=False)
        singular = bool(sv[0] < 1e-12 or sv[-1] < 1e-6 * sv[0])
        clusters.append(Cluster(rotation=coset_representative(R, G), residual=norm, r=r,
                                size=len(grp), span=span, singular=singular,
                                members=[m[1] for m in grp]))
    degenerate = False
    if clusters and len(sols) > 0.5 * len(inits):
        n_sing = sum(c.singular for c in clusters)
        if any(c.span > 10 * radius for c in clusters) or n_sing > 0.5 * len(clusters):
            degenerate = True
    if degenerate:
        best = clusters[0]
        best.size = len(sols)
        clusters = [best]
    clusters.sort(key=lambda c: (c.residual, tuple(c.rotation.q)))
    return Search(clusters=clusters, starts=len(inits), converged=len(sols),
                  degenerate=degenerate, iterations=iters, evaluations=evals)
