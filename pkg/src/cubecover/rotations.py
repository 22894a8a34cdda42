"""Rotations of 3-space stored as unit quaternions.

Quaternions are kept in ``(w, x, y, z)`` order and canonicalized so the
first nonzero component is positive; the 3x3 matrix is derived lazily.
Tangent vectors at the identity are given by the three upper-triangular
entries ``(a12, a13, a23)`` of a skew-symmetric matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

_CANON_EPS = 1e-15


def _canonical(q):
    q = np.asarray(q, dtype=float)
    n = np.linalg.norm(q)
    if not np.isfinite(n) or n < 1e-300:
        raise ValueError("quaternion must be finite and nonzero")
    q = q / n
    for c in q:
        if abs(c) > _CANON_EPS:
            if c < 0:
                q = -q
            break
    return q


def quat_mul(p, q):
    """Hamilton product of two quaternions in (w, x, y, z) order."""
    pw, px, py, pz = p
    qw, qx, qy, qz = q
    return np.array([
        pw * qw - px * qx - py * qy - pz * qz,
        pw * qx + px * qw + py * qz - pz * qy,
        pw * qy - px * qz + py * qw + pz * qx,
        pw * qz + px * qy - py * qx + pz * qw,
    ])


def quat_to_matrix(q):
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def matrix_to_quat(M):
    """Shepperd's method; picks the best-conditioned pivot."""
    M = np.asarray(M, dtype=float)
    tr = np.trace(M)
    diag = np.diag(M)
    k = int(np.argmax(np.r_[tr, diag]))
    if k == 0:
        s = 2.0 * np.sqrt(max(1.0 + tr, 0.0))
        q = [0.25 * s, (M[2, 1] - M[1, 2]) / s, (M[0, 2] - M[2, 0]) / s,
             (M[1, 0] - M[0, 1]) / s]
    elif k == 1:
        s = 2.0 * np.sqrt(max(1.0 + M[0, 0] - M[1, 1] - M[2, 2], 0.0))
        q = [(M[2, 1] - M[1, 2]) / s, 0.25 * s, (M[0, 1] + M[1, 0]) / s,
             (M[0, 2] + M[2, 0]) / s]
    elif k == 2:
        s = 2.0 * np.sqrt(max(1.0 - M[0, 0] + M[1, 1] - M[2, 2], 0.0))
        q = [(M[0, 2] - M[2, 0]) / s, (M[0, 1] + M[1, 0]) / s, 0.25 * s,
             (M[1, 2] + M[2, 1]) / s]
    else:
        s = 2.0 * np.sqrt(max(1.0 - M[0, 0] - M[1, 1] + M[2, 2], 0.0))
        q = [(M[1, 0] - M[0, 1]) / s, (M[0, 2] + M[2, 0]) / s,
             (M[1, 2] + M[2, 1]) / s, 0.25 * s]
    return np.array(q)


@dataclass(frozen=True, eq=False)
class Rotation:
    """Element of SO(3).

    Parameters
    ----------
    q : array_like, shape (4,)
        Quaternion in (w, x, y, z) order. It is normalized and its sign
        canonicalized on construction.
    """

    q: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", _canonical(self.q))

    @classmethod
    def identity(cls) -> Rotation:
        return cls(np.array([1.0, 0.0, 0.0, 0.0]))

    @classmethod
    def from_matrix(cls, M) -> Rotation:
        M = np.asarray(M, dtype=float)
        if M.shape != (3, 3):
            raise ValueError("expected a 3x3 matrix")
        if abs(np.linalg.det(M) - 1.0) > 1e-6 or not np.allclose(M.T @ M, np.eye(3), atol=1e-6):
            raise ValueError("matrix is not special orthogonal")
        return cls(matrix_to_quat(M))

    @classmethod
    def from_axis_angle(cls, axis, angle: float) -> Rotation:
        axis = np.asarray(axis, dtype=float)
        axis = axis / np.linalg.norm(axis)
        return cls(np.r_[np.cos(angle / 2), np.sin(angle / 2) * axis])

    @cached_property
    def matrix(self) -> np.ndarray:
        return quat_to_matrix(self.q)

    def __matmul__(self, other):
        if isinstance(other, Rotation):
            return Rotation(quat_mul(self.q, other.q))
        return apply(self, other)

    def inv(self) -> Rotation:
        return Rotation(self.q * np.array([1.0, -1.0, -1.0, -1.0]))

    def angle(self) -> float:
        """Rotation angle in [0, pi]."""
        return 2.0 * np.arctan2(np.linalg.norm(self.q[1:]), abs(self.q[0]))

    def __repr__(self):
        return f"Rotation(q={np.array2string(self.q, precision=6)})"


def skew(t) -> np.ndarray:
    """Skew-symmetric matrix with upper entries (a12, a13, a23)."""
    a12, a13, a23 = t
    return np.array([[0.0, a12, a13], [-a12, 0.0, a23], [-a13, -a23, 0.0]])


def _axis_vector(t):
    # S v = w x v for w = (-a23, a13, -a12)
    a12, a13, a23 = t
    return np.array([-a23, a13, -a12], dtype=float)


def _tangent_from_axis(w):
    return np.array([-w[2], w[1], -w[0]])


def exp(t: Sequence[float]) -> Rotation:
    """Matrix exponential of the skew matrix with entries ``t``."""
    t = np.asarray(t, dtype=float)
    if t.shape != (3,) or not np.all(np.isfinite(t)):
        raise ValueError("tangent vector must be 3 finite floats")
    w = _axis_vector(t)
    theta = np.linalg.norm(w)
    half = 0.5 * theta
    # sin(half)/theta, stable near 0
    k = 0.5 * np.sinc(half / np.pi)
    return Rotation(np.r_[np.cos(half), k * w])


def log(R: Rotation) -> np.ndarray:
    """Inverse of :func:`exp` on rotation angles below pi."""
    w0 = R.q[0]
    v = R.q[1:]
    s = np.linalg.norm(v)
    theta = 2.0 * np.arctan2(s, w0)
    if s < 1e-300:
        return np.zeros(3)
    return _tangent_from_axis(theta * v / s)


def apply(R: Rotation, v) -> np.ndarray:
    """Rotate a vector, or each row of an (n, 3) array."""
    v = np.asarray(v, dtype=float)
    return v @ R.matrix.T


def sample_uniform(rng: np.random.Generator) -> Rotation:
    """Haar-uniform rotation from a normalized Gaussian quaternion."""
    while True:
        q = rng.standard_normal(4)
        if np.linalg.norm(q) > 1e-8:
            return Rotation(q)


def geodesic_distance(R1: Rotation, R2: Rotation) -> float:
    """Angle of R1^-1 R2, in [0, pi]."""
    return (R1.inv() @ R2).angle()


def _quat_array(G):
    return np.array([g.q for g in G])


def check_closed(G: Sequence[Rotation], atol: float = 1e-9) -> None:
    """Raise ValueError unless G is closed under composition within ``atol`` radians."""
    if len(G) == 0:
        raise ValueError("symmetry group must be nonempty")
    Q = _quat_array(G)
    for g in G:
        prods = np.array([quat_mul(g.q, h) for h in Q])
        # chord length min(|p - q|, |p + q|) is half the angle for small angles
        minus = np.linalg.norm(prods[:, None, :] - Q[None, :, :], axis=2)
        plus = np.linalg.norm(prods[:, None, :] + Q[None, :, :], axis=2)
        chord = np.minimum(minus, plus).min(axis=1)
        if np.any(chord > 0.5 * atol):
            raise ValueError("rotation set is not closed under composition")


def quotient_distance(R1: Rotation, R2: Rotation, G: Sequence[Rotation],
                      check: bool = True) -> float:
    """Geodesic distance between the cosets R1 G and R2 G.

    Returns min over g in G of the angle between R1 and R2 g.
    """
    if check:
        check_closed(G)
    rel = (R1.inv() @ R2).q
    best = np.inf
    for g in G:
        p = quat_mul(rel, g.q)
        best = min(best, 2.0 * np.arctan2(np.linalg.norm(p[1:]), abs(p[0])))
    return float(best)


def coset_representative(R: Rotation, G: Sequence[Rotation]) -> Rotation:
    """Element of R G closest to the identity; ties broken lexicographically."""
    cands = [R @ g for g in G]
    cands.sort(key=lambda c: (-round(c.q[0], 12), *np.round(c.q[1:], 12)))
    return cands[0]
