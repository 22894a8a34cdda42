"""Box vertex templates inscribed in the unit sphere."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .rotations import Rotation


@dataclass(frozen=True, eq=False)
class BoxTemplate:
    """One face ``v`` (4 unit vectors, cyclic order) of a box inscribed in S^2.

    The box is ``{+-v_i}``. ``ratios`` are the sorted half-edge lengths up to
    scale and ``kind`` is one of ``"cube"``, ``"square-based"``, ``"general"``.
    """

    v: np.ndarray
    ratios: tuple
    kind: str

    @property
    def vertices(self) -> np.ndarray:
        """All 8 vertices: the face followed by its negation."""
        return np.vstack([self.v, -self.v])

    @property
    def half_edges(self) -> np.ndarray:
        """Half-edge lengths along x, y, z of the unit-sphere box."""
        return np.abs(self.v[0])


def _kind(a):
    distinct = len(set(a))
    return {1: "cube", 2: "square-based", 3: "general"}[distinct]


def make_template(a1: float, a2: float, a3: float) -> BoxTemplate:
    """Axis-aligned box with half-edges proportional to (a1, a2, a3).

    The face z > 0 is listed counter-clockwise starting at (+, +, +).
    """
    a = np.array([a1, a2, a3], dtype=float)
    if not np.all(np.isfinite(a)) or np.any(a <= 0):
        raise ValueError("box ratios must be positive")
    if not (a1 <= a2 <= a3):
        raise ValueError("box ratios must satisfy a1 <= a2 <= a3")
    signs = np.array([[1, 1, 1], [-1, 1, 1], [-1, -1, 1], [1, -1, 1]], dtype=float)
    v = signs * a / np.linalg.norm(a)
    return BoxTemplate(v=v, ratios=(float(a1), float(a2), float(a3)), kind=_kind((a1, a2, a3)))


def parse_template(text: str) -> BoxTemplate:
    """Parse ``cube``, ``sq:rho`` or ``box:a1,a2,a3``.

    ``rho`` is the ratio of the height to the edge of the square base.
    """
    text = text.strip()
    if text == "cube":
        return make_template(1.0, 1.0, 1.0)
    if text.startswith("sq:"):
        rho = float(text[3:])
        return make_template(*sorted((1.0, 1.0, rho)))
    if text.startswith("box:"):
        vals = [float(s) for s in text[4:].split(",")]
        if len(vals) != 3:
            raise ValueError("box template needs three edge lengths")
        return make_template(*sorted(vals))
    raise ValueError(f"unrecognized template {text!r}")


def signed_permutation_rotations() -> list[np.ndarray]:
    """The 24 signed permutation matrices with determinant +1."""
    mats = []
    for perm in itertools.permutations(range(3)):
        for signs in itertools.product((1.0, -1.0), repeat=3):
            M = np.zeros((3, 3))
            for row, col in enumerate(perm):
                M[row, col] = signs[row]
            if np.linalg.det(M) > 0:
                mats.append(M)
    return mats


def symmetry_group(t: BoxTemplate) -> list[Rotation]:
    """Rotations mapping the vertex set {+-v_i} onto itself."""
    verts = t.vertices
    group = []
    for M in signed_permutation_rotations():
        img = verts @ M.T
        d = np.linalg.norm(img[:, None, :] - verts[None, :, :], axis=2)
        if np.all(d.min(axis=1) < 1e-10):
            group.append(Rotation.from_matrix(M))
    return group
