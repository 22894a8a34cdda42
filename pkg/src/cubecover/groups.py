"""S4 and its actions on SO(3), R^3, R^4 and R^6.

The four letters label the vertices of the regular tetrahedron

    t_1 = (1, 1, 1), t_2 = (1, -1, -1), t_3 = (-1, -1, 1), t_4 = (-1, 1, -1)

(up to scale), one on each diagonal of the cube ``[-1, 1]^3``. With this
labelling the cube template face ``v_k = (-1)^(k+1) t_k / sqrt(3)`` lies on
diagonal k, so permuting the diagonals permutes the template coordinates.
Permutations act on 0-based letters internally and print 1-based.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .rotations import Rotation, sample_uniform

TETRA = np.array([[1, 1, 1], [1, -1, -1], [-1, -1, 1], [-1, 1, -1]], dtype=float)
# unit-edge tetrahedron centred at the origin
UNIT_TETRA = TETRA / (2.0 * np.sqrt(2.0))
PAIRS = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


@dataclass(frozen=True)
class Permutation:
    """Bijection of {0, 1, 2, 3}; ``images[i]`` is the image of letter i."""

    images: tuple

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError(f"not a permutation: {self.images}")

    @classmethod
    def identity(cls, n: int = 4) -> Permutation:
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, text: str, n: int = 4) -> Permutation:
        """Parse 1-based cycle notation such as ``"(12)(34)"`` or ``"()"``."""
        img = list(range(n))
        for cyc in text.replace(" ", "").strip("()").split(")("):
            if not cyc:
                continue
            letters = [int(c) - 1 for c in cyc]
            for a, b in zip(letters, letters[1:] + letters[:1]):
                img[a] = b
        return cls(tuple(img))

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: Permutation) -> Permutation:
        """Composition: (self * other)(i) = self(other(i))."""
        return Permutation(tuple(self.images[j] for j in other.images))

    def inverse(self) -> Permutation:
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    @property
    def sign(self) -> int:
        s = 1
        seen = set()
        for i in range(len(self.images)):
            if i in seen:
                continue
            j, length = i, 0
            while j not in seen:
                seen.add(j)
                j = self.images[j]
                length += 1
            if length % 2 == 0:
                s = -s
        return s

    @property
    def parity(self) -> str:
        return "even" if self.sign > 0 else "odd"

    def cycles(self) -> str:
        out, seen = [], set()
        for i in range(len(self.images)):
            if i in seen or self.images[i] == i:
                continue
            cyc, j = [], i
            while j not in seen:
                seen.add(j)
                cyc.append(str(j + 1))
                j = self.images[j]
            out.append("(" + "".join(cyc) + ")")
        return "".join(out) or "()"

    def __repr__(self):
        return f"Permutation{self.cycles()}"


@lru_cache(maxsize=None)
def all_permutations() -> tuple:
    return tuple(Permutation(p) for p in itertools.permutations(range(4)))


def tetra_action(sigma: Permutation) -> np.ndarray:
    """Orthogonal map sending tetrahedron vertex t_i to t_sigma(i)."""
    target = TETRA[list(sigma.images)]
    # sum_i t_i t_i^T = 4 I for the unnormalized vertices
    return target.T @ TETRA / 4.0


def iota(sigma: Permutation) -> Rotation:
    """The rotation of the cube permuting its diagonals as sigma."""
    return Rotation.from_matrix(sigma.sign * tetra_action(sigma))


def tau_tilde(sigma: Permutation) -> np.ndarray:
    """Coordinate permutation on R^4: e_k -> e_sigma(k)."""
    P = np.zeros((4, 4))
    for k in range(4):
        P[sigma(k), k] = 1.0
    return P


def _pair_index(i, j):
    if i < j:
        return PAIRS.index((i, j)), 1.0
    return PAIRS.index((j, i)), -1.0


def tau6(sigma: Permutation) -> np.ndarray:
    """Signed action on R^6 with basis e12, e13, e14, e23, e24, e34.

    e_ij -> sign(sigma) e_sigma(i)sigma(j), where e_ji = -e_ij.
    """
    M = np.zeros((6, 6))
    for col, (i, j) in enumerate(PAIRS):
        row, s = _pair_index(sigma(i), sigma(j))
        M[row, col] = sigma.sign * s
    return M


@dataclass(frozen=True)
class SignedPermAction:
    """A representation of S4 by orthogonal matrices of size ``dim``."""

    name: str
    dim: int
    fn: Callable

    def matrix(self, sigma: Permutation) -> np.ndarray:
        return self.fn(sigma)

    def __call__(self, sigma: Permutation) -> np.ndarray:
        return self.fn(sigma)

    def homomorphism_defect(self) -> float:
        perms = all_permutations()
        mats = {p: self.fn(p) for p in perms}
        return max(float(np.abs(mats[a * b] - mats[a] @ mats[b]).max())
                   for a in perms for b in perms)


TETRA_ACTION = SignedPermAction("tau", 3, tetra_action)
TAU_TILDE = SignedPermAction("tau_tilde", 4, tau_tilde)
TAU6 = SignedPermAction("tau6", 6, tau6)


def cube_rotations() -> list[Rotation]:
    return [iota(p) for p in all_permutations()]


def iota_defect() -> float:
    """Max entrywise |iota(ab) - iota(a) iota(b)| over all 576 pairs."""
    perms = all_permutations()
    mats = {p: iota(p).matrix for p in perms}
    return max(float(np.abs(mats[a * b] - mats[a] @ mats[b]).max())
               for a in perms for b in perms)


# -- subgroups --------------------------------------------------------------

def _closure(gens) -> frozenset:
    elems = {Permutation.identity()}
    frontier = list(elems)
    while frontier:
        new = []
        for a in frontier:
            for g in gens:
                b = a * g
                if b not in elems:
                    elems.add(b)
                    new.append(b)
        frontier = new
    return frozenset(elems)


@lru_cache(maxsize=None)
def all_subgroups() -> tuple:
    """Every subgroup of S4, as frozensets, from closures of generator pairs."""
    perms = all_permutations()
    subs = {_closure(())}
    for a, b in itertools.combinations_with_replacement(perms, 2):
        subs.add(_closure((a, b)))
    return tuple(sorted(subs, key=lambda H: (len(H), sorted(p.images for p in H))))


def _label(H) -> str:
    n = len(H)
    orders = []
    for p in H:
        k, q = 1, p
        while q != Permutation.identity():
            q, k = q * p, k + 1
        orders.append(k)
    if n == 24:
        return "S4"
    if n == 12:
        return "A4"
    if n in (1, 2, 3) or max(orders) == n:
        return f"C{n}"
    return f"D{n // 2}"


def _generators(H) -> list:
    gens = []
    for p in sorted(H, key=lambda p: (p == Permutation.identity(), p.images)):
        if p == Permutation.identity():
            continue
        if _closure(tuple(gens)) == H:
            break
        if p not in _closure(tuple(gens)):
            gens.append(p)
    return gens


@dataclass(frozen=True)
class SubgroupClass:
    label: str
    order: int
    generators: tuple
    size: int  # number of conjugate subgroups
    elements: frozenset

    def describe(self) -> str:
        gens = ",".join(g.cycles() for g in self.generators) or "()"
        return f"{self.label:<3} order {self.order:>2}  [{gens}]  ({self.size} conjugates)"


def subgroup_classes() -> list[SubgroupClass]:
    """Conjugacy classes of subgroups of S4, smallest order first."""
    perms = all_permutations()
    remaining = list(all_subgroups())
    classes = []
    while remaining:
        H = remaining[0]
        conj = {frozenset(g * h * g.inverse() for h in H) for g in perms}
        remaining = [K for K in remaining if K not in conj]
        classes.append(SubgroupClass(label=_label(H), order=len(H),
                                     generators=tuple(_generators(H)),
                                     size=len(conj), elements=H))
    return classes


def subgroup(generators) -> frozenset:
    """Subgroup generated by permutations or cycle strings."""
    gens = [Permutation.from_cycles(g) if isinstance(g, str) else g for g in generators]
    return _closure(tuple(gens))


def stabilizer(letter: int) -> frozenset:
    """Permutations fixing a 0-based letter."""
    return frozenset(p for p in all_permutations() if p(letter) == letter)


# -- invariant subspaces of tau6 ---------------------------------------------

def _e(i, j):
    v = np.zeros(6)
    k, s = _pair_index(i, j)
    v[k] = s
    return v


def v_generators() -> np.ndarray:
    """Rows e_i1 + e_i2 + ... over the three letters other than i."""
    return np.array([sum(_e(i, j) for j in range(4) if j != i) for i in range(4)])


def w_generators() -> np.ndarray:
    """The four 3-cycles e23+e34+e42, e31+e14+e43, e12+e24+e41, e21+e13+e32."""
    cycles = [(1, 2, 3), (2, 0, 3), (0, 1, 3), (1, 0, 2)]
    return np.array([_e(a, b) + _e(b, c) + _e(c, a) for a, b, c in cycles])


def _orthonormal_rows(rows):
    q, _ = np.linalg.qr(rows[:3].T)
    return q.T


def vw_decomposition():
    """Orthonormal bases (3x6 each) of the invariant subspaces V and W."""
    return _orthonormal_rows(v_generators()), _orthonormal_rows(w_generators())


def w_permutation(sigma: Permutation):
    """Index map and signs with tau6(sigma) w_k = s_k w_m(k)."""
    Wg = w_generators()
    M = tau6(sigma)
    idx, signs = [], []
    for k in range(4):
        img = M @ Wg[k]
        for m in range(4):
            for s in (1.0, -1.0):
                if np.allclose(img, s * Wg[m], atol=1e-12):
                    idx.append(m)
                    signs.append(s)
    if len(idx) != 4:
        raise ArithmeticError("tau6 does not permute the W generators")
    return tuple(idx), tuple(signs)


# -- fixed points -------------------------------------------------------------

def fixed_point(G, action: Callable = tetra_action):
    """Unit vector fixed by every element of G, or None."""
    G = list(G)
    stack = np.vstack([action(g) - np.eye(3) for g in G])
    _, s, Vt = np.linalg.svd(stack)
    null = Vt[np.sum(s > 1e-10):]
    if len(null) == 0:
        return None
    P = null.T @ null
    # canonical choice: projection of the first vertex or edge midpoint that survives
    cands = list(TETRA) + [TETRA[i] + TETRA[j] for i, j in PAIRS] + list(np.eye(3))
    for c in cands:
        x = P @ c
        n = np.linalg.norm(x)
        if n > 1e-9:
            return x / n
    return null[0]


# -- equivariance certificates -------------------------------------------------

def check_equivariance(fmap: Callable, action, samples: int = 200, seed: int = 0,
                       group=None) -> float:
    """Max of |fmap(A iota(g)^-1) - action(g) fmap(A)| over samples and g.

    ``fmap`` takes a Rotation. Right multiplication by iota(g)^-1 is the left
    action of g on SO(3), so the deviation is zero for an equivariant map.
    """
    rng = np.random.default_rng(seed)
    perms = list(group) if group is not None else list(all_permutations())
    mats = {p: np.asarray(action(p)) for p in perms}
    inv_rot = {p: iota(p).inv() for p in perms}
    worst = 0.0
    for _ in range(samples):
        A = sample_uniform(rng)
        y = np.asarray(fmap(A), dtype=float)
        if mats[perms[0]].shape[1] != y.shape[0]:
            raise ValueError("action and map dimensions differ")
        for p in perms:
            lhs = np.asarray(fmap(A @ inv_rot[p]), dtype=float)
            worst = max(worst, float(np.abs(lhs - mats[p] @ y).max()))
    return worst


def frame_sections_check(n: int = 100, seed: int = 0, columns: bool = False,
                         group=None) -> float:
    """Max deviation of s_i(A g) = g^-1 s_i(A) over g in A4 and random A.

    ``s_i(A)`` is the i-th row of A (that is, A^-1 e_i); ``columns=True``
    uses A e_i instead.
    """
    rng = np.random.default_rng(seed)
    perms = list(group) if group is not None else [p for p in all_permutations() if p.sign > 0]

    def sections(M):
        # column i is s_i(M)
        return M if columns else np.linalg.inv(M)

    worst = 0.0
    for _ in range(n):
        A = sample_uniform(rng).matrix
        base = sections(A)
        for p in perms:
            g = iota(p).matrix
            moved = sections(A @ g)
            worst = max(worst, float(np.abs(moved - np.linalg.inv(g) @ base).max()))
    return worst
