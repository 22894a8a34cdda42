import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cubecover import groups
from cubecover.bodies import Ellipsoid, GeneralSet
from cubecover.cover import odd_function, phi
from cubecover.groups import (TAU6, TAU_TILDE, TETRA, TETRA_ACTION, Permutation,
                              all_permutations, check_equivariance, fixed_point,
                              frame_sections_check, iota, stabilizer, subgroup, subgroup_classes,
                              tau6, tetra_action, vw_decomposition, w_generators, w_permutation)
from cubecover.inscribe import knaster_values
from cubecover.rotations import Rotation
from cubecover.templates import make_template, symmetry_group

P = Permutation.from_cycles
perm = st.sampled_from(all_permutations())


def test_permutation_basics():
    s = P("(123)")
    assert s(0) == 1 and s(1) == 2 and s(2) == 0 and s(3) == 3
    assert s.sign == 1 and P("(12)").sign == -1 and P("(1234)").sign == -1
    assert s * s.inverse() == Permutation.identity()
    assert len(all_permutations()) == 24
    with pytest.raises(ValueError):
        Permutation((0, 0, 1, 2))


@given(perm, perm)
def test_composition_is_function_composition(a, b):
    assert all((a * b)(i) == a(b(i)) for i in range(4))


def test_iota_identity():
    assert np.allclose(iota(Permutation.identity()).matrix, np.eye(3))


def test_iota_double_transposition_is_half_turn():
    M = iota(P("(12)(34)")).matrix
    assert np.allclose(M, np.diag([1.0, -1.0, -1.0]), atol=1e-15)


def test_iota_four_cycle_is_quarter_turn():
    R = iota(P("(1234)"))
    assert abs(R.angle() - np.pi / 2) < 1e-12
    axis = R.q[1:] / np.linalg.norm(R.q[1:])
    assert np.isclose(np.abs(axis).max(), 1.0, atol=1e-12)


def test_iota_homomorphism_and_image():
    assert groups.iota_defect() < 1e-12
    imgs = [iota(p) for p in all_permutations()]
    assert all(abs(np.linalg.det(R.matrix) - 1) < 1e-12 for R in imgs)
    cube = symmetry_group(make_template(1, 1, 1))
    for R in imgs:
        assert min(np.abs(R.matrix - g.matrix).max() for g in cube) < 1e-10
    assert len({tuple(np.round(R.q, 9)) for R in imgs}) == 24


def test_tetra_action_examples():
    assert np.allclose(tetra_action(Permutation.identity()), np.eye(3))
    M = tetra_action(P("(12)"))
    assert abs(np.linalg.det(M) + 1) < 1e-12
    assert np.allclose(TETRA @ M.T, TETRA[[1, 0, 2, 3]], atol=1e-12)


@given(perm)
def test_tetra_action_permutes_vertices(s):
    M = tetra_action(s)
    for i in range(4):
        assert np.allclose(M @ TETRA[i], TETRA[s(i)], atol=1e-12)
    assert abs(np.linalg.det(M) - s.sign) < 1e-12


def test_homomorphisms_50_pairs():
    rng = np.random.default_rng(0)
    perms = all_permutations()
    for _ in range(50):
        a, b = (perms[i] for i in rng.integers(0, 24, 2))
        for act in (tetra_action, groups.tau_tilde, tau6):
            assert np.abs(act(a * b) - act(a) @ act(b)).max() < 1e-12
    for act in (TETRA_ACTION, TAU_TILDE, TAU6):
        assert act.homomorphism_defect() < 1e-12
        for p in perms:
            M = act(p)
            assert np.allclose(M.T @ M, np.eye(act.dim), atol=1e-12)


def test_tau6_examples():
    e = np.eye(6)  # e12 e13 e14 e23 e24 e34
    M = tau6(P("(12)"))
    assert np.array_equal(M @ e[0], e[0])
    assert np.array_equal(M @ e[5], -e[5])
    assert np.array_equal(tau6(Permutation.identity()), np.eye(6))
    assert np.array_equal(tau6(P("(123)")) @ e[0], e[3])


def test_subgroup_classes():
    classes = subgroup_classes()
    assert len(classes) == 11
    labels = sorted(c.label for c in classes)
    assert labels == sorted(["C1", "C2", "C2", "C3", "C4", "D2", "D2", "D3", "D4", "A4", "S4"])
    assert sum(c.size for c in classes) == 30
    assert [c.label for c in classes].count("A4") == 1
    transposition = [c for c in classes if c.order == 2 and c.size == 6]
    assert len(transposition) == 1
    (g,) = transposition[0].generators
    assert g.sign == -1
    for c in classes:
        assert subgroup(c.generators) == c.elements


def test_vw_decomposition():
    V, W = vw_decomposition()
    assert V.shape == W.shape == (3, 6)
    assert np.allclose(V @ V.T, np.eye(3), atol=1e-12)
    assert np.allclose(W @ W.T, np.eye(3), atol=1e-12)
    assert np.abs(V @ W.T).max() < 1e-12
    for p in all_permutations():
        T = tau6(p)
        # invariance: the image stays in the span, so projection is lossless
        assert np.abs((T @ V.T) - V.T @ (V @ T @ V.T)).max() < 1e-12
        assert np.abs((T @ W.T) - W.T @ (W @ T @ W.T)).max() < 1e-12


def test_w_action_matches_tetrahedral_action():
    Wg = w_generators()
    assert np.allclose(Wg.sum(axis=0), 0)
    seen = set()
    for p in all_permutations():
        idx, signs = w_permutation(p)
        assert idx == p.images
        assert all(s == 1.0 for s in signs)
        seen.add(idx)
    assert len(seen) == 24  # faithful


def test_fixed_points():
    x = fixed_point(subgroup(["(12)"]))
    assert x is not None
    # equidistant to vertices 1 and 2
    assert abs(np.linalg.norm(x - TETRA[0]) - np.linalg.norm(x - TETRA[1])) < 1e-12
    s = fixed_point(stabilizer(0))
    assert np.allclose(s, TETRA[0] / np.sqrt(3), atol=1e-12)
    assert fixed_point(all_permutations()) is None
    for c in subgroup_classes():
        y = fixed_point(c.elements)
        if y is not None:
            assert max(np.abs(tetra_action(g) @ y - y).max() for g in c.elements) < 1e-12


def _ellipsoid_f(A):
    E = Ellipsoid(np.array([1 / 6, 1 / 3, 1 / 2]))
    return knaster_values(E.gauge, make_template(1, 1, 1), A)


def test_equivariance_of_f():
    assert check_equivariance(_ellipsoid_f, groups.tau_tilde, samples=200) < 1e-10


def test_equivariance_of_phi_for_tetrahedron_and_random_set():
    F0 = odd_function(GeneralSet(groups.UNIT_TETRA))
    assert check_equivariance(lambda A: phi(F0, A), tau6, samples=200) < 1e-10
    X = np.random.default_rng(3).normal(size=(25, 3))
    F1 = odd_function(GeneralSet(X))
    assert check_equivariance(lambda A: phi(F1, A), tau6, samples=50) < 1e-10


def test_equivariance_negative_control():
    E = Ellipsoid(np.array([1 / 6, 1 / 3, 1 / 2]))
    t = make_template(1, 1, 1)
    V = t.v.copy()
    V[0] = V[0] + 0.05
    broken = lambda A: E.gauge(V @ A.matrix.T)
    assert check_equivariance(broken, groups.tau_tilde, samples=20) > 1e-3


def test_equivariance_dimension_mismatch():
    with pytest.raises(ValueError):
        check_equivariance(_ellipsoid_f, tau6, samples=2)


def test_frame_sections():
    assert frame_sections_check(100) < 1e-12
    assert frame_sections_check(20, columns=True) > 0.1
    ident = [Permutation.identity()]
    assert frame_sections_check(10, group=ident) == 0.0
