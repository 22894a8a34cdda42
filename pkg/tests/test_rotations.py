import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation as SciRot

from cubecover.groups import Permutation, iota
from cubecover.rotations import (Rotation, apply, exp, geodesic_distance, log,
                                 quotient_distance, sample_uniform, skew)
from cubecover.templates import make_template, symmetry_group

finite = st.floats(-3, 3, allow_nan=False)
tangent = st.tuples(finite, finite, finite)


def rodrigues(t):
    S = skew(t)
    w = np.array([-t[2], t[1], -t[0]])
    th = np.linalg.norm(w)
    if th == 0:
        return np.eye(3)
    return np.eye(3) + np.sin(th) / th * S + (1 - np.cos(th)) / th ** 2 * S @ S


def test_exp_zero_is_identity():
    assert np.array_equal(exp([0, 0, 0]).matrix, np.eye(3))


def test_exp_half_turn_squares_to_identity():
    R = exp([np.pi, 0, 0]).matrix
    assert np.allclose(R, rodrigues([np.pi, 0, 0]), atol=1e-12)
    assert np.allclose(R @ R, np.eye(3), atol=1e-12)
    # S(pi,0,0) fixes the z axis and turns the xy plane by pi
    assert np.allclose(R @ [0, 0, 1], [0, 0, 1], atol=1e-12)
    assert np.allclose(R @ [1, 0, 0], [-1, 0, 0], atol=1e-12)


@given(tangent)
def test_exp_matches_rodrigues(t):
    assert np.allclose(exp(t).matrix, rodrigues(t), atol=1e-12)


@given(tangent)
def test_exp_inverse(t):
    P = exp(t) @ exp(-np.asarray(t))
    assert np.allclose(P.matrix, np.eye(3), atol=1e-12)


@given(st.tuples(*[st.floats(-0.57, 0.57, allow_nan=False)] * 3))
def test_log_inverts_exp_near_zero(t):
    assert np.linalg.norm(log(exp(t)) - np.asarray(t)) < 1e-9


@given(st.integers(0, 2 ** 32 - 1))
def test_matrix_is_special_orthogonal(seed):
    R = sample_uniform(np.random.default_rng(seed))
    M = R.matrix
    assert abs(np.linalg.norm(R.q) - 1) < 1e-12
    assert np.abs(M.T @ M - np.eye(3)).max() < 1e-10
    assert abs(np.linalg.det(M) - 1) < 1e-10


@given(st.integers(0, 2 ** 32 - 1))
def test_matrix_agrees_with_scipy(seed):
    R = sample_uniform(np.random.default_rng(seed))
    w, x, y, z = R.q
    assert np.allclose(R.matrix, SciRot.from_quat([x, y, z, w]).as_matrix(), atol=1e-12)


def test_from_matrix_roundtrip():
    rng = np.random.default_rng(3)
    for _ in range(50):
        R = sample_uniform(rng)
        assert np.allclose(Rotation.from_matrix(R.matrix).q, R.q, atol=1e-12)


def test_from_matrix_rejects_reflection():
    with pytest.raises(ValueError):
        Rotation.from_matrix(np.diag([1.0, 1.0, -1.0]))


def test_canonical_sign():
    a = Rotation(np.array([-1.0, 0, 0, 0]))
    b = Rotation(np.array([0.0, -1.0, 0, 0]))
    assert a.q[0] == 1.0 and b.q[1] == 1.0


def test_apply_identity():
    v = np.array([0.3, -2.0, 5.0])
    assert np.array_equal(apply(Rotation.identity(), v), v)


def test_apply_iota_double_transposition():
    # rotation by pi about the x axis keeps (1,0,0) and flips y, z
    R = iota(Permutation.from_cycles("(12)(34)"))
    assert np.allclose(apply(R, [1, 0, 0]), [1, 0, 0], atol=1e-12)
    assert np.allclose(apply(R, [0, 1, 0]), [0, -1, 0], atol=1e-12)


def test_apply_is_isometry():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        R = sample_uniform(rng)
        v = rng.normal(size=3)
        assert abs(np.linalg.norm(apply(R, v)) - np.linalg.norm(v)) < 1e-12


def test_sample_deterministic():
    a = sample_uniform(np.random.default_rng(42))
    b = sample_uniform(np.random.default_rng(42))
    assert np.array_equal(a.q, b.q)


def test_sample_haar_moments_and_angle_density():
    rng = np.random.default_rng(7)
    Rs = [sample_uniform(rng) for _ in range(10_000)]
    M = np.array([R.matrix for R in Rs])
    assert np.abs(M.mean(axis=0)).max() < 0.05
    ang = np.array([R.angle() for R in Rs])
    edges = np.linspace(0, np.pi, 9)
    hist, _ = np.histogram(ang, edges)
    # integral of (1 - cos t) / pi over each bin
    expected = np.diff(edges - np.sin(edges)) / np.pi
    assert np.abs(hist / len(ang) - expected).max() < 0.02


def test_quotient_distance_same_coset():
    G = symmetry_group(make_template(1, 1, 1))
    R = sample_uniform(np.random.default_rng(1))
    for g in G:
        assert quotient_distance(R @ g, R, G) < 1e-10


def test_quotient_distance_trivial_group_is_geodesic():
    rng = np.random.default_rng(2)
    R1, R2 = sample_uniform(rng), sample_uniform(rng)
    assert abs(quotient_distance(R1, R2, [Rotation.identity()])
               - geodesic_distance(R1, R2)) < 1e-12


def test_quotient_distance_rejects_non_group():
    G = [Rotation.identity(), Rotation.from_axis_angle([0, 0, 1], 0.3)]
    with pytest.raises(ValueError):
        quotient_distance(Rotation.identity(), Rotation.identity(), G)


def test_quotient_distance_between_inscriptions(paper_ellipsoid):
    from cubecover.oracle import ellipsoid_inscriptions

    t = make_template(1, 1, 2)
    G = symmetry_group(t)
    boxes = ellipsoid_inscriptions(paper_ellipsoid, t)
    # same cube reached through different template symmetries
    assert quotient_distance(boxes[0].A @ G[3], boxes[0].A, G) < 1e-10
    for i in range(3):
        for j in range(i + 1, 3):
            assert quotient_distance(boxes[i].A, boxes[j].A, G) > 0.1


@settings(max_examples=50)
@given(st.integers(0, 2 ** 32 - 1))
def test_quotient_distance_metric(seed):
    G = symmetry_group(make_template(1, 2, 3))
    rng = np.random.default_rng(seed)
    a, b, c = (sample_uniform(rng) for _ in range(3))
    ab, ba = quotient_distance(a, b, G), quotient_distance(b, a, G)
    assert abs(ab - ba) < 1e-9
    assert quotient_distance(a, c, G) <= ab + quotient_distance(b, c, G) + 1e-9
