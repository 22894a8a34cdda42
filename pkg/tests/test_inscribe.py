import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubecover.bodies import BodyError, Ellipsoid, GeneralSet, PointCloudBody
from cubecover.inscribe import (DIAG_COMPLEMENT, NoSolutionError, SolverConfig, inscribe_box,
                                inscribe_in_surface, knaster_residual, knaster_values,
                                solve_knaster)
from cubecover.oracle import ellipsoid_inscriptions
from cubecover.rotations import Rotation, quotient_distance, sample_uniform
from cubecover.templates import make_template, symmetry_group

CUBE_T = make_template(1, 1, 1)
FAST = SolverConfig(starts=64)


def test_diag_complement_is_orthonormal():
    assert np.allclose(DIAG_COMPLEMENT @ DIAG_COMPLEMENT.T, np.eye(3), atol=1e-15)
    assert np.allclose(DIAG_COMPLEMENT @ np.ones(4), 0.0)


def test_residual_unit_ball_is_zero():
    B = Ellipsoid(np.ones(3))
    for seed in range(5):
        A = sample_uniform(np.random.default_rng(seed))
        assert np.abs(knaster_residual(B.gauge, CUBE_T, A)).max() < 1e-15


def test_residual_paper_ellipsoid_identity(paper_ellipsoid):
    r = knaster_residual(paper_ellipsoid.gauge, CUBE_T, Rotation.identity())
    assert np.abs(r).max() < 1e-15
    vals = knaster_values(paper_ellipsoid.gauge, CUBE_T, Rotation.identity())
    assert np.allclose(vals, 1 / np.sqrt(3), atol=1e-15)


def test_residual_rotated_matches_recomputation(paper_ellipsoid):
    A = Rotation.from_axis_angle([1, 2, 3], 0.3)
    r = knaster_residual(paper_ellipsoid.gauge, CUBE_T, A)
    a = np.array([1 / 6, 1 / 3, 1 / 2])
    vals = [np.sqrt(np.sum(a * (A.matrix @ v) ** 2)) for v in CUBE_T.v]
    assert np.linalg.norm(r) > 1e-3
    assert np.allclose(r, DIAG_COMPLEMENT @ vals, atol=1e-15)
    # the projection norm equals the spread around the mean
    assert abs(np.linalg.norm(r) - np.linalg.norm(vals - np.mean(vals))) < 1e-15


def test_residual_rejects_non_finite():
    with pytest.raises(ValueError):
        knaster_residual(lambda U: np.full(len(U), np.nan), CUBE_T, Rotation.identity())


@pytest.mark.parametrize("ratios,count", [((1, 1, 1), 1), ((1, 1, 2), 3), ((1, 2, 3), 6)])
def test_solve_knaster_counts(paper_ellipsoid, ratios, count):
    t = make_template(*ratios)
    s = solve_knaster(paper_ellipsoid.gauge, t, SolverConfig(starts=256))
    assert len(s) == count
    assert not s.degenerate
    for c in s:
        assert np.abs(c.values - c.lam).max() < 1e-10
        assert abs(c.residual - np.linalg.norm(c.values - c.values.mean())) < 1e-12


def test_solve_knaster_sorted_and_deterministic(paper_ellipsoid):
    t = make_template(1, 2, 3)
    a = solve_knaster(paper_ellipsoid.gauge, t, FAST)
    b = solve_knaster(paper_ellipsoid.gauge, t, FAST)
    assert [tuple(c.A.q) for c in a] == [tuple(c.A.q) for c in b]
    keys = [(c.residual, tuple(c.A.q)) for c in a]
    assert keys == sorted(keys)


def test_solve_knaster_none_converged_returns_empty(paper_ellipsoid):
    s = solve_knaster(paper_ellipsoid.gauge, make_template(1, 2, 3),
                      SolverConfig(starts=4, max_iter=0))
    assert len(s) == 0 and s.converged == 0 and s.starts == 4


def test_solve_knaster_config_errors(paper_ellipsoid):
    with pytest.raises(ValueError):
        solve_knaster(paper_ellipsoid.gauge, CUBE_T, SolverConfig(starts=0))
    with pytest.raises(ValueError):
        solve_knaster(paper_ellipsoid.gauge, CUBE_T, SolverConfig(starts=2, tol=0.0))


def test_inscribe_unit_ball_any_rotation():
    box = inscribe_box(Ellipsoid(np.ones(3)), CUBE_T, SolverConfig(starts=16))
    assert box.degenerate
    assert np.allclose(np.linalg.norm(box.vertices, axis=1), 1.0, atol=1e-12)


def test_inscribe_paper_ellipsoid_cube(paper_ellipsoid):
    box = inscribe_box(paper_ellipsoid, CUBE_T, FAST)
    target = np.array([[x, y, z] for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)], float)
    d = np.linalg.norm(box.vertices[:, None] - target[None], axis=2)
    assert d.min(axis=1).max() < 1e-7
    assert abs(box.lam - 1 / np.sqrt(3)) < 1e-9


def test_inscribe_point_cloud_certified_by_lp():
    rng = np.random.default_rng(11)
    P = rng.normal(size=(500, 3)) * [1.0, 0.8, 0.6]
    P /= np.abs(P).max() / 1.0
    # solve on hull facets, certify with the LP gauge
    fast = PointCloudBody(P, gauge_method="facets")
    box = inscribe_box(fast, CUBE_T, SolverConfig(starts=32))
    g = PointCloudBody(P).gauge(box.vertices)
    assert np.all(np.abs(g - 1) <= 1e-6)
    V = box.vertices
    # similar to a cube: all 8 at equal distance, 3 equal edges from vertex 0
    r = np.linalg.norm(V, axis=1)
    assert np.ptp(r) < 1e-8 * r.max()
    e = np.sort(np.linalg.norm(V[1:] - V[0], axis=1))[:3]
    assert np.ptp(e) < 1e-6 * e.max()


def test_inscribe_rejects_asymmetric():
    with pytest.raises(BodyError):
        inscribe_box(GeneralSet(np.eye(3)), CUBE_T, FAST)
    with pytest.raises(BodyError):
        inscribe_box(PointCloudBody(np.eye(3) + 0.1, symmetrize=False), CUBE_T, FAST)


def test_inscribe_no_solution_raises(paper_ellipsoid):
    with pytest.raises(NoSolutionError) as info:
        inscribe_box(paper_ellipsoid, make_template(1, 2, 3), SolverConfig(starts=3, max_iter=0))
    assert info.value.search.starts == 3


def test_surface_constant_radius():
    box = inscribe_in_surface(lambda U: np.ones(len(U)), CUBE_T, SolverConfig(starts=8))
    assert np.allclose(np.linalg.norm(box.vertices, axis=1), 1.0, atol=1e-12)


def test_surface_radial_ellipsoid_matches_inscribe_box(paper_ellipsoid):
    g = lambda U: 1.0 / paper_ellipsoid.gauge(U)
    a = inscribe_in_surface(g, CUBE_T, FAST)
    b = inscribe_box(paper_ellipsoid, CUBE_T, FAST)
    G = symmetry_group(CUBE_T)
    assert quotient_distance(a.A, b.A, G) < 1e-6
    assert np.allclose(np.sort(a.vertices, axis=0), np.sort(b.vertices, axis=0), atol=1e-8)


def test_surface_quartic_on_surface_certificate():
    def g(U):
        U = np.atleast_2d(U)
        U = U / np.linalg.norm(U, axis=1)[:, None]
        return 1 + 0.2 * np.sum(U ** 4, axis=1)

    for t in (CUBE_T, make_template(1, 1, 2)):
        box = inscribe_in_surface(g, t, SolverConfig(starts=32))
        r = np.linalg.norm(box.vertices, axis=1)
        assert np.abs(r - g(box.vertices)).max() < 1e-7


def test_surface_rejects_nonpositive():
    with pytest.raises(ValueError):
        inscribe_in_surface(lambda U: -np.ones(len(U)), CUBE_T, SolverConfig(starts=2))


@settings(max_examples=100)
@given(st.integers(0, 2 ** 32 - 1), st.integers(0, 23))
def test_residual_norm_invariant_under_symmetry(seed, k):
    E = Ellipsoid(np.array([1 / 6, 1 / 3, 1 / 2]))
    G = symmetry_group(CUBE_T)
    A = sample_uniform(np.random.default_rng(seed))
    r1 = np.linalg.norm(knaster_residual(E.gauge, CUBE_T, A))
    r2 = np.linalg.norm(knaster_residual(E.gauge, CUBE_T, A @ G[k]))
    assert abs(r1 - r2) < 1e-10


def test_scaling_invariance(paper_ellipsoid):
    t = make_template(1, 1, 2)
    a = solve_knaster(paper_ellipsoid.gauge, t, FAST)
    b = solve_knaster(lambda U: 7.5 * paper_ellipsoid.gauge(U), t, FAST)
    G = symmetry_group(t)
    assert len(a) == len(b)
    for c in a:
        assert min(quotient_distance(c.A, d.A, G) for d in b) < 1e-3


def test_analytic_solutions_are_fixed_points(paper_ellipsoid):
    for ratios in ((1, 1, 1), (1, 1, 2), (1, 2, 3)):
        t = make_template(*ratios)
        for box in ellipsoid_inscriptions(paper_ellipsoid, t):
            s = solve_knaster(paper_ellipsoid.gauge, t, initial=[box.A])
            assert s.converged == 1 and s.iterations[0] <= 3
            assert s[0].residual < 1e-12
