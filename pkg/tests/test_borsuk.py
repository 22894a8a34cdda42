import numpy as np
import pytest

from cubecover import borsuk
from cubecover.borsuk import (THETA0, DegenerateCutError, clipped_pieces, covers,
                              diameter_lower_bound, max_piece_diameter, optimize_partition,
                              partition_u3, sample_u3_faces, trivial_partition)
from cubecover.bodies import diameter
from cubecover.cover import rd_mesh

from conftest import optimized_partition

U3_VOLUME = np.sqrt(2) / 2


def perturbed(seed, scale=1.0):
    rng = np.random.default_rng(seed)
    return THETA0 + scale * rng.normal(size=8) * borsuk.STEP0


def test_default_partition_covers_u3():
    p = partition_u3()
    assert len(p.pieces) == 4
    pts = np.vstack([rd_mesh().vertices, sample_u3_faces(10_000)])
    assert covers(p, pts).all()


def test_pieces_are_convex_hull_vertex_sets():
    from scipy.spatial import ConvexHull

    for piece in partition_u3().pieces:
        V = piece.vertices
        assert len(ConvexHull(V).vertices) == len(V)


@pytest.mark.parametrize("seed", range(8))
def test_volumes_sum_to_u3(seed):
    try:
        p = partition_u3(perturbed(seed))
    except DegenerateCutError:
        pytest.skip("random cut degenerate")
    assert abs(sum(p.volumes()) - U3_VOLUME) < 1e-6 * U3_VOLUME
    # divergence-theorem volume of each mesh agrees with the hull volume
    for piece, v in zip(p.pieces, p.volumes()):
        assert abs(piece.volume() - v) < 1e-12


def test_degenerate_cut_flagged():
    theta = THETA0.copy()
    theta[2] = 5.0  # cap plane outside U3
    with pytest.raises(DegenerateCutError):
        partition_u3(theta)
    assert borsuk.evaluate(theta) == np.inf
    wide = THETA0.copy()
    wide[5:] = [0.0, 0.1, 0.2]  # one sector wider than pi
    with pytest.raises(DegenerateCutError):
        partition_u3(wide)


def test_trivial_partition_is_sqrt2():
    assert abs(max_piece_diameter(trivial_partition()) - np.sqrt(2)) < 1e-12


def test_default_value_below_sqrt2():
    assert max_piece_diameter(partition_u3()) < np.sqrt(2) - 1e-3


@pytest.mark.parametrize("seed", range(10))
def test_clipping_route_matches_halfspace_route(seed):
    theta = perturbed(seed, 2.0)
    try:
        exact = max_piece_diameter(partition_u3(theta))
    except DegenerateCutError:
        assert borsuk.evaluate(theta) == np.inf
        return
    fast = max(diameter(P) for P in clipped_pieces(theta))
    assert abs(fast - exact) < 1e-12


def test_budget_zero_returns_theta0():
    r = optimize_partition(budget=0)
    assert np.array_equal(r.theta, THETA0)
    assert abs(r.value - max_piece_diameter(partition_u3(THETA0))) < 1e-12
    assert r.evaluations == 0


def test_short_run_monotone_and_certified():
    r = optimize_partition(budget=300, seed=4)
    assert r.evaluations == 300
    assert all(b <= a for a, b in zip(r.history, r.history[1:]))
    assert abs(r.certificate - r.value) < 1e-12
    assert r.value <= r.history[0]


def test_deterministic_under_seed():
    a = optimize_partition(budget=150, seed=2)
    b = optimize_partition(budget=150, seed=2)
    assert np.array_equal(a.theta, b.theta) and a.value == b.value


def test_lower_bound_of_any_four_piece_cover():
    # the 6 octahedral tips are pairwise >= 1 apart, so some piece holds two
    assert abs(diameter_lower_bound() - 1.0) < 1e-12
    r = optimized_partition(0)
    assert r.value >= diameter_lower_bound() - 1e-12


def test_two_seeds_agree():
    a, b = optimized_partition(0), optimized_partition(1)
    assert abs(a.value - b.value) < 0.01
