import numpy as np
import pytest

from cubecover import Ellipsoid, borsuk

# 0.5x² + y² + 1.5z² = 3, i.e. x²/6 + y²/3 + z²/2 = 1
PAPER_COEFFS = np.array([1 / 6, 1 / 3, 1 / 2])

_OPTIMIZED = {}


@pytest.fixture
def paper_ellipsoid():
    return Ellipsoid(PAPER_COEFFS)


def optimized_partition(seed: int, budget: int = 10_000):
    """Cached full-budget partition search, shared across test modules."""
    key = (seed, budget)
    if key not in _OPTIMIZED:
        _OPTIMIZED[key] = borsuk.optimize_partition(budget=budget, seed=seed)
    return _OPTIMIZED[key]


def random_cloud(seed: int, n: int | None = None, diam: float = 1.0) -> np.ndarray:
    """Random 3-D point cloud rescaled to diameter at most ``diam``."""
    from cubecover import diameter

    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 60)) if n is None else n
    P = rng.normal(size=(n, 3)) * rng.uniform(0.2, 1.0, 3)
    d = diameter(P)
    return P * (diam / d) * (1 - 1e-12)
