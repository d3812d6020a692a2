import os
import sys
import time

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from spectral_gaps import geometry  # noqa: E402
from spectral_gaps.discretize import assemble_euclidean, assemble_hyperbolic  # noqa: E402
from spectral_gaps.eigensolve import smallest_eigenpairs  # noqa: E402
from spectral_gaps.quadrature import build_basis  # noqa: E402

H_FINE = 1.0 / 128


def _timed_solve(domain, K):
    start = time.perf_counter()
    grid = geometry.rasterize(domain, H_FINE)
    spec = smallest_eigenpairs(assemble_euclidean(grid), K, tol=1e-8, seed=0,
                               keep_vectors=False)
    return spec, time.perf_counter() - start


@pytest.fixture(scope="session")
def square_solve_fine():
    """Unit square, h = 1/128, 20 eigenvalues, with wall-clock seconds."""
    return _timed_solve(geometry.square(), 20)


@pytest.fixture(scope="session")
def disk_solve_fine():
    """Unit disk, h = 1/128, 10 eigenvalues, with wall-clock seconds."""
    return _timed_solve(geometry.disk(), 10)


@pytest.fixture(scope="session")
def square_basis_fine():
    """Normalized eigenfunctions on the unit square, h = 1/128, 12 pairs."""
    basis, _ = build_basis(geometry.square(), H_FINE, 12, tol=1e-8, seed=0)
    return basis


@pytest.fixture(scope="session")
def hyperbolic_basis():
    """Half-plane rectangle (0,1)x(1,2), h = 1/64, 22 pairs."""
    basis, spec = build_basis(geometry.hyperbolic_rect(0, 1, 1, 2), 1.0 / 64, 22,
                              tol=1e-8, seed=0)
    return basis, spec


@pytest.fixture
def small_square_problem():
    grid = geometry.rasterize(geometry.square(), 0.125)
    return assemble_euclidean(grid)


@pytest.fixture
def small_hyperbolic_problem():
    grid = geometry.rasterize(geometry.hyperbolic_rect(0, 1, 1, 2), 0.125)
    return assemble_hyperbolic(grid)
