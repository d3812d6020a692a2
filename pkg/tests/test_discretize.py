import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from reference import discrete_square_eigenvalues, jacobi_eigenvalues
from spectral_gaps import geometry
from spectral_gaps.discretize import (assemble_euclidean, assemble_hyperbolic, read_triplets,
                                      write_triplets)
from spectral_gaps.errors import EmptyGrid, SpectrumFormatError, WrongDomainKind

J01 = 2.404825557695773  # first zero of J_0


def test_single_node_operator():
    op = assemble_euclidean(geometry.rasterize(geometry.square(), 0.5))
    assert_allclose(op.toarray(), [[16.0]])


def test_five_point_stencil_on_square():
    op = assemble_euclidean(geometry.rasterize(geometry.square(), 0.25))
    a = op.toarray()
    assert_allclose(np.diag(a), 64.0)
    assert_allclose(a.sum(axis=1)[4], 0.0)  # centre node has four interior neighbours
    assert op.asymmetry() == 0.0
    assert_allclose(jacobi_eigenvalues(a), discrete_square_eigenvalues(0.25, 9), rtol=1e-12)


def test_cube_matches_tensor_product():
    op = assemble_euclidean(geometry.rasterize(geometry.cube(), 0.25))
    h = 0.25
    one_d = [2 / h ** 2 * (1 - math.cos(p * math.pi * h)) for p in (1, 2, 3)]
    exact = np.sort([a + b + c for a in one_d for b in one_d for c in one_d])
    assert_allclose(jacobi_eigenvalues(op.toarray()), exact, rtol=1e-12)


def test_cut_cells_are_symmetric_and_diagonal_only():
    grid = geometry.rasterize(geometry.disk(), 0.1)
    op = assemble_euclidean(grid)
    assert op.asymmetry() == 0.0
    expected = np.sum(1.0 / grid.boundary_fractions, axis=(1, 2)) / grid.h ** 2
    assert_allclose(op.diagonal(), expected)
    offdiag = op.toarray() - np.diag(op.diagonal())
    assert_allclose(np.unique(offdiag[offdiag != 0]), [-1.0 / grid.h ** 2])


def test_disk_first_eigenvalue_second_order():
    errs = []
    for h in (1 / 16, 1 / 32, 1 / 64):
        a = assemble_euclidean(geometry.rasterize(geometry.disk(), h)).matrix
        from scipy.sparse.linalg import eigsh
        lam = eigsh(a.tocsc(), k=1, sigma=0, which="LM")[0][0]
        errs.append(abs(lam - J01 ** 2))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders > 1.7), orders


def test_hyperbolic_mass():
    grid = geometry.rasterize(geometry.hyperbolic_rect(0, 1, 1, 2), 0.25)
    prob = assemble_hyperbolic(grid)
    assert_allclose(prob.mass, 1.0 / grid.coords[:, 1] ** 2)
    assert prob.size == grid.size
    with pytest.raises(WrongDomainKind):
        assemble_hyperbolic(geometry.rasterize(geometry.square(), 0.25))


def test_empty_grid_rejected():
    grid = geometry.Grid(geometry.square(), 0.5, np.zeros((0, 2), dtype=int),
                         np.zeros((0, 2, 2)), np.zeros((0, 2, 2), dtype=int))
    with pytest.raises(EmptyGrid):
        assemble_euclidean(grid)


def test_triplet_round_trip(tmp_path):
    op = assemble_euclidean(geometry.rasterize(geometry.disk(), 0.2))
    path = tmp_path / "a.txt"
    write_triplets(op, path)
    back = read_triplets(path, op.size)
    assert (back.matrix != op.matrix).nnz == 0
    (tmp_path / "bad.txt").write_text("0 0 1.0\n1 x 2\n")
    with pytest.raises(SpectrumFormatError):
        read_triplets(tmp_path / "bad.txt")
