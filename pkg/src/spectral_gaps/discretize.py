"""Finite-difference assembly of the Dirichlet Laplacian.

The operator represents ``-Delta`` (positive spectrum).  Away from the
boundary it is the usual 5-point (2-D) or 7-point (3-D) stencil scaled by
``1/h^2``.  At cut cells, where the boundary sits a fraction ``theta`` of a
step away, the missing neighbour is replaced by the ghost value obtained by
linear extrapolation through ``u = 0`` on the boundary.  In flux form this
adds ``1/(theta h^2)`` to the diagonal and nothing off the diagonal, which
keeps the matrix exactly symmetric while preserving second-order eigenvalue
convergence on curved boundaries.

On a half-plane rectangle the Laplace-Beltrami operator is
``y^2 (u_xx + u_yy)``, so the eigenproblem becomes ``A u = lam M u`` with
the Euclidean stiffness ``A`` and the diagonal mass ``M = diag(1/y^2)``.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import EmptyGrid, UnsupportedShape, WrongDomainKind, SpectrumFormatError

__all__ = [
    "SparseOperator",
    "GeneralizedProblem",
    "assemble_euclidean",
    "assemble_hyperbolic",
    "write_triplets",
    "read_triplets",
]


@dataclass(frozen=True, eq=False)
class SparseOperator:
    """Symmetric sparse matrix in compressed sparse row layout.

    Thin wrapper over :class:`scipy.sparse.csr_matrix`; ``grid`` remembers
    where the operator came from (``None`` for hand-built operators).
    """

    matrix: sp.csr_matrix
    grid: object = None
    symmetric: bool = True

    @classmethod
    def from_dense(cls, a, grid=None):
        a = np.asarray(a, dtype=float)
        return cls(sp.csr_matrix(a), grid, bool(np.array_equal(a, a.T)))

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def size(self):
        return self.matrix.shape[0]

    @property
    def row_offsets(self):
        return self.matrix.indptr

    @property
    def column_indices(self):
        return self.matrix.indices

    @property
    def values(self):
        return self.matrix.data

    def diagonal(self):
        return self.matrix.diagonal()

    def toarray(self):
        return self.matrix.toarray()

    def __matmul__(self, x):
        return self.matrix @ x

    def asymmetry(self):
        """Largest ``|a_ij - a_ji|``."""
        d = self.matrix - self.matrix.T
        return float(abs(d).max()) if d.nnz else 0.0


@dataclass(frozen=True, eq=False)
class GeneralizedProblem:
    """Pencil ``A u = lam M u`` with diagonal, strictly positive ``M``."""

    stiffness: SparseOperator
    mass: np.ndarray

    @property
    def size(self):
        return self.stiffness.size

    @property
    def grid(self):
        return self.stiffness.grid


def assemble_euclidean(grid):
    """Assemble ``-Delta`` with Dirichlet conditions on ``grid``.

    Parameters
    ----------
    grid : Grid
        Output of :func:`spectral_gaps.geometry.rasterize`, in 2 or 3
        dimensions.

    Returns
    -------
    SparseOperator

    Examples
    --------
    >>> from spectral_gaps.geometry import rasterize, square
    >>> assemble_euclidean(rasterize(square(), 0.5)).toarray()
    array([[16.]])
    """
    nnodes = len(grid.lattice)
    if nnodes == 0:
        raise EmptyGrid("cannot assemble an operator on an empty grid")
    if grid.lattice.ndim != 2 or grid.lattice.shape[1] not in (2, 3):
        raise UnsupportedShape("only 2-D and 3-D grids are supported")
    h2 = grid.h ** 2
    theta = grid.boundary_fractions
    diag = np.sum(1.0 / theta, axis=(1, 2)) / h2
    nb = grid.neighbors.reshape(nnodes, -1)
    rows = np.repeat(np.arange(nnodes), nb.shape[1]).reshape(nnodes, -1)
    keep = nb >= 0
    r = np.concatenate([rows[keep], np.arange(nnodes)])
    c = np.concatenate([nb[keep], np.arange(nnodes)])
    v = np.concatenate([np.full(keep.sum(), -1.0 / h2), diag])
    mat = sp.csr_matrix((v, (r, c)), shape=(nnodes, nnodes))
    mat.sort_indices()
    return SparseOperator(mat, grid, True)


def assemble_hyperbolic(grid):
    """Assemble the Laplace-Beltrami pencil on a half-plane rectangle.

    The stiffness is the Euclidean operator of :func:`assemble_euclidean`
    and the mass is ``1/y^2`` at every node, so that the generalized
    eigenvalues approximate the Dirichlet spectrum of the hyperbolic
    Laplacian.

    Raises
    ------
    WrongDomainKind
        If ``grid`` does not come from a ``hyperbolic_rect`` domain.
    """
    if not getattr(grid, "is_hyperbolic", False):
        raise WrongDomainKind("assemble_hyperbolic needs a hyperbolic_rect grid")
    stiffness = assemble_euclidean(grid)
    y = grid.coords[:, 1]
    return GeneralizedProblem(stiffness, 1.0 / y ** 2)


def write_triplets(op, path):
    """Dump an operator as ``row col value`` lines (17 significant digits)."""
    coo = op.matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w") as fh:
        for i in order:
            fh.write(f"{coo.row[i]} {coo.col[i]} {coo.data[i]:.17g}\n")


def read_triplets(path, size=None):
    rows, cols, vals = [], [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            parts = line.split()
            try:
                rows.append(int(parts[0]))
                cols.append(int(parts[1]))
                vals.append(float(parts[2]))
            except (IndexError, ValueError) as exc:
                raise SpectrumFormatError(f"{path}:{lineno}: bad triplet line") from exc
    if size is None:
        size = max(max(rows), max(cols)) + 1 if rows else 0
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(size, size))
    mat.sort_indices()
    return SparseOperator(mat, None, True)
