"""Grid integrals, discrete gradients, and eigenfunction identities.

Integrals use the midpoint rule on lattice nodes: weight ``h^n`` per node
in Euclidean space and ``h^2 / y^2`` on the half-plane (the hyperbolic
area element).  That rule leaves out a layer of width about ``h/2`` along
the boundary, harmless for integrands that vanish there (``u^2``) but an
``O(h)`` error for squared eigenfunction gradients.  Those integrands use
the ``"cell"`` rule instead, where a cut node's cell reaches all the way
to the boundary point on each cut side.

Gradients are returned in an orthonormal frame, so on the half-plane they
are the coordinate derivatives multiplied by ``y``; with that convention
every metric inner product is a plain dot product of the components.

The eigenfunction inequalities verified here all have the shape
``lhs <= rhs``; each is turned into a :class:`~spectral_gaps.bounds.BoundCheck`
with a relative tolerance (default ``1e-3`` of the right-hand side), since
discrete eigenfunctions carry an ``O(h^2)`` bias.
"""

from dataclasses import dataclass
import math

import numpy as np

from .bounds import BoundCheck
from .errors import (IndexOrder, NotUnitGradient, SizeMismatch, TooFewEigenpairs,
                     WrongDomainKind)

__all__ = [
    "EigenBasis",
    "TestFunction",
    "coordinate",
    "complex_exponential",
    "hyperbolic_log",
    "build_basis",
    "node_weights",
    "discrete_integral",
    "gradient_field",
    "lemma_terms",
    "LemmaTerms",
    "verify_mainformula",
    "verify_corollaries",
    "ibp_identity",
]

REL_TOL = 1e-3
UNIT_GRADIENT_TOL = 1e-10


def node_weights(grid, rule="nodal"):
    """Quadrature weight of every node.

    ``rule="nodal"`` gives ``h^n`` everywhere.  ``rule="cell"`` gives the
    volume of the node's box, whose half-width along each axis is ``h/2``
    towards an interior neighbour and ``theta h`` towards the boundary;
    the boxes tile rectangles exactly.
    """
    if rule == "nodal":
        w = np.full(grid.size, grid.h ** grid.n)
    elif rule == "cell":
        reach = np.where(grid.neighbors >= 0, 0.5, grid.boundary_fractions)
        w = np.prod(reach.sum(axis=2) * grid.h, axis=1)
    else:
        raise ValueError(f"unknown quadrature rule {rule!r}")
    if grid.is_hyperbolic:
        w = w / grid.coords[:, 1] ** 2
    return w


def _check_size(grid, samples):
    samples = np.asarray(samples)
    if samples.shape[0] != grid.size:
        raise SizeMismatch(f"{samples.shape[0]} samples for a grid of {grid.size} nodes")
    return samples


def discrete_integral(grid, samples, rule="nodal"):
    """Midpoint-rule integral of nodal ``samples`` over the grid's domain.

    See :func:`node_weights` for ``rule``.

    Examples
    --------
    >>> from spectral_gaps.geometry import rasterize, square
    >>> g = rasterize(square(), 0.25)
    >>> float(discrete_integral(g, np.ones(g.size)))
    0.5625
    """
    samples = _check_size(grid, samples)
    return np.tensordot(node_weights(grid, rule), samples, axes=(0, 0))


def gradient_field(grid, samples, boundary=None):
    """Frame components of the gradient of a nodal field.

    Each component uses the three-point formula on the (possibly uneven)
    stencil formed by the two neighbours along that axis.  A neighbour
    across the boundary is the boundary point itself, at distance
    ``theta h``, where the field takes the value ``boundary(points)``
    (zero by default, the Dirichlet extension of an eigenfunction).

    Parameters
    ----------
    grid : Grid
    samples : array_like, shape (N,)
        Real or complex nodal values.
    boundary : callable, optional
        Maps an ``(M, n)`` array of boundary points to values there.

    Returns
    -------
    ndarray, shape (N, n)
        Second-order accurate where both neighbours are lattice nodes.
    """
    u = _check_size(grid, samples)
    h = grid.h
    pts = grid.coords
    out = np.empty((grid.size, grid.n), dtype=np.result_type(u.dtype, float))
    for axis in range(grid.n):
        a = grid.boundary_fractions[:, axis, 0] * h
        b = grid.boundary_fractions[:, axis, 1] * h
        side_vals = []
        for side, dist, sign in ((0, a, -1.0), (1, b, 1.0)):
            idx = grid.neighbors[:, axis, side]
            vals = np.where(idx >= 0, u[np.maximum(idx, 0)], 0)
            cut = idx < 0
            if boundary is not None and cut.any():
                bp = pts[cut].astype(float)
                bp[:, axis] += sign * dist[cut]
                vals = vals.astype(out.dtype)
                vals[cut] = boundary(bp)
            side_vals.append(vals)
        um, up = side_vals
        out[:, axis] = (-b / (a * (a + b)) * um + (b - a) / (a * b) * u
                        + a / (b * (a + b)) * up)
    if grid.is_hyperbolic:
        out *= pts[:, 1:2]
    return out


@dataclass(eq=False)
class EigenBasis:
    """Eigenpairs with eigenfunctions normalized in the grid ``L^2`` norm.

    ``vectors[:, j]`` satisfies ``discrete_integral(grid, u_j * u_j) == 1``.
    """

    grid: object
    eigenvalues: np.ndarray
    vectors: np.ndarray

    @classmethod
    def from_spectrum(cls, spectrum, grid=None):
        """Rescale solver output (orthonormal in the mass inner product)."""
        grid = grid if grid is not None else spectrum.grid
        if spectrum.eigenvectors is None or grid is None:
            raise TooFewEigenpairs("spectrum carries no eigenvectors or grid")
        vecs = np.asarray(spectrum.eigenvectors) / math.sqrt(grid.h ** grid.n)
        return cls(grid, np.asarray(spectrum.eigenvalues, dtype=float), vecs)

    def __len__(self):
        return len(self.eigenvalues)

    def gram(self):
        w = node_weights(self.grid)
        return self.vectors.T @ (w[:, None] * self.vectors)

    def orthonormality_error(self):
        return float(np.abs(self.gram() - np.eye(len(self))).max())

    def u(self, i):
        """Eigenfunction ``u_i`` (1-based)."""
        return self.vectors[:, i - 1]


def build_basis(domain, h, K, tol=1e-8, seed=0, precond="auto"):
    """Rasterize, assemble, and solve for ``K`` eigenpairs with vectors."""
    from .discretize import assemble_euclidean, assemble_hyperbolic
    from .eigensolve import smallest_eigenpairs
    from .geometry import rasterize

    grid = rasterize(domain, h)
    problem = assemble_hyperbolic(grid) if grid.is_hyperbolic else assemble_euclidean(grid)
    spec = smallest_eigenpairs(problem, K, tol=tol, seed=seed, precond=precond)
    return EigenBasis.from_spectrum(spec, grid), spec


@dataclass(eq=False)
class TestFunction:
    """Closed-form test function sampled on a grid.

    Attributes
    ----------
    kind : str
        ``coordinate``, ``complex_exponential`` or ``hyperbolic_log``.
    label : str
        Short description used in reports.
    value : ndarray, shape (N,)
    gradient : ndarray, shape (N, n)
        Frame components of the metric gradient.
    laplacian : ndarray, shape (N,)
        Laplace(-Beltrami) operator applied to the function.
    grad_lap_dot_grad : ndarray, shape (N,)
        ``grad(Laplacian f) . grad f``.
    """

    __test__ = False  # not a pytest class

    kind: str
    label: str
    value: np.ndarray
    gradient: np.ndarray
    laplacian: np.ndarray
    grad_lap_dot_grad: np.ndarray

    def grad_norm_sq(self):
        return np.sum(np.abs(self.gradient) ** 2, axis=1)


def coordinate(grid, axis):
    """``f = x_axis`` (0-based axis).  On the half-plane ``|grad f| = y``."""
    x = grid.coords
    grad = np.zeros((grid.size, grid.n))
    grad[:, axis] = x[:, 1] if grid.is_hyperbolic else 1.0
    zero = np.zeros(grid.size)
    return TestFunction("coordinate", f"x{axis + 1}", x[:, axis].astype(float), grad,
                        zero, zero.copy())


def complex_exponential(grid, alpha, axis):
    """``g = exp(1j * alpha * x_axis)``; ``alpha = 0`` gives the constant 1."""
    if grid.is_hyperbolic:
        raise WrongDomainKind("complex_exponential is sampled on Euclidean grids only")
    x = grid.coords[:, axis]
    g = np.exp(1j * alpha * x)
    grad = np.zeros((grid.size, grid.n), dtype=complex)
    grad[:, axis] = 1j * alpha * g
    lap = -alpha ** 2 * g
    # grad(lap) . grad g = (-alpha^2)(1j alpha g)^2 = alpha^4 g^2
    return TestFunction("complex_exponential", f"exp(i*{alpha:g}*x{axis + 1})", g, grad,
                        lap, alpha ** 4 * g * g)


def hyperbolic_log(grid):
    """``r = log y`` on the half-plane: unit gradient, Laplacian ``-1``."""
    if not grid.is_hyperbolic:
        raise WrongDomainKind("hyperbolic_log needs a half-plane grid")
    y = grid.coords[:, 1]
    grad = np.zeros((grid.size, 2))
    grad[:, 1] = y * (1.0 / y)
    return TestFunction("hyperbolic_log", "log y", np.log(y), grad, np.full(grid.size, -1.0),
                        np.zeros(grid.size))


@dataclass
class LemmaTerms:
    T1: float
    T2: float
    T3: float
    lhsFactor: float
    rhsProduct: float


def _indices(basis, i, k):
    i, k = int(i), int(k)
    if i < 1:
        raise IndexOrder("i starts at 1")
    if i > k:
        raise IndexOrder(f"need i <= k, got i={i}, k={k}")
    if len(basis) < k + 2:
        raise TooFewEigenpairs(f"need {k + 2} eigenpairs, basis has {len(basis)}")
    return i, k


def lemma_terms(basis, g, i, k):
    """Integrals entering the eigenfunction gap inequality.

    ``T1 = int |grad g|^2 u_i^2``, ``T2 = int |2 grad g . grad u_i + u_i Lap g|^2``,
    ``T3 = int |g u_i|^2``, ``lhsFactor = (l_{k+1}-l_i) + (l_{k+2}-l_i)``,
    ``rhsProduct = (l_{k+1}-l_i)(l_{k+2}-l_i)``.  Indices are 1-based.

    Raises
    ------
    TooFewEigenpairs
        If the basis has fewer than ``k + 2`` pairs.
    IndexOrder
        If ``i > k``.
    """
    i, k = _indices(basis, i, k)
    grid = basis.grid
    u = basis.u(i)
    lam = basis.eigenvalues
    grad_u = gradient_field(grid, u)
    cross = 2.0 * np.sum(g.gradient * grad_u, axis=1) + u * g.laplacian
    d1 = lam[k] - lam[i - 1]
    d2 = lam[k + 1] - lam[i - 1]
    return LemmaTerms(
        T1=float(discrete_integral(grid, g.grad_norm_sq() * u * u)),
        T2=float(discrete_integral(grid, np.abs(cross) ** 2, "cell")),
        T3=float(discrete_integral(grid, np.abs(g.value * u) ** 2)),
        lhsFactor=float(d1 + d2),
        rhsProduct=float(d1 * d2),
    )


def _rel_check(ident, k, lhs, rhs, notes, rel_tol=REL_TOL):
    tol = rel_tol * abs(rhs)
    slack = rhs - lhs
    notes = f"{notes}; abs_tol={tol:.3g}; rel_tol={rel_tol:g} (O(h^2) discretization slack)"
    return BoundCheck(ident, int(k), float(lhs), float(rhs), float(slack),
                      bool(slack >= -tol), notes)


def verify_mainformula(basis, g, i, k, rel_tol=REL_TOL):
    """Check ``lhsFactor * T1 <= T2 + rhsProduct * T3``."""
    t = lemma_terms(basis, g, i, k)
    return _rel_check("mainformula", k, t.lhsFactor * t.T1, t.T2 + t.rhsProduct * t.T3,
                      f"g={g.label}; i={int(i)}", rel_tol)


def _curvature_terms(basis, f, i):
    grid = basis.grid
    u = basis.u(i)
    grad_u = gradient_field(grid, u)
    fu = np.sum(f.gradient * grad_u, axis=1)
    return {
        "fu2": float(discrete_integral(grid, fu ** 2, "cell")),
        "lap2": float(discrete_integral(grid, f.laplacian ** 2 * u * u)),
        "glg": float(discrete_integral(grid, f.grad_lap_dot_grad * u * u)),
        "square": float(discrete_integral(grid, (2.0 * fu + u * f.laplacian) ** 2, "cell")),
        "grad2": float(discrete_integral(grid, f.grad_norm_sq() * u * u)),
        "grad4": float(discrete_integral(grid, f.grad_norm_sq() ** 2 * u * u)),
    }


def ibp_identity(basis, f, i):
    """Both sides of ``int (2 grad f.grad u + u Lap f)^2 =
    4 int (grad f.grad u)^2 - int (Lap f)^2 u^2 - 2 int (grad Lap f.grad f) u^2``.

    Returns
    -------
    (float, float)
        Left side and right side, each computed directly on the grid.
    """
    c = _curvature_terms(basis, f, int(i))
    return c["square"], 4.0 * c["fu2"] - c["lap2"] - 2.0 * c["glg"]


def verify_corollaries(basis, f, i, k, rel_tol=REL_TOL):
    """Three consequences of the lemma for a real ``f`` with ``|grad f| = 1``.

    (a) ``cor_exp``: ``(L1 + L2) int |grad f|^2 u^2 <=
        2 sqrt(L1 L2 int |grad f|^4 u^2) + int (2 grad f.grad u + u Lap f)^2``
        with ``L1 = l_{k+1} - l_i``, ``L2 = l_{k+2} - l_i``.
    (b) ``key_inq1``: ``(l_{k+2} - l_{k+1})^2 <= 16 Q l_{k+2}`` with
        ``Q = int (grad f.grad u)^2 - int (Lap f)^2 u^2 / 4 - int (grad Lap f.grad f) u^2 / 2``.
    (c) ``key_inq2``: ``l_{k+2} - l_{k+1} <= 4 sqrt(Q') sqrt(l_{k+2})``, where
        ``Q'`` is ``Q`` with ``l_i`` in place of the first integral.

    Raises
    ------
    NotUnitGradient
        If the sampled ``|grad f|`` differs from 1 by more than ``1e-10``.
    """
    i, k = _indices(basis, i, k)
    dev = float(np.abs(np.sqrt(f.grad_norm_sq()) - 1.0).max())
    if dev > UNIT_GRADIENT_TOL:
        raise NotUnitGradient(f"|grad {f.label}| deviates from 1 by {dev:.3g}")
    lam = basis.eigenvalues
    c = _curvature_terms(basis, f, i)
    d1 = lam[k] - lam[i - 1]
    d2 = lam[k + 1] - lam[i - 1]
    gap = lam[k + 1] - lam[k]
    note = f"f={f.label}; i={i}"
    out = [_rel_check("cor_exp", k, (d1 + d2) * c["grad2"],
                      2.0 * math.sqrt(max(d1 * d2, 0.0) * c["grad4"]) + c["square"],
                      note, rel_tol)]
    q = c["fu2"] - 0.25 * c["lap2"] - 0.5 * c["glg"]
    out.append(_rel_check("key_inq1", k, gap ** 2, 16.0 * q * lam[k + 1], note, rel_tol))
    q_rayleigh = lam[i - 1] - 0.25 * c["lap2"] - 0.5 * c["glg"]
    if q_rayleigh < 0:
        out.append(BoundCheck("key_inq2", k, float(gap), math.nan, math.nan, False,
                              f"infeasible; bracket={q_rayleigh:.17g}; {note}"))
    else:
        out.append(_rel_check("key_inq2", k, gap,
                              4.0 * math.sqrt(q_rayleigh) * math.sqrt(lam[k + 1]),
                              note, rel_tol))
    return out
