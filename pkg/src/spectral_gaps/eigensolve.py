"""Smallest eigenpairs of ``A u = lam B u`` by shift-invert Lanczos.

``A`` is sparse symmetric positive definite and ``B`` diagonal positive
(identity for the Euclidean problem).  The Krylov space is built for
``S = A^{-1} B``, which is self-adjoint in the ``B`` inner product and
whose largest eigenvalues ``1/lam`` are the ones we want.  Each
application of ``S`` is an inner conjugate-gradient solve.

A small block of start vectors (default 4) is used instead of a single
vector: single-vector Lanczos cannot resolve repeated eigenvalues, which
are the rule on symmetric domains.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .discretize import GeneralizedProblem, SparseOperator
from .errors import KTooLarge, NoConvergence

__all__ = [
    "Spectrum",
    "solve_spd",
    "jacobi_preconditioner",
    "amg_preconditioner",
    "smallest_eigenpairs",
    "residual_check",
    "cluster_multiplicities",
]


@dataclass(eq=False)
class Spectrum:
    """Computed eigenvalues with their residuals and optional eigenvectors.

    Attributes
    ----------
    eigenvalues : ndarray
        Ascending, repeated according to multiplicity.
    residual_norms : ndarray
        Relative residual ``||A u - lam B u|| / (lam ||u||_B)`` per pair.
    eigenvectors : ndarray or None
        ``B``-orthonormal columns, shape ``(N, K)``.
    meta : dict
        ``domain`` (DomainSpec or None), ``h``, ``n``, ``tol``, ``seed``.
    grid : Grid or None
        Grid the vectors live on; not serialized.
    """

    eigenvalues: np.ndarray
    residual_norms: np.ndarray
    eigenvectors: np.ndarray = None
    meta: dict = field(default_factory=dict)
    grid: object = None

    def __len__(self):
        return len(self.eigenvalues)

    @property
    def n(self):
        return self.meta.get("n")

    @property
    def domain(self):
        return self.meta.get("domain")

    @property
    def is_hyperbolic(self):
        d = self.domain
        return d is not None and d.is_hyperbolic


def _as_matrix(a):
    if isinstance(a, SparseOperator):
        return a.matrix
    if sp.issparse(a):
        return a.tocsr()
    return np.asarray(a, dtype=float)


def jacobi_preconditioner(A):
    """Diagonal scaling ``r -> D^{-1} r``."""
    dinv = 1.0 / np.asarray(_as_matrix(A).diagonal(), dtype=float)
    return lambda r: dinv[:, None] * r


def amg_preconditioner(A):
    """One smoothed-aggregation V-cycle (pyamg) per application.

    The cycle uses symmetric Gauss-Seidel smoothing, so it is a valid
    symmetric positive-definite preconditioner for CG.
    """
    import pyamg

    # pyamg estimates spectral radii from np.random start vectors; pin the
    # global state during setup so the hierarchy is reproducible.
    saved = np.random.get_state()
    np.random.seed(0)
    try:
        ml = pyamg.smoothed_aggregation_solver(sp.csr_matrix(_as_matrix(A)),
                                               symmetry="symmetric")
    finally:
        np.random.set_state(saved)
    op = ml.aspreconditioner(cycle="V")
    return lambda r: np.column_stack([op @ r[:, j] for j in range(r.shape[1])])


def solve_spd(A, rhs, tol=1e-10, max_iter=None, precond="jacobi"):
    """Preconditioned conjugate gradients for a symmetric positive-definite system.

    Parameters
    ----------
    A : SparseOperator, sparse matrix or ndarray
    rhs : ndarray, shape (N,) or (N, m)
        With several columns, each is solved independently (the iterations
        are simply vectorized across columns).
    tol : float
        Stop when ``||A x - rhs|| <= tol * ||rhs||`` for every column.
    max_iter : int, optional
        Defaults to ``10 * N``.
    precond : {"jacobi", "amg", None} or callable
        Preconditioner; a callable maps an ``(N, m)`` residual block to
        the preconditioned block.

    Returns
    -------
    ndarray
        Solution with the shape of ``rhs``.

    Raises
    ------
    NoConvergence
        Carries the final relative residual.
    """
    mat = _as_matrix(A)
    b = np.asarray(rhs, dtype=float)
    vector = b.ndim == 1
    if vector:
        b = b[:, None]
    nrows = mat.shape[0]
    if max_iter is None:
        max_iter = 10 * nrows
    if precond is None:
        apply_m = lambda r: r.copy()
    elif precond == "jacobi":
        apply_m = jacobi_preconditioner(mat)
    elif precond == "amg":
        apply_m = amg_preconditioner(mat)
    else:
        apply_m = precond

    def colnorm(v):
        return np.sqrt(np.einsum("ij,ij->j", v, v))

    bnorm = colnorm(b)
    bnorm[bnorm == 0] = 1.0
    thresh = tol * bnorm

    x = np.zeros_like(b)
    r = b.copy()
    it = 0
    rnorm = colnorm(r)
    while True:
        # (re)start from the true residual
        z = apply_m(r)
        p = z.copy()
        rz = np.einsum("ij,ij->j", r, z)
        while it < max_iter and np.any(rnorm > thresh):
            active = rnorm > thresh
            q = mat @ p
            pq = np.einsum("ij,ij->j", p, q)
            alpha = np.zeros_like(rz)
            np.divide(rz, pq, out=alpha, where=active & (pq != 0))
            x += alpha * p
            r -= alpha * q
            z = apply_m(r)
            rz_new = np.einsum("ij,ij->j", r, z)
            beta = np.zeros_like(rz)
            np.divide(rz_new, rz, out=beta, where=active & (rz != 0))
            p *= beta
            p += z
            rz = rz_new
            rnorm = colnorm(r)
            it += 1
        r = b - mat @ x
        rnorm = colnorm(r)
        if np.all(rnorm <= thresh):
            break
        if it >= max_iter:
            raise NoConvergence(max_iter, float(np.max(rnorm / bnorm)), "conjugate gradients")
    return x[:, 0] if vector else x


def _unpack(problem):
    if isinstance(problem, GeneralizedProblem):
        return problem.stiffness.matrix, np.asarray(problem.mass, float), problem.grid
    if isinstance(problem, SparseOperator):
        return problem.matrix, None, problem.grid
    return _as_matrix(problem), None, None


def _residuals(mat, mass, lam, vecs):
    """Relative residuals ``||A u - lam B u|| / (lam ||u||_B)``."""
    bv = vecs if mass is None else mass[:, None] * vecs
    r = mat @ vecs - bv * lam
    unorm = np.sqrt(np.einsum("ij,ij->j", vecs, bv))
    return np.linalg.norm(r, axis=0) / (unorm * np.abs(lam))


def residual_check(problem, spectrum):
    """Recompute the relative residuals of the stored eigenpairs."""
    mat, mass, _ = _unpack(problem)
    if spectrum.eigenvectors is None:
        raise ValueError("spectrum carries no eigenvectors")
    return _residuals(mat, mass, np.asarray(spectrum.eigenvalues), spectrum.eigenvectors)


def smallest_eigenpairs(problem, K, tol=1e-6, seed=0, block_size=4,
                        max_dim=None, keep_vectors=True, precond="auto"):
    """K smallest eigenpairs of a symmetric positive-definite (pencil) problem.

    Parameters
    ----------
    problem : SparseOperator or GeneralizedProblem
    K : int
        Number of eigenpairs, ``K < N``.
    tol : float
        Bound on every returned relative residual.  Inner CG solves run at
        ``tol / 100`` relative accuracy.
    seed : int
        Seed of the start block; identical seeds give identical output.
    block_size : int
        Width of the start block; must exceed the largest multiplicity
        among the wanted eigenvalues.
    max_dim : int, optional
        Krylov dimension cap (default ``max(4 (2K + 20), 2K + 100)``).
    precond : {"auto", "jacobi", "amg", None}
        Preconditioner of the inner CG solves; ``auto`` picks the
        multigrid cycle above 2000 unknowns.

    Returns
    -------
    Spectrum

    Raises
    ------
    KTooLarge
        If ``K >= N``.
    NoConvergence
        If the residuals stay above ``tol`` at the Krylov cap.
    """
    mat, mass, grid = _unpack(problem)
    nrows = mat.shape[0]
    K = int(K)
    if K < 1:
        raise ValueError("K must be positive")
    if K >= nrows:
        raise KTooLarge(f"K={K} must be smaller than the problem size N={nrows}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    bdiag = np.ones(nrows) if mass is None else mass
    min_dim = min(nrows, 2 * K + 20)
    if max_dim is None:
        max_dim = max(4 * (2 * K + 20), 2 * K + 100)
    max_dim = min(nrows, max(max_dim, min_dim))
    block = max(1, min(block_size, max_dim))
    inner_tol = tol / 100.0
    if precond == "auto":
        precond = "amg" if nrows > 2000 else "jacobi"
    if precond == "jacobi":
        precond = jacobi_preconditioner(mat)
    elif precond == "amg":
        precond = amg_preconditioner(mat)

    rng = np.random.default_rng(seed)
    V = np.zeros((nrows, max_dim))
    AV = np.zeros((nrows, max_dim))
    m = 0  # basis columns in V

    def add_column(w):
        """B-orthogonalize ``w`` against V (two passes) and append it."""
        nonlocal m
        start = np.sqrt(w @ (bdiag * w))
        for _ in range(2):
            w = w - V[:, :m] @ (V[:, :m].T @ (bdiag * w))
        nrm = np.sqrt(w @ (bdiag * w))
        while nrm <= 1e-10 * max(start, 1e-300):
            # w is numerically in span(V): continue with a fresh direction
            w = rng.standard_normal(nrows)
            start = np.sqrt(w @ (bdiag * w))
            for _ in range(2):
                w = w - V[:, :m] @ (V[:, :m].T @ (bdiag * w))
            nrm = np.sqrt(w @ (bdiag * w))
        V[:, m] = w / nrm
        AV[:, m] = mat @ V[:, m]
        m += 1

    # start in range(S): one solve damps the high-frequency content of the
    # random block, which would otherwise dominate ||A u - lam B u||
    start = rng.standard_normal((nrows, block))
    start = solve_spd(mat, bdiag[:, None] * start, tol=inner_tol,
                      max_iter=20 * nrows, precond=precond)
    for w in start.T:
        add_column(w)

    done = 0  # columns of V already multiplied by S
    lam = vecs = res = None
    while True:
        if done < m and m < max_dim:
            hi = min(done + block, m)
            rhs = bdiag[:, None] * V[:, done:hi]
            W = solve_spd(mat, rhs, tol=inner_tol, max_iter=20 * nrows,
                          precond=precond)
            for w in W.T:
                if m < max_dim:
                    add_column(w)
            done = hi
            if m < min_dim:
                continue
        # Rayleigh-Ritz for the pencil on span(V); V^T B V = I.  Projecting
        # A (not S) filters the inner-solve noise out of the Ritz vectors.
        G = V[:, :m].T @ AV[:, :m]
        theta, Y = np.linalg.eigh(0.5 * (G + G.T))
        lam, Y = theta[:K], Y[:, :K]
        vecs = V[:, :m] @ Y
        res = _residuals(mat, mass, lam, vecs)
        if np.all(res <= tol):
            break
        if m >= max_dim or done >= m:
            raise NoConvergence(m, float(np.max(res)), "shift-invert Lanczos")

    order = np.argsort(lam, kind="stable")
    lam, vecs, res = lam[order], vecs[:, order], res[order]
    # deterministic sign: largest-magnitude entry positive
    idx = np.argmax(np.abs(vecs), axis=0)
    vecs *= np.sign(vecs[idx, np.arange(K)])
    meta = {"tol": tol, "seed": seed}
    if grid is not None:
        meta.update(domain=grid.domain, h=grid.h, n=grid.n)
    return Spectrum(lam, res, vecs if keep_vectors else None, meta, grid)


def cluster_multiplicities(spectrum, rel_tol=1e-6):
    """Group an ascending spectrum into ``(value, multiplicity)`` pairs.

    A value joins the current cluster when its distance to the previous
    value is below ``rel_tol`` times the cluster mean.

    >>> cluster_multiplicities([2.0, 2.0, 2.5])
    [(2.0, 2), (2.5, 1)]
    """
    values = getattr(spectrum, "eigenvalues", spectrum)
    clusters = []
    current = []
    for v in np.asarray(values, dtype=float):
        if current and (v - current[-1]) < rel_tol * np.mean(current):
            current.append(v)
            continue
        if current:
            clusters.append((float(np.mean(current)), len(current)))
        current = [v]
    if current:
        clusters.append((float(np.mean(current)), len(current)))
    return clusters
