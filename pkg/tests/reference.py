"""Independent reference computations used by the tests.

Nothing here imports the package: dense Jacobi rotations for symmetric
eigenvalues, Gaussian elimination, and a high-precision Bessel series with
bisection for zeros.  They are slow and only meant for small inputs.
"""

import math

import mpmath
import numpy as np


def jacobi_eigenvalues(a, tol=1e-13, max_sweeps=100):
    """Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations."""
    a = np.array(a, dtype=float)
    n = len(a)
    for _ in range(max_sweeps):
        off = math.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off <= tol * max(1.0, np.abs(np.diag(a)).max()):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q], rot[q, p] = s, -s
                a = rot.T @ a @ rot
    return np.sort(np.diag(a))


def gauss_solve(a, b):
    """Solve ``a x = b`` by Gaussian elimination with partial pivoting."""
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    n = len(a)
    for col in range(n):
        piv = col + int(np.argmax(np.abs(a[col:, col])))
        a[[col, piv]] = a[[piv, col]]
        b[[col, piv]] = b[[piv, col]]
        for row in range(col + 1, n):
            f = a[row, col] / a[col, col]
            a[row, col:] -= f * a[col, col:]
            b[row] -= f * b[col]
    x = np.zeros_like(b)
    for row in range(n - 1, -1, -1):
        x[row] = (b[row] - a[row, row + 1:] @ x[row + 1:]) / a[row, row]
    return x


def bessel_series(p, x, digits=50):
    """``J_p(x)`` from the ascending series in 50-digit arithmetic."""
    with mpmath.workdps(digits):
        p = mpmath.mpf(p)
        x = mpmath.mpf(x)
        term = (x / 2) ** p / mpmath.gamma(p + 1)
        total = term
        m = 0
        while True:
            m += 1
            term *= -(x / 2) ** 2 / (m * (m + p))
            total += term
            if m > x and abs(term) < mpmath.mpf(10) ** (-digits + 5):
                return total


def bessel_zero_bisect(p, k, step=0.1, tol=1e-13):
    """k-th positive zero of ``J_p`` by scanning and bisection."""
    found = 0
    lo = 1e-6
    flo = bessel_series(p, lo)
    while True:
        hi = lo + step
        fhi = bessel_series(p, hi)
        if flo * fhi < 0:
            found += 1
            if found == k:
                break
        lo, flo = hi, fhi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fmid = bessel_series(p, mid)
        if flo * fmid <= 0:
            hi = mid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


def discrete_square_eigenvalues(h, count):
    """Exact eigenvalues of the 5-point Dirichlet Laplacian on the unit square."""
    m = int(round(1.0 / h))
    vals = [2.0 / h ** 2 * (2.0 - math.cos(p * math.pi * h) - math.cos(q * math.pi * h))
            for p in range(1, m) for q in range(1, m)]
    return np.sort(vals)[:count]
