"""Reference spectra: separable shapes, disks, Weyl's law, the PPW ratio.

Everything here is closed form or asymptotic; no discretization is
involved.  Bessel functions of the first kind are evaluated in-house for
the orders the disk and ball spectra need (integers 0..40 and the
half-integers 1/2, 3/2).
"""

from dataclasses import dataclass, field
import heapq
import math

import numpy as np

from .errors import RangeError, UnsupportedOrder

__all__ = [
    "OracleSpectrum",
    "rectangle_spectrum",
    "box_spectrum",
    "bessel_j",
    "bessel_zero",
    "disk_spectrum",
    "weyl_estimate",
    "weyl_spectrum",
    "ppw_ratio_bound",
    "unit_ball_volume",
]

SUPPORTED_ORDERS = frozenset([float(m) for m in range(41)] + [0.5, 1.5])
MAX_ARGUMENT = 200.0
_SERIES_LIMIT = 12.0


@dataclass(eq=False)
class OracleSpectrum:
    """Exact or asymptotic eigenvalues, ascending, multiplicities expanded."""

    eigenvalues: np.ndarray
    provenance: str
    exact: bool
    n: int
    domain: object = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.eigenvalues)

    @property
    def residual_norms(self):
        return np.zeros(len(self.eigenvalues))

    @property
    def is_hyperbolic(self):
        return False


def _lattice_spectrum(inv_sq, K):
    """K smallest values of pi^2 * sum(inv_sq * m^2) over positive integers.

    Lazy best-first enumeration: a value only grows when an index grows, so
    popping from a heap seeded with (1, ..., 1) yields values in order, and
    every unexplored candidate exceeds the last popped one.
    """
    dim = len(inv_sq)
    inv_sq = np.asarray(inv_sq, dtype=float)

    def value(idx):
        return math.pi ** 2 * float(np.dot(inv_sq, np.square(idx)))

    start = (1,) * dim
    heap = [(value(start), start)]
    seen = {start}
    out = []
    while len(out) < K:
        val, idx = heapq.heappop(heap)
        out.append(val)
        for axis in range(dim):
            nxt = idx[:axis] + (idx[axis] + 1,) + idx[axis + 1:]
            if nxt not in seen:
                seen.add(nxt)
                heapq.heappush(heap, (value(nxt), nxt))
    return np.array(out)


def rectangle_spectrum(a, b, K):
    """First K Dirichlet eigenvalues of the ``a x b`` rectangle.

    >>> rectangle_spectrum(1, 1, 4).eigenvalues / np.pi**2
    array([2., 5., 5., 8.])
    """
    from .geometry import rectangle

    vals = _lattice_spectrum([1.0 / a ** 2, 1.0 / b ** 2], int(K))
    return OracleSpectrum(vals, "rectangle", True, 2, rectangle(a, b))


def box_spectrum(a, b, c, K):
    """First K Dirichlet eigenvalues of the ``a x b x c`` box."""
    from .geometry import box

    vals = _lattice_spectrum([1.0 / a ** 2, 1.0 / b ** 2, 1.0 / c ** 2], int(K))
    return OracleSpectrum(vals, "box", True, 3, box(a, b, c))


# ---------------------------------------------------------------------------
# Bessel functions of the first kind


def _check_order(p):
    p = float(p)
    if p not in SUPPORTED_ORDERS:
        raise UnsupportedOrder(f"Bessel order {p} is not supported")
    return p


def _series(p, x):
    term = (0.5 * x) ** p / math.gamma(p + 1.0)
    total = term
    q = 0.25 * x * x
    m = 0
    while True:
        m += 1
        term *= -q / (m * (m + p))
        total += term
        if m > 0.5 * x and abs(term) <= 1e-17 * max(abs(total), 1e-300):
            return total


def _miller(p, x):
    """Downward recurrence from a high order, normalized by an exact identity.

    Integer orders use ``J_0 + 2 sum_k J_2k = 1``; half-integer orders use
    the closed forms of ``J_{1/2}`` and ``J_{-1/2}``.
    """
    frac = p - math.floor(p)
    start = int(x + 20 + 12 * x ** (1.0 / 3.0) + p) + 2
    start += start % 2
    j_next, j_cur = 0.0, 1e-300
    target = None
    even_sum = 0.0
    nu = frac + start
    # j_cur holds J~_nu; each step produces J~_{nu-1}
    while True:
        if abs(nu - p) < 1e-9:
            target = j_cur
        if frac == 0.0 and int(round(nu)) % 2 == 0 and nu > 0:
            even_sum += j_cur
        if nu <= frac + 1e-9:
            break
        j_prev = (2.0 * nu / x) * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        nu -= 1.0
        if abs(j_cur) > 1e250:
            j_next *= 1e-250
            j_cur *= 1e-250
            even_sum *= 1e-250
            if target is not None:
                target *= 1e-250
    # j_cur = J~_frac, j_next = J~_{frac+1}
    if frac == 0.0:
        norm = j_cur + 2.0 * even_sum
        return target / norm
    j_minus = (2.0 * frac / x) * j_cur - j_next  # J~_{-1/2}
    s = math.sqrt(2.0 / (math.pi * x))
    exact_half, exact_minus = s * math.sin(x), s * math.cos(x)
    if abs(exact_half) >= abs(exact_minus):
        return target * exact_half / j_cur
    return target * exact_minus / j_minus


def _jv(p, x):
    if x == 0.0:
        return 1.0 if p == 0.0 else 0.0
    if x <= _SERIES_LIMIT:
        return _series(p, x)
    return _miller(p, x)


def bessel_j(p, x):
    """Bessel function of the first kind ``J_p(x)``.

    Ascending power series for ``x <= 12``, Miller's downward recurrence
    beyond.  Absolute accuracy is about ``1e-12``.

    Parameters
    ----------
    p : float
        Order, an integer in ``0..40`` or one of ``1/2``, ``3/2``.
    x : float
        Argument in ``[0, 200]``.

    Raises
    ------
    UnsupportedOrder
    RangeError
        For ``x`` outside ``[0, 200]``.
    """
    p = _check_order(p)
    x = float(x)
    if not (0.0 <= x <= MAX_ARGUMENT):
        raise RangeError(f"bessel_j argument {x} outside [0, {MAX_ARGUMENT}]")
    return _jv(p, x)


def _jv_prime(p, x):
    return (p / x) * _jv(p, x) - _jv(p + 1.0, x)


def _mcmahon(p, k):
    beta = (k + 0.5 * p - 0.25) * math.pi
    return beta - (4.0 * p * p - 1.0) / (8.0 * beta)


def _refine_zero(p, lo, hi, guess):
    """Newton iteration kept inside the sign-change bracket ``[lo, hi]``."""
    flo = _jv(p, lo)
    x = guess if lo < guess < hi else 0.5 * (lo + hi)
    for _ in range(100):
        fx = _jv(p, x)
        if fx == 0.0:
            return x
        if (fx > 0) == (flo > 0):
            lo, flo = x, fx
        else:
            hi = x
        d = _jv_prime(p, x)
        step = fx / d if d != 0 else np.inf
        cand = x - step
        if not (lo < cand < hi):
            cand = 0.5 * (lo + hi)
        if abs(cand - x) <= 1e-15 * cand or hi - lo <= 1e-15 * hi:
            return cand
        x = cand
    return x


_ZERO_CACHE = {}


def bessel_zero(p, k):
    """k-th positive zero ``j_{p,k}`` of ``J_p``.

    Zeros are bracketed by scanning sign changes in unit steps from the
    previous zero (consecutive zeros are more than 2 apart), then polished
    by bisection-safeguarded Newton started from McMahon's asymptotic
    estimate.

    >>> round(bessel_zero(0, 1), 10)
    2.4048255577
    """
    p = _check_order(p)
    k = int(k)
    if k < 1:
        raise ValueError("zero index k starts at 1")
    zeros = _ZERO_CACHE.setdefault(p, [])
    while len(zeros) < k:
        idx = len(zeros) + 1
        lo = zeros[-1] + 1e-6 if zeros else max(p, 1e-3)
        flo = _jv(p, lo)
        while True:
            hi = lo + 1.0
            fhi = _jv(p, hi)
            if (flo > 0) != (fhi > 0) or fhi == 0.0:
                break
            lo, flo = hi, fhi
        zeros.append(_refine_zero(p, lo, hi, _mcmahon(p, idx)))
    return zeros[k - 1]


def disk_spectrum(radius, K):
    """First K Dirichlet eigenvalues of a disk, ``(j_{m,k} / radius)^2``.

    Modes with ``m >= 1`` are doubly degenerate.  The enumeration walks the
    ``(m, k)`` index lattice best-first, using that ``j_{m,k}`` increases in
    both indices.
    """
    from .geometry import disk

    K = int(K)
    heap = [(bessel_zero(0, 1), 0, 1)]
    out = []
    while len(out) < K:
        j, m, k = heapq.heappop(heap)
        lam = (j / radius) ** 2
        out.extend([lam] * (1 if m == 0 else 2))
        heapq.heappush(heap, (bessel_zero(m, k + 1), m, k + 1))
        if k == 1:
            heapq.heappush(heap, (bessel_zero(m + 1, 1), m + 1, 1))
    return OracleSpectrum(np.array(out[:K]), "disk", True, 2, disk(radius))


def unit_ball_volume(n):
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def weyl_estimate(n, volume, k):
    """Leading-order Weyl value ``4 pi^2 (k / (omega_n |Omega|))^(2/n)``.

    >>> round(weyl_estimate(2, 1.0, 100), 2)
    1256.64
    """
    if n not in (2, 3):
        raise ValueError("Weyl estimate implemented for n = 2, 3")
    return 4.0 * math.pi ** 2 * (k / (unit_ball_volume(n) * volume)) ** (2.0 / n)


def weyl_spectrum(n, volume, K):
    vals = np.array([weyl_estimate(n, volume, k) for k in range(1, int(K) + 1)])
    return OracleSpectrum(vals, "weyl", False, n, None, {"volume": volume})


def ppw_ratio_bound(n):
    """``lambda_2 / lambda_1`` of the unit ball, ``(j_{n/2,1} / j_{n/2-1,1})^2``."""
    if n not in (2, 3):
        raise UnsupportedOrder(f"PPW ratio implemented for n = 2, 3, got {n}")
    return (bessel_zero(n / 2.0, 1) / bessel_zero(n / 2.0 - 1.0, 1)) ** 2
