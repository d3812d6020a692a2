"""Eigenvalue inequalities evaluated on a concrete spectrum.

Every check is normalized to the form ``lhs <= rhs`` and reported as a
:class:`BoundCheck`.  Inequalities stated the other way round (the
Hile-Protter sum) are flipped, and quadratic forms that are "<= 0" are
split into their two natural sides so the slack keeps a meaning.

Tolerances
----------
A check passes when ``slack >= -abs_tol`` with::

    abs_tol = max(|lhs|, |rhs|) * max(1e-9, 10 * r)

where ``r`` is the largest relative eigen-residual among the eigenvalues
the check reads (zero for oracle spectra).  Both sides of every inequality
are homogeneous of the same degree in the eigenvalues, so a relative
tolerance is scale invariant.
"""

from dataclasses import dataclass, field
import csv
import math
from typing import Callable, Optional, Union

import numpy as np

from .errors import Infeasible, TooFewEigenvalues

__all__ = [
    "BoundConfig",
    "BoundCheck",
    "default_c0",
    "check_universal",
    "gap_upper_bounds",
    "growth_bounds",
    "theorem_constant",
    "theorem_gap_bound",
    "proof_step_euclidean",
    "proof_step_hyperbolic",
    "fit_gap_constant",
    "check_all",
    "write_checks_csv",
    "read_checks_csv",
    "summarize",
    "CHECK_GROUPS",
]

UNIVERSAL = ("ppw", "thompson", "hile_protter", "quadratic_sum", "mean_ratio",
             "curvature_quadratic_sum")
GAPS = ("variance_gap", "curvature_variance_gap", "pinched_gap")
GROWTH = ("power_growth", "curvature_power_growth")
CHECK_GROUPS = {
    "universal": UNIVERSAL,
    "gaps": GAPS,
    "growth": GROWTH,
    "theorem": ("theorem_gap",),
    "proof": ("proof_step_euclidean", "proof_step_hyperbolic"),
}
ALL_IDS = tuple(i for group in CHECK_GROUPS.values() for i in group)

REL_FLOOR = 1e-9
H0_MISSING = "skipped; H0^2 must be given for curved geometries"
CSV_COLUMNS = ["inequality_id", "k", "lhs", "rhs", "slack", "satisfied", "notes"]


def default_c0(n):
    """Upper bound ``1 + 4/n`` for the growth constant ``C0(n)``."""
    return 1.0 + 4.0 / n


@dataclass(frozen=True)
class BoundConfig:
    """Constants the inequalities depend on.

    Parameters
    ----------
    c0_policy : callable, float or "upper"
        Rule for ``C0(n)``.  ``"upper"`` (default) is ``1 + 4/n``; a float
        is used as is for every ``n``.
    h0_squared : float or None
        Squared mean-curvature constant ``H0^2`` of the ambient immersion.
        ``None`` means zero on Euclidean domains; hyperbolic and pinched
        geometries need an explicit value, and the checks that depend on
        it are skipped without one.
    curvature : (a, b) or None
        Sectional-curvature pinching ``-a^2 <= Sec <= -b^2``.
    """

    c0_policy: Union[str, float, Callable[[int], float]] = "upper"
    h0_squared: Optional[float] = None
    curvature: Optional[tuple] = None

    def __post_init__(self):
        if self.h0_squared is not None and self.h0_squared < 0:
            raise ValueError("h0_squared must be nonnegative")
        if self.curvature is not None:
            a, b = self.curvature
            if not a >= b >= 0:
                raise ValueError("curvature needs a >= b >= 0")
            object.__setattr__(self, "curvature", (float(a), float(b)))
        if isinstance(self.c0_policy, str) and self.c0_policy != "upper":
            raise ValueError(f"unknown c0 policy {self.c0_policy!r}")
        if isinstance(self.c0_policy, (int, float)) and self.c0_policy < 1:
            raise ValueError("C0(n) must be at least 1")

    def c0(self, n):
        if isinstance(self.c0_policy, str):
            value = default_c0(n)
        elif callable(self.c0_policy):
            value = float(self.c0_policy(n))
        else:
            value = float(self.c0_policy)
        if value < 1:
            raise ValueError(f"C0({n}) = {value} is below 1")
        return value

    def h0(self, curved=False):
        """``H0^2`` for the geometry, or None if it must be given and was not."""
        if self.h0_squared is not None:
            return float(self.h0_squared)
        return None if curved or self.curvature is not None else 0.0

    def policy_note(self, n):
        if isinstance(self.c0_policy, str):
            return f"C0=1+4/n={self.c0(n):.6g}"
        return f"C0={self.c0(n):.6g}"

    def to_dict(self):
        c0 = self.c0_policy if not callable(self.c0_policy) else "callable"
        return {"c0_policy": c0, "h0_squared": self.h0_squared,
                "curvature": list(self.curvature) if self.curvature else None}

    @classmethod
    def from_dict(cls, data):
        curv = data.get("curvature")
        h0 = data.get("h0_squared")
        return cls(data.get("c0_policy", "upper"), None if h0 is None else float(h0),
                   tuple(curv) if curv else None)


@dataclass
class BoundCheck:
    """One inequality ``lhs <= rhs`` evaluated at index ``k``."""

    inequality_id: str
    k: int
    lhs: float
    rhs: float
    slack: float
    satisfied: bool
    notes: str = ""

    @property
    def status(self):
        if "skipped" in self.notes:
            return "skipped"
        if "infeasible" in self.notes:
            return "infeasible"
        if "degenerate" in self.notes:
            return "degenerate"
        return "ok" if self.satisfied else "violated"

    def to_row(self):
        return [self.inequality_id, str(self.k), f"{self.lhs:.17g}", f"{self.rhs:.17g}",
                f"{self.slack:.17g}", "true" if self.satisfied else "false", self.notes]


# ---------------------------------------------------------------------------
# helpers


@dataclass
class _View:
    lam: np.ndarray
    res: np.ndarray
    n: int
    hyperbolic: bool = False
    extra: dict = field(default_factory=dict)

    def rel_noise(self, upto):
        r = self.res[:upto]
        return float(r.max()) if len(r) else 0.0


def _view(spectrum, n=None):
    if hasattr(spectrum, "eigenvalues"):
        lam = np.asarray(spectrum.eigenvalues, dtype=float)
        res = getattr(spectrum, "residual_norms", None)
        res = np.zeros(len(lam)) if res is None else np.asarray(res, dtype=float)
        n = n if n is not None else spectrum.n
        hyp = bool(getattr(spectrum, "is_hyperbolic", False))
    else:
        lam = np.asarray(spectrum, dtype=float)
        res = np.zeros(len(lam))
        hyp = False
    if n is None:
        raise ValueError("dimension n unknown; pass n explicitly")
    return _View(lam, res, int(n), hyp)


def _need(view, count, what):
    if len(view.lam) < count:
        raise TooFewEigenvalues(
            f"{what} needs {count} eigenvalues, spectrum has {len(view.lam)}")


def _check(ident, k, lhs, rhs, noise, notes=""):
    lhs, rhs = float(lhs), float(rhs)
    scale = max(abs(lhs), abs(rhs))
    tol = scale * max(REL_FLOOR, 10.0 * noise)
    slack = rhs - lhs
    extra = f"abs_tol={tol:.3g}"
    notes = f"{notes}; {extra}" if notes else extra
    return BoundCheck(ident, int(k), lhs, rhs, slack, bool(slack >= -tol), notes)


def _nan_check(ident, k, notes, lhs=math.nan):
    return BoundCheck(ident, int(k), float(lhs), math.nan, math.nan, False, notes)


# ---------------------------------------------------------------------------
# universal inequalities


def check_universal(spectrum, k, config=BoundConfig(), n=None):
    """Classical universal inequalities at index ``k``.

    Returns checks for PPW (two-dimensional only), Thompson, Hile-Protter,
    the quadratic-sum and mean-ratio inequalities, and the mean-curvature
    version of the quadratic sum with ``H0^2`` from ``config``.

    The quadratic sum is stored rearranged as
    ``sum (l_{k+1} - l_i)^2 <= (4/n) sum (l_{k+1} - l_i) l_i``, which makes
    it literally the ``H0^2 = 0`` case of the curvature version.

    Raises
    ------
    TooFewEigenvalues
        If fewer than ``k + 1`` eigenvalues are available.

    Examples
    --------
    >>> from spectral_gaps.oracles import rectangle_spectrum
    >>> sq = rectangle_spectrum(1, 1, 10)
    >>> [c.satisfied for c in check_universal(sq, 1)]
    [True, True, True, True, True, True]
    """
    v = _view(spectrum, n)
    k = int(k)
    if k < 1:
        raise ValueError("k starts at 1")
    _need(v, k + 1, "universal inequalities")
    lam = v.lam[:k]
    nxt = v.lam[k]
    gap = nxt - v.lam[k - 1]
    total = lam.sum()
    noise = v.rel_noise(k + 1)
    dim = v.n
    out = []

    if dim == 2:
        out.append(_check("ppw", k, gap, 2.0 / k * total, noise))
    else:
        out.append(_nan_check("ppw", k, "skipped; PPW stated for n=2", gap))

    out.append(_check("thompson", k, gap, 4.0 / (dim * k) * total, noise))

    diffs = nxt - lam
    if np.any(diffs <= 0):
        out.append(BoundCheck("hile_protter", k, dim * k / 4.0, math.nan, math.nan, True,
                              "degenerate; tie l_{k+1} = l_i, inequality vacuous"))
    else:
        out.append(_check("hile_protter", k, dim * k / 4.0, np.sum(lam / diffs), noise))

    out.append(_check("quadratic_sum", k, np.sum(diffs ** 2), 4.0 / dim * np.sum(diffs * lam),
                      noise, "rearranged"))
    out.append(_check("mean_ratio", k, nxt, (1.0 + 4.0 / dim) * total / k, noise))

    h0 = config.h0(v.hyperbolic)
    if h0 is None:
        out.append(_nan_check("curvature_quadratic_sum", k, H0_MISSING))
    else:
        shift = dim ** 2 / 4.0 * h0
        out.append(_check("curvature_quadratic_sum", k, np.sum(diffs ** 2),
                          4.0 / dim * np.sum(diffs * (lam + shift)), noise, f"H0^2={h0:.6g}"))
    return out


def _gap_from_bracket(ident, k, gap, bracket, noise, notes):
    if bracket < 0:
        return _nan_check(ident, k, f"infeasible; bracket={bracket:.17g}; {notes}", gap)
    return _check(ident, k, gap, 2.0 * math.sqrt(bracket), noise, notes)


def gap_upper_bounds(spectrum, k, config=BoundConfig(), n=None):
    """Gap bounds ``l_{k+1} - l_k <= 2 sqrt(bracket)`` at index ``k``.

    The variance bracket is ``((2/n) m)^2 - (1 + 4/n) s``, with ``m``
    the mean and ``s`` the population variance of ``l_1..l_k``.  The
    mean-curvature version adds ``(n/2) H0^2`` to ``(2/n) m``.  With a
    curvature pinching in ``config`` the pinched-curvature bound is also
    emitted; it uses ``(2 (m + c))^2 - 5 s`` with
    ``c = -(n-1)^2 b^2/4 + (n-1)(a^2-b^2)/2``.

    A negative bracket gives an ``infeasible`` check carrying the bracket
    value instead of a NaN bound.
    """
    v = _view(spectrum, n)
    k = int(k)
    _need(v, k + 1, "gap bounds")
    lam = v.lam[:k]
    gap = v.lam[k] - v.lam[k - 1]
    mean = lam.mean()
    var = np.mean((lam - mean) ** 2)
    noise = v.rel_noise(k + 1)
    dim = v.n

    out = [_gap_from_bracket("variance_gap", k, gap,
                             (2.0 / dim * mean) ** 2 - (1.0 + 4.0 / dim) * var, noise, "")]
    h0 = config.h0(v.hyperbolic)
    if h0 is None:
        out.append(_nan_check("curvature_variance_gap", k, H0_MISSING, gap))
    else:
        out.append(_gap_from_bracket(
            "curvature_variance_gap", k, gap,
            (2.0 / dim * mean + dim / 2.0 * h0) ** 2 - (1.0 + 4.0 / dim) * var,
            noise, f"H0^2={h0:.6g}"))
    if config.curvature is not None:
        a, b = config.curvature
        shift = -(dim - 1) ** 2 / 4.0 * b * b + (dim - 1) / 2.0 * (a * a - b * b)
        # shifted values mu_i = l_i + shift satisfy the factor-4 quadratic-sum form
        out.append(_gap_from_bracket("pinched_gap", k, gap, (2.0 * (mean + shift)) ** 2 - 5.0 * var,
                                     noise, f"a={a:.6g}; b={b:.6g}"))
    return out


def growth_bounds(spectrum, config=BoundConfig(), n=None):
    """``l_{k+1} <= C0 k^(2/n) l_1`` and its ``H0^2``-shifted form, every k."""
    v = _view(spectrum, n)
    _need(v, 1, "growth bounds")
    dim = v.n
    c0 = config.c0(dim)
    h0 = config.h0(v.hyperbolic)
    note = config.policy_note(dim)
    out = []
    for k in range(1, len(v.lam)):
        noise = max(v.res[0], v.res[k])
        factor = c0 * k ** (2.0 / dim)
        out.append(_check("power_growth", k, v.lam[k], factor * v.lam[0], noise, note))
        if h0 is None:
            out.append(_nan_check("curvature_power_growth", k, H0_MISSING, v.lam[k]))
            continue
        shift = dim ** 2 / 4.0 * h0
        out.append(_check("curvature_power_growth", k, v.lam[k] + shift,
                          factor * (v.lam[0] + shift), noise, f"{note}; H0^2={h0:.6g}"))
    return out


# ---------------------------------------------------------------------------
# gap-growth theorem


def theorem_constant(lam1, n, config=BoundConfig(), geometry="euclidean"):
    """Constant ``C`` of the gap bound ``l_{k+1} - l_k <= C k^(1/n)``.

    Parameters
    ----------
    lam1 : float
        First eigenvalue.
    n : int
        Dimension.
    config : BoundConfig
    geometry : {"euclidean", "hyperbolic", "pinched"}
        ``euclidean``: ``4 l_1 sqrt(C0/n)``.
        ``hyperbolic``: ``4 sqrt(C0 (l_1 - (n-1)^2/4)(l_1 + n^2 H0^2/4))``.
        ``pinched``: as hyperbolic with ``(n-1)^2 b^2/4 - (a^2-b^2)/4``
        in place of ``(n-1)^2/4``; needs ``config.curvature``.

    Returns
    -------
    float

    Raises
    ------
    Infeasible
        If the first factor under the square root is negative.
    ValueError
        For a curved geometry without an explicit ``h0_squared``.

    Examples
    --------
    >>> round(theorem_constant(10.0, 2, BoundConfig(h0_squared=0.0), "hyperbolic"), 2)
    68.41
    """
    c0 = config.c0(n)
    if geometry == "euclidean":
        return 4.0 * lam1 * math.sqrt(c0 / n)
    if geometry == "hyperbolic":
        first = lam1 - (n - 1) ** 2 / 4.0
    elif geometry == "pinched":
        if config.curvature is None:
            raise ValueError("pinched constant needs config.curvature")
        a, b = config.curvature
        first = lam1 - (n - 1) ** 2 / 4.0 * b * b + (a * a - b * b) / 4.0
    else:
        raise ValueError(f"unknown geometry {geometry!r}")
    if first < 0:
        raise Infeasible(f"l_1 too small for the {geometry} constant (factor {first:.6g})")
    h0 = config.h0(curved=True)
    if h0 is None:
        raise ValueError(f"the {geometry} constant needs an explicit h0_squared")
    return 4.0 * math.sqrt(c0 * first * (lam1 + n * n / 4.0 * h0))


def theorem_gap_bound(spectrum, n=None, config=BoundConfig()):
    """``l_{k+1} - l_k <= C k^(1/n)`` for every available k.

    The constant follows the spectrum: pinched-curvature when
    ``config.curvature`` is set, the half-plane constant for hyperbolic
    spectra, the Euclidean constant otherwise.  For the two curved cases
    ``H0^2`` is a free parameter and the notes say so.  An infeasible
    constant yields a single ``infeasible`` check.
    """
    v = _view(spectrum, n)
    _need(v, 2, "theorem gap bound")
    dim = v.n
    if config.curvature is not None:
        geometry = "pinched"
    elif v.hyperbolic:
        geometry = "hyperbolic"
    else:
        geometry = "euclidean"
    note = f"{geometry}; {config.policy_note(dim)}"
    if geometry != "euclidean":
        h0 = config.h0(curved=True)
        if h0 is None:
            return [_nan_check("theorem_gap", 1, f"{H0_MISSING}; {note}")]
        note += f"; H0^2={h0:.6g} (free parameter)"
    try:
        const = theorem_constant(v.lam[0], dim, config, geometry)
    except Infeasible as exc:
        return [_nan_check("theorem_gap", 1, f"infeasible; {exc}; {note}")]
    note += f"; C={const:.10g}"
    out = []
    for k in range(1, len(v.lam)):
        noise = max(v.res[0], v.res[k - 1], v.res[k])
        out.append(_check("theorem_gap", k, v.lam[k] - v.lam[k - 1],
                          const * k ** (1.0 / dim), noise, note))
    return out


def proof_step_euclidean(spectrum, n=None):
    """``n (l_{k+2} - l_{k+1})^2 <= 16 l_1 l_{k+2}`` for ``k = 1 .. K-2``.

    This is the coordinate-function estimate summed over the axes.
    """
    v = _view(spectrum, n)
    _need(v, 3, "euclidean proof step")
    lam = v.lam
    out = []
    for k in range(1, len(lam) - 1):
        noise = max(v.res[0], v.res[k], v.res[k + 1])
        out.append(_check("proof_step_euclidean", k, v.n * (lam[k + 1] - lam[k]) ** 2,
                          16.0 * lam[0] * lam[k + 1], noise))
    return out


def proof_step_hyperbolic(spectrum):
    """``l_{k+2} - l_{k+1} <= 4 sqrt(l_1 - 1/4) sqrt(l_{k+2})`` on the half-plane.

    Raises
    ------
    Infeasible
        If ``l_1 <= 1/4``, which cannot happen for an exact half-plane
        spectrum and therefore signals a discretization problem.
    """
    v = _view(spectrum, 2)
    _need(v, 3, "hyperbolic proof step")
    lam = v.lam
    if lam[0] <= 0.25:
        raise Infeasible(f"l_1 = {lam[0]:.6g} <= 1/4")
    root = math.sqrt(lam[0] - 0.25)
    out = []
    for k in range(1, len(lam) - 1):
        noise = max(v.res[0], v.res[k], v.res[k + 1])
        out.append(_check("proof_step_hyperbolic", k, lam[k + 1] - lam[k],
                          4.0 * root * math.sqrt(lam[k + 1]), noise))
    return out


def fit_gap_constant(spectrum, n=None):
    """Smallest ``C`` with ``l_{k+1} - l_k <= C k^(1/n)`` on the given prefix.

    >>> fit_gap_constant([1.0, 2.0], n=2)
    1.0
    """
    v = _view(spectrum, n)
    _need(v, 2, "gap-constant fit")
    k = np.arange(1, len(v.lam))
    return float(np.max(np.diff(v.lam) / k ** (1.0 / v.n)))


# ---------------------------------------------------------------------------
# dispatch and serialization


def _selected(which):
    if which in (None, "all"):
        return set(ALL_IDS)
    chosen = set()
    for token in str(which).split(","):
        token = token.strip()
        if token in CHECK_GROUPS:
            chosen.update(CHECK_GROUPS[token])
        elif token in ALL_IDS:
            chosen.add(token)
        elif token:
            raise ValueError(f"unknown inequality {token!r}")
    return chosen


def check_all(spectrum, config=BoundConfig(), which="all", n=None):
    """Evaluate every selected inequality at every index the spectrum allows."""
    v = _view(spectrum, n)
    chosen = _selected(which)
    out = []
    K = len(v.lam)
    for k in range(1, K):
        if chosen & set(UNIVERSAL):
            out.extend(c for c in check_universal(spectrum, k, config, n=v.n)
                       if c.inequality_id in chosen)
        if chosen & set(GAPS):
            out.extend(c for c in gap_upper_bounds(spectrum, k, config, n=v.n)
                       if c.inequality_id in chosen)
    if chosen & set(GROWTH):
        out.extend(c for c in growth_bounds(spectrum, config, n=v.n)
                   if c.inequality_id in chosen)
    if "theorem_gap" in chosen and K >= 2:
        out.extend(theorem_gap_bound(spectrum, v.n, config))
    if "proof_step_euclidean" in chosen and not v.hyperbolic and K >= 3:
        out.extend(proof_step_euclidean(spectrum, v.n))
    if "proof_step_hyperbolic" in chosen and v.hyperbolic and K >= 3:
        try:
            out.extend(proof_step_hyperbolic(spectrum))
        except Infeasible as exc:
            out.append(_nan_check("proof_step_hyperbolic", 1, f"infeasible; {exc}"))
    return out


def summarize(checks):
    """Counts per status: ok, violated, degenerate, skipped, infeasible."""
    counts = {"ok": 0, "violated": 0, "degenerate": 0, "skipped": 0, "infeasible": 0}
    for c in checks:
        counts[c.status] += 1
    return counts


def write_checks_csv(checks, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for c in checks:
            writer.writerow(c.to_row())


def read_checks_csv(path):
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        for row in reader:
            out.append(BoundCheck(row["inequality_id"], int(row["k"]), float(row["lhs"]),
                                  float(row["rhs"]), float(row["slack"]),
                                  row["satisfied"] == "true", row["notes"]))
    return out
