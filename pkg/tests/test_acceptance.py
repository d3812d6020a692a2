"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` (lines appear in the
terminal even under output capture) or ``python tests/test_acceptance.py``.
"""

import math
import os
import sys

import numpy as np
import pytest

from reference import bessel_zero_bisect
from spectral_gaps import bounds, oracles, quadrature
from spectral_gaps.cli import fit_report, main
from spectral_gaps.geometry import hyperbolic_rect

PI2 = math.pi ** 2
TIME_LIMIT = 120.0


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number} {'PASS' if ok else 'FAIL'} {title}: {detail}")
        return ok

    return emit


def _square_exact(count):
    return oracles.rectangle_spectrum(1, 1, count).eigenvalues


def _disk_exact(count):
    return oracles.disk_spectrum(1.0, count).eigenvalues


def test_criterion_1_solver_accuracy(report, square_solve_fine, disk_solve_fine):
    sq, t_sq = square_solve_fine
    dk, t_dk = disk_solve_fine
    err_sq = np.max(np.abs(sq.eigenvalues - _square_exact(20)) / _square_exact(20))
    err_dk = np.max(np.abs(dk.eigenvalues - _disk_exact(10)) / _disk_exact(10))
    ok = err_sq <= 0.01 and err_dk <= 0.02 and t_sq <= TIME_LIMIT and t_dk <= TIME_LIMIT
    report(1, "solver accuracy", ok,
           f"square max rel err {err_sq:.2e} in {t_sq:.1f}s; disk {err_dk:.2e} in {t_dk:.1f}s")
    assert ok


def test_criterion_2_bessel_oracle(report):
    j01, j11 = oracles.bessel_zero(0, 1), oracles.bessel_zero(1, 1)
    d0 = abs(j01 - bessel_zero_bisect(0, 1))
    d1 = abs(j11 - bessel_zero_bisect(1, 1))
    frozen = abs(j01 - 2.4048255577) < 1e-8 and abs(j11 - 3.8317059702) < 1e-8
    ppw = oracles.ppw_ratio_bound(2)
    sq = _square_exact(2)
    ratio = sq[1] / sq[0]
    ok = d0 < 1e-8 and d1 < 1e-8 and frozen and abs(ppw - 2.5387) < 1e-3 and ratio <= ppw
    report(2, "Bessel oracle", ok,
           f"j01={j01:.10f} j11={j11:.10f} (bisection diff {max(d0, d1):.1e}); "
           f"PPW(2)={ppw:.6f}; square ratio {ratio:.4f}")
    assert ok


SUITE = ("quadratic_sum", "mean_ratio", "hile_protter", "thompson", "ppw", "variance_gap",
         "power_growth", "theorem_gap", "proof_step_euclidean")
K_MAX = 100


def _oracle_spectra():
    count = K_MAX + 2
    return {
        "square": oracles.rectangle_spectrum(1, 1, count),
        "rectangle 2x1": oracles.rectangle_spectrum(2, 1, count),
        "cube": oracles.box_spectrum(1, 1, 1, count),
        "disk": oracles.disk_spectrum(1.0, count),
    }


def _suite_checks(spectrum):
    out = []
    for k in range(1, K_MAX + 1):
        out.extend(bounds.check_universal(spectrum, k))
        out.extend(bounds.gap_upper_bounds(spectrum, k))
    out.extend(bounds.growth_bounds(spectrum))
    out.extend(bounds.theorem_gap_bound(spectrum))
    out.extend(bounds.proof_step_euclidean(spectrum))
    return [c for c in out if c.inequality_id in SUITE and c.k <= K_MAX]


def test_criterion_3_universal_suite(report):
    violations, evaluated, worst = [], 0, math.inf
    for name, spectrum in _oracle_spectra().items():
        for c in _suite_checks(spectrum):
            if c.status == "skipped":
                continue
            evaluated += 1
            if c.status == "degenerate":
                continue
            rel = c.slack / abs(c.rhs) if c.rhs else c.slack
            worst = min(worst, rel)
            if not (c.satisfied and c.slack >= -1e-9 * abs(c.rhs)):
                violations.append((name, c.inequality_id, c.k))
    ok = not violations
    report(3, "universal inequality suite", ok,
           f"{evaluated} checks on 4 oracle spectra, k=1..{K_MAX}; {len(violations)} violations; "
           f"smallest relative slack {worst:.3g}")
    assert ok, violations[:10]


def test_criterion_4_implication_chain(report):
    broken, pairs = [], 0
    for name, spectrum in _oracle_spectra().items():
        for k in range(1, K_MAX + 1):
            c = {x.inequality_id: x.satisfied for x in bounds.check_universal(spectrum, k)}
            pairs += 1
            chain = [c["quadratic_sum"], c["mean_ratio"], c["hile_protter"], c["thompson"]]
            if any(a and not b for a, b in zip(chain, chain[1:])):
                broken.append((name, k))
    ok = not broken
    report(4, "implication chain", ok, f"{pairs} (spectrum, k) pairs, {len(broken)} breaks")
    assert ok, broken


def test_criterion_5_lemma_verification(report, square_basis_fine):
    b = square_basis_fine
    grid = b.grid
    functions = [quadrature.coordinate(grid, 0), quadrature.coordinate(grid, 1),
                 quadrature.complex_exponential(grid, 1.0, 0)]
    failed = [(g.label, k) for g in functions for k in range(1, 11)
              if not quadrature.verify_mainformula(b, g, 1, k).satisfied]
    lhs, rhs = quadrature.ibp_identity(b, functions[0], 1)
    ibp_err = abs(lhs - rhs) / abs(rhs)
    ok = not failed and ibp_err <= 0.01
    report(5, "eigenfunction gap inequality", ok,
           f"30 checks (x1, x2, exp(i x1); k=1..10), {len(failed)} failures; "
           f"integration by parts rel diff {ibp_err:.1e}")
    assert ok, failed


def test_criterion_6_hyperbolic_suite(report, hyperbolic_basis):
    basis, spec = hyperbolic_basis
    lam1 = spec.eigenvalues[0]
    steps = bounds.proof_step_hyperbolic(spec)[:10]
    r = quadrature.hyperbolic_log(basis.grid)
    ibp = quadrature.ibp_identity(basis, r, 1)
    consts = {h0: bounds.theorem_constant(lam1, 2, bounds.BoundConfig(h0_squared=h0),
                                          "hyperbolic") for h0 in (0.0, 0.5, 1.0)}
    notes = bounds.theorem_gap_bound(spec, 2, bounds.BoundConfig(h0_squared=0.5))[0].notes
    ok = (lam1 > 0.25 and all(c.satisfied for c in steps) and len(steps) == 10
          and "free parameter" in notes and consts[0.0] < consts[0.5] < consts[1.0])
    report(6, "hyperbolic suite", ok,
           f"lambda_1={lam1:.4f} > 1/4; {sum(c.satisfied for c in steps)}/10 gap checks pass; "
           f"C(H0^2=0, 0.5, 1) = " + ", ".join(f"{v:.2f}" for v in consts.values())
           + f"; ibp rel diff {abs(ibp[0] - ibp[1]) / abs(ibp[1]):.1e}")
    assert ok


def test_criterion_7_conjecture_observation(report):
    sq = oracles.rectangle_spectrum(1, 1, 500)
    rows, const, _ = fit_report(sq, (100, 200, 500))
    values = dict(rows)
    c_hat = values[500]
    trend = [values[K] for K in (100, 200, 500)]
    non_increasing = all(a >= b for a, b in zip(trend, trend[1:]))
    ok = c_hat <= const and abs(const - 96.70) < 0.01
    report(7, "gap-constant observation", ok,
           "C_hat(100, 200, 500) = " + ", ".join(f"{v:.4f}" for v in trend)
           + f" vs theorem constant {const:.2f}; trend "
           + ("non-increasing" if non_increasing else "increasing") + " (observed only)")
    assert ok


def test_criterion_8_determinism(report, tmp_path):
    args = ["solve", "--domain", "disk", "--h", str(1 / 64), "--k", "15", "--seed", "11",
            "--vectors"]
    codes = [main(args + ["--out", str(tmp_path / f"run{i}.json")]) for i in (1, 2)]
    same_doc = (tmp_path / "run1.json").read_bytes() == (tmp_path / "run2.json").read_bytes()
    same_vec = (tmp_path / "run1.vec").read_bytes() == (tmp_path / "run2.vec").read_bytes()
    ok = codes == [0, 0] and same_doc and same_vec
    report(8, "determinism", ok, f"exit codes {codes}; spectrum files identical: {same_doc}; "
           f"eigenvector files identical: {same_vec}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([os.path.abspath(__file__), "-q", "-p", "no:cacheprovider",
                          "-o", "addopts="]))
