import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from numpy.testing import assert_allclose

from spectral_gaps import bounds, oracles
from spectral_gaps.bounds import BoundConfig
from spectral_gaps.eigensolve import Spectrum
from spectral_gaps.errors import Infeasible, TooFewEigenvalues

PI2 = math.pi ** 2
SQUARE = oracles.rectangle_spectrum(1, 1, 600)


def by_id(checks):
    return {c.inequality_id: c for c in checks}


def test_square_k1_examples():
    c = by_id(bounds.check_universal(SQUARE, 1))
    assert_allclose(c["hile_protter"].lhs, 0.5)
    assert_allclose(c["hile_protter"].rhs, 2 / 3)
    assert_allclose([c["mean_ratio"].lhs, c["mean_ratio"].rhs], [5 * PI2, 6 * PI2])
    assert all(x.satisfied for x in c.values())


def test_zero_gap_ppw():
    c = by_id(bounds.check_universal(SQUARE, 2))  # lambda_3 = lambda_2
    assert c["ppw"].lhs == 0 and c["ppw"].rhs > 0 and c["ppw"].satisfied


def test_hile_protter_tie_is_degenerate():
    c = by_id(bounds.check_universal([1.0, 2.0, 2.0], 2, n=2))
    assert c["hile_protter"].status == "degenerate"
    assert c["hile_protter"].satisfied
    assert np.isnan(c["hile_protter"].rhs) and np.isnan(c["hile_protter"].slack)


def test_ppw_skipped_in_three_dimensions():
    cube = oracles.box_spectrum(1, 1, 1, 5)
    c = by_id(bounds.check_universal(cube, 1))["ppw"]
    assert c.status == "skipped" and "PPW stated for n=2" in c.notes


def test_variance_gap_examples():
    c = by_id(bounds.gap_upper_bounds(SQUARE, 1))
    assert_allclose(c["variance_gap"].rhs, 4 * PI2)
    assert_allclose(c["variance_gap"].lhs, 3 * PI2)
    assert c["curvature_variance_gap"].rhs == c["variance_gap"].rhs
    assert "pinched_gap" not in c
    c2 = by_id(bounds.gap_upper_bounds(SQUARE, 2))
    # mean 3.5 pi^2, variance 2.25 pi^4, n = 2
    assert_allclose(c2["variance_gap"].rhs, 2 * math.sqrt((3.5 * PI2) ** 2 - 3 * 2.25 * PI2 ** 2))
    assert c2["variance_gap"].lhs == 0


def test_infeasible_bracket_reported():
    c = by_id(bounds.gap_upper_bounds([1.0, 100.0, 100.5], 2, n=2))["variance_gap"]
    assert c.status == "infeasible"
    assert "bracket=" in c.notes and math.isnan(c.rhs)


def test_pinched_gap_bound_formula():
    lam = SQUARE.eigenvalues
    cfg = BoundConfig(curvature=(2.0, 1.0))
    c = by_id(bounds.gap_upper_bounds(SQUARE, 3, cfg))["pinched_gap"]
    # roots of k X^2 - 6 X sum(mu) + 5 sum(mu^2) with mu = lambda + shift
    mu = lam[:3] + (-0.25 * 1.0 + 0.5 * (4.0 - 1.0))
    roots = np.roots([3.0, -6.0 * mu.sum(), 5.0 * np.sum(mu ** 2)])
    assert_allclose(c.rhs, roots.max() - roots.min(), rtol=1e-12)


def test_growth_examples():
    checks = bounds.growth_bounds(SQUARE)
    cy = [c for c in checks if c.inequality_id == "power_growth"]
    assert_allclose([cy[0].lhs, cy[0].rhs], [5 * PI2, 6 * PI2])
    assert cy[99].rhs - cy[99].lhs > 0.5 * cy[99].rhs
    cc = [c for c in checks if c.inequality_id == "curvature_power_growth"]
    assert all(a.lhs == b.lhs and a.rhs == b.rhs for a, b in zip(cy, cc))


def test_theorem_constant_examples():
    assert_allclose(bounds.theorem_constant(2 * PI2, 2), 4 * 2 * PI2 * math.sqrt(1.5))
    assert abs(bounds.theorem_constant(2 * PI2, 2) - 96.70) < 0.01
    flat_h0 = BoundConfig(h0_squared=0.0)
    assert abs(bounds.theorem_constant(10.0, 2, flat_h0, "hyperbolic") - 68.41) < 0.01
    cfg = BoundConfig(h0_squared=0.5, curvature=(2.0, 1.0))
    expected = 4 * math.sqrt(3 * (10 - 0.25 + 0.75) * (10 + 0.5))
    assert_allclose(bounds.theorem_constant(10.0, 2, cfg, "pinched"), expected)
    with pytest.raises(Infeasible):
        bounds.theorem_constant(0.1, 2, flat_h0, "hyperbolic")


def test_theorem_gap_bound_square():
    checks = bounds.theorem_gap_bound(SQUARE, 2)
    assert_allclose(checks[0].lhs, 3 * PI2)
    assert all(c.satisfied for c in checks)


def test_theorem_gap_bound_scale_invariance():
    a = bounds.theorem_gap_bound(SQUARE.eigenvalues[:50], 2)
    b = bounds.theorem_gap_bound(2 * SQUARE.eigenvalues[:50], 2)
    for x, y in zip(a, b):
        assert_allclose([y.lhs, y.rhs], [2 * x.lhs, 2 * x.rhs])
        assert x.satisfied == y.satisfied


def test_proof_step_euclidean_examples():
    checks = bounds.proof_step_euclidean(SQUARE.eigenvalues[:10], 2)
    assert checks[0].lhs == 0
    assert_allclose([checks[1].lhs, checks[1].rhs], [18 * PI2 ** 2, 256 * PI2 ** 2])
    disk = oracles.disk_spectrum(1.0, 10)
    assert all(c.satisfied for c in bounds.proof_step_euclidean(disk))


def test_proof_step_hyperbolic_gates():
    with pytest.raises(Infeasible):
        bounds.proof_step_hyperbolic([0.2, 1.0, 2.0])
    c = bounds.proof_step_hyperbolic([1.0, 2.0, 2.0])[0]
    assert c.lhs == 0 and c.satisfied


def test_fit_gap_constant():
    assert bounds.fit_gap_constant([1.0, 2.0], 2) == 1.0
    c = bounds.fit_gap_constant(SQUARE.eigenvalues[:200], 2)
    assert c <= bounds.theorem_constant(SQUARE.eigenvalues[0], 2)
    assert_allclose(bounds.fit_gap_constant(2 * SQUARE.eigenvalues[:200], 2), 2 * c)
    with pytest.raises(TooFewEigenvalues):
        bounds.fit_gap_constant([1.0], 2)


def test_too_few_eigenvalues():
    with pytest.raises(TooFewEigenvalues):
        bounds.check_universal([1.0, 2.0], 2, n=2)
    with pytest.raises(TooFewEigenvalues):
        bounds.gap_upper_bounds([1.0], 1, n=2)
    with pytest.raises(TooFewEigenvalues):
        bounds.proof_step_euclidean([1.0, 2.0], 2)


def test_curvature_form_reduces_to_quadratic_sum():
    for k in range(1, 200):
        c = by_id(bounds.check_universal(SQUARE, k))
        curved, flat = c["curvature_quadratic_sum"], c["quadratic_sum"]
        assert abs(curved.lhs - flat.lhs) <= 1e-12 * abs(flat.lhs)
        assert abs(curved.rhs - flat.rhs) <= 1e-12 * abs(flat.rhs)


def test_config_validation():
    with pytest.raises(ValueError):
        BoundConfig(h0_squared=-1)
    with pytest.raises(ValueError):
        BoundConfig(curvature=(1.0, 2.0))
    with pytest.raises(ValueError):
        BoundConfig(c0_policy=0.5)
    assert BoundConfig().c0(3) == pytest.approx(7 / 3)
    assert BoundConfig(c0_policy=lambda n: 1 + 2 / n).c0(2) == 2.0
    cfg = BoundConfig(1.5, 0.25, (1.0, 0.5))
    assert BoundConfig.from_dict(cfg.to_dict()) == cfg


def test_solver_noise_tolerance():
    lam = np.array([1.0, 2.0, 3.0])
    # mean_ratio at k = 1 reads 2 <= 3; push lambda_2 just past the bound
    tight = np.array([1.0, 3.0 * (1 + 1e-6), 3.5])
    exact = by_id(bounds.check_universal(tight, 1, n=2))["mean_ratio"]
    assert not exact.satisfied
    noisy = Spectrum(tight, np.full(3, 1e-6), meta={"n": 2})
    assert by_id(bounds.check_universal(noisy, 1))["mean_ratio"].satisfied
    assert by_id(bounds.check_universal(lam, 1, n=2))["mean_ratio"].satisfied


def test_csv_round_trip(tmp_path):
    checks = bounds.check_all(oracles.box_spectrum(1, 1, 1, 20))
    path = tmp_path / "c.csv"
    bounds.write_checks_csv(checks, path)
    assert path.read_text().splitlines()[0] == "inequality_id,k,lhs,rhs,slack,satisfied,notes"
    back = bounds.read_checks_csv(path)
    assert len(back) == len(checks)
    for a, b in zip(checks, back):
        assert (a.inequality_id, a.k, a.satisfied, a.notes) == (b.inequality_id, b.k,
                                                                b.satisfied, b.notes)
        assert_allclose([b.lhs, b.rhs], [a.lhs, a.rhs], equal_nan=True)


def test_which_filter():
    checks = bounds.check_all(SQUARE.eigenvalues[:30], which="growth,ppw", n=2)
    assert {c.inequality_id for c in checks} == {"ppw", "power_growth", "curvature_power_growth"}
    with pytest.raises(ValueError):
        bounds.check_all(SQUARE.eigenvalues[:5], which="nonsense", n=2)


spectra = st.lists(st.floats(0.1, 1e4, allow_nan=False), min_size=2, max_size=12).map(sorted)


@settings(max_examples=300, deadline=None)
@given(lam=spectra, n=st.sampled_from([2, 3]))
def test_implication_chain_random(lam, n):
    lam = np.array(lam)
    assume(lam[0] > 0)
    for k in range(1, len(lam)):
        c = {x.inequality_id: x.satisfied for x in bounds.check_universal(lam, k, n=n)}
        if c["quadratic_sum"]:
            assert c["mean_ratio"]
        if c["mean_ratio"]:
            assert c["hile_protter"]
        if c["hile_protter"]:
            assert c["thompson"]


@settings(max_examples=100, deadline=None)
@given(lam=spectra, n=st.sampled_from([2, 3]), e=st.sampled_from([-3, -1, 1, 4, 10]),
       h0=st.sampled_from([0.0, 0.5]))
def test_scale_equivariance(lam, n, e, h0):
    # powers of two keep every product, quotient and square root exact,
    # so the flags must agree bit for bit
    lam = np.array(lam)
    c = 2.0 ** e
    cfg = BoundConfig(h0_squared=h0)
    cfg_scaled = BoundConfig(h0_squared=h0 * c)
    a = bounds.check_all(lam, cfg, n=n)
    b = bounds.check_all(c * lam, cfg_scaled, n=n)
    assert [x.status for x in a] == [y.status for y in b]
    assert [x.satisfied for x in a] == [y.satisfied for y in b]


class _CurvedSpectrum:
    eigenvalues = np.array([40.0, 48.0, 60.0, 61.0])
    residual_norms = np.zeros(4)
    n = 2
    is_hyperbolic = True


def test_h0_defaults_to_zero_only_on_flat_domains():
    assert BoundConfig().h0() == 0.0
    assert BoundConfig().h0(curved=True) is None
    assert BoundConfig(curvature=(1.0, 1.0)).h0() is None
    assert BoundConfig(h0_squared=0.3).h0(curved=True) == 0.3


def test_curved_checks_skip_without_h0():
    spec = _CurvedSpectrum()
    checks = bounds.check_all(spec, BoundConfig(), "all")
    skipped = {c.inequality_id for c in checks if c.status == "skipped"}
    assert {"curvature_quadratic_sum", "curvature_variance_gap", "curvature_power_growth",
            "theorem_gap"} <= skipped
    assert all("H0^2 must be given" in c.notes for c in checks
               if c.inequality_id == "theorem_gap")
    with pytest.raises(ValueError):
        bounds.theorem_constant(40.0, 2, BoundConfig(), "hyperbolic")
    given = bounds.check_all(spec, BoundConfig(h0_squared=0.0), "all")
    assert not [c for c in given if c.inequality_id == "theorem_gap" and c.status == "skipped"]
