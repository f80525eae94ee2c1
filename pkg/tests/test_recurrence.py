"""Unit tests for the tridiagonal eigenvalue-problem assembly.

Closed-form entry values are derived by hand from the norm/coupling
sequences; the cancellations are spelled out next to each assertion so the
expected numbers are checkable without running anything.
"""

import math

import numpy as np
import pytest

import _oracle
from coherentmb.coherent import CoherentCase
from coherentmb.errors import LossOfSignificance, ValidationError
from coherentmb.recurrence import (
    RecurrenceSpec,
    ScaledPolyValue,
    an_at_zero,
    build_generic,
    build_specialized,
    eval_An,
)

ALL_CASES = (
    CoherentCase.laguerre_a(1.3, -2.0),
    CoherentCase.laguerre_b(1.0),
    CoherentCase.laguerre_c(0.6, -2.0, 0.5),
    CoherentCase.jacobi_a(1.3, 0.7, -2.5),
    CoherentCase.jacobi_b(1.4, 0.8),
    CoherentCase.jacobi_c(2.5, 3.0),
    CoherentCase.jacobi_d(0.4, 1.1, 2.0, 0.7),
)


def test_spec_validation():
    with pytest.raises(ValidationError):
        RecurrenceSpec(0, np.array([]), np.array([]), 1.0)
    with pytest.raises(ValidationError):
        RecurrenceSpec(2, np.array([1.0]), np.array([1.0]), 1.0)
    with pytest.raises(LossOfSignificance):
        RecurrenceSpec(2, np.array([1.0, -1.0]), np.array([1.0]), 1.0)
    with pytest.raises(LossOfSignificance):
        RecurrenceSpec(2, np.array([1.0, 1.0]), np.array([-1.0]), 1.0)
    with pytest.raises(ValidationError):
        build_generic(ALL_CASES[0], 0)
    with pytest.raises(ValidationError):
        build_specialized(ALL_CASES[0], 0)


def test_scaled_poly_value_round_trip():
    v = ScaledPolyValue.from_parts(-3.25)
    assert v.value() == -3.25
    assert v.sign == -1.0
    assert v.log_abs() == pytest.approx(math.log(3.25), rel=1e-15)
    big = ScaledPolyValue.from_parts(1.5, 4000)
    assert big.log_abs() == pytest.approx(math.log(1.5) + 4000 * math.log(2.0))
    assert ScaledPolyValue.from_parts(0.0).sign == 0.0


def test_laguerre_factor_pair_closed_entries():
    # For the (x - xi) x^(alpha-1) e^-x pair, the entry formulas telescope:
    #   d_1 = alpha + 1 - xi + xi/(xi - alpha),
    #   d_i = 2 + (alpha - xi)/i          (i >= 2),
    #   o_j = 1 + alpha/j.
    alpha, xi = 1.3, -2.0
    spec = build_specialized(CoherentCase.laguerre_a(alpha, xi), 8)
    assert spec.diag[0] == pytest.approx(
        alpha + 1.0 - xi + xi / (xi - alpha), rel=1e-14
    )
    for i in range(2, 9):
        assert spec.diag[i - 1] == pytest.approx(2.0 + (alpha - xi) / i, rel=1e-13)
    for j in range(1, 8):
        assert spec.offdiag_sq[j - 1] == pytest.approx(1.0 + alpha / j, rel=1e-13)
    # diag_2 at these parameters is the memorable 3.65
    assert spec.diag[1] == pytest.approx(3.65, rel=1e-13)


def test_exponential_mass_pair_constant_entries():
    # The exponential pair with a point mass at the origin flattens out:
    # d_1 = (1+2M)/(1+M), every later diagonal is exactly 2, every squared
    # off-diagonal exactly 1.
    for mass in (0.0, 1.0, 10.0):
        spec = build_specialized(CoherentCase.laguerre_b(mass), 12)
        assert spec.diag[0] == pytest.approx((1.0 + 2.0 * mass) / (1.0 + mass), rel=1e-15)
        assert np.all(spec.diag[1:] == 2.0)
        assert np.all(spec.offdiag_sq == 1.0)


def test_self_pair_entries_exact_expressions():
    # alpha-weight self pair (xi = 0, M = 0): d_1 = alpha + 1,
    # d_i = 2 + alpha/i, o_j = 1 + alpha/j, each produced by the exact
    # float expression (no exp/log round trip).
    alpha = 0.75
    spec = build_specialized(CoherentCase.laguerre_c(alpha, 0.0), 10)
    assert spec.diag[0] == alpha + 1.0
    for i in range(2, 11):
        assert spec.diag[i - 1] == 2.0 + alpha / i
    for j in range(1, 10):
        assert spec.offdiag_sq[j - 1] == 1.0 + alpha / j


def test_generic_matches_oracle_assembly():
    # Rebuild the matrix from the oracle's high-precision norm sequences and
    # compare entrywise.
    for case in (ALL_CASES[0], ALL_CASES[4]):
        _, _, k0, k1, sig, _ = _oracle.pair_oracle(case, 7)
        d_ref, osq_ref = _oracle.ktilde(k0, k1, sig, 7)
        spec = build_generic(case, 7)
        for i in range(1, 8):
            assert spec.diag[i - 1] == pytest.approx(float(d_ref[i]), rel=1e-12)
        for j in range(1, 7):
            assert spec.offdiag_sq[j - 1] == pytest.approx(float(osq_ref[j]), rel=1e-12)


@pytest.mark.parametrize("case", ALL_CASES, ids=lambda c: c.tag)
def test_generic_and_specialized_agree(case):
    gen = build_generic(case, 25)
    spe = build_specialized(case, 25)
    assert np.allclose(gen.diag, spe.diag, rtol=1e-11, atol=0.0)
    assert np.allclose(gen.offdiag_sq, spe.offdiag_sq, rtol=1e-11, atol=0.0)
    assert gen.a1_constant == gen.diag[0]
    assert spe.meta["builder"] == "specialized"
    assert gen.meta["builder"] == "generic"


def test_eval_an_matches_dense_characteristic_polynomial():
    case = CoherentCase.jacobi_b(1.4, 0.8)
    spec = build_specialized(case, 9)
    dense = np.diag(spec.diag)
    roots = np.sqrt(spec.offdiag_sq)
    dense += np.diag(roots, 1) + np.diag(roots, -1)
    eigs = np.linalg.eigvalsh(dense)
    for lam in (-1.0, 0.0, 0.017, 0.3):
        direct = float(np.prod(lam - eigs))
        (a,) = eval_An(spec, lam)
        assert a.value() == pytest.approx(direct, rel=1e-9, abs=1e-300)


def test_eval_an_derivatives_by_finite_difference():
    spec = build_specialized(CoherentCase.laguerre_b(1.0), 7)
    lam, h = 0.05, 1e-7
    a, ap, app = eval_An(spec, lam, derivatives=2)
    up = eval_An(spec, lam + h)[0].value()
    dn = eval_An(spec, lam - h)[0].value()
    assert ap.value() == pytest.approx((up - dn) / (2 * h), rel=1e-6)
    assert app.value() == pytest.approx((up - 2 * a.value() + dn) / (h * h), rel=1e-3)
    with pytest.raises(ValidationError):
        eval_An(spec, lam, derivatives=3)


def test_eval_an_survives_huge_dimension():
    # At n = 20000 the polynomial value is astronomically large at lam = -1;
    # the shared-exponent carry must keep sign and log-magnitude finite.
    spec = build_specialized(CoherentCase.laguerre_b(0.0), 20000)
    (a,) = eval_An(spec, -1.0)
    assert a.sign == 1.0  # (-1)^n * (-1)^n with n even, all factors negative
    assert a.log_abs() > 8000.0
    assert math.isfinite(a.log_abs())


def test_an_at_zero_consistent_with_recurrence_eval():
    for case in (ALL_CASES[1], ALL_CASES[3]):
        spec = build_specialized(case, 11)
        a0, ap0 = an_at_zero(spec)
        a_rec, ap_rec = eval_An(spec, 0.0, derivatives=1)
        assert a0.sign == a_rec.sign
        assert a0.log_abs == pytest.approx(a_rec.log_abs(), rel=1e-10)
        assert ap0.sign == ap_rec.sign
        assert ap0.log_abs == pytest.approx(ap_rec.log_abs(), rel=1e-10)


def test_an_at_zero_signs_alternate():
    # A_n(0) = (-1)^n det K with det K > 0, so the sign is (-1)^n and the
    # derivative sign is (-1)^(n+1).
    case = CoherentCase.jacobi_c(2.5, 3.0)
    for n in (1, 2, 3, 6, 9):
        a0, ap0 = an_at_zero(build_specialized(case, n))
        assert a0.sign == (-1.0) ** n
        assert ap0.sign == (-1.0) ** (n + 1)
