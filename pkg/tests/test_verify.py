"""Unit tests for the inequality/identity verification layer."""

import math

import numpy as np
import pytest

from coherentmb.coherent import CoherentCase
from coherentmb.errors import ValidationError
from coherentmb.recurrence import build_specialized
from coherentmb.solver import extremal_polynomial, smallest_zero
from coherentmb.verify import (
    TrendPoint,
    check_asymptotics,
    check_identities,
    check_inequality,
    extremal_callables,
)

CASES = (
    CoherentCase.laguerre_a(1.3, -2.0),
    CoherentCase.laguerre_b(1.0),
    CoherentCase.laguerre_c(0.6, -2.0, 0.5),
    CoherentCase.jacobi_a(1.3, 0.7, -2.5),
    CoherentCase.jacobi_b(1.4, 0.8),
    CoherentCase.jacobi_c(2.5, 3.0),
    CoherentCase.jacobi_d(0.4, 1.1, 1.0, 0.7),
)


@pytest.mark.parametrize("case", CASES, ids=lambda c: c.tag)
def test_random_polynomials_never_beat_the_constant(case):
    report = check_inequality(case, 8, trials=60, rng_seed=3)
    assert report.trials == 60
    assert report.max_ratio <= 1.0 + 1e-8
    assert abs(report.extremal_gap) <= 1e-7
    assert report.mu.lo <= report.mu.hi


def test_extremal_gap_at_eigenvalue_resolution_floor():
    # Pushing the fourth-kind pole out to xi=2 drives mu down to ~6e-11 at
    # n=8, only ~1e5 times double precision's eigenvalue resolution for this
    # matrix.  The gap then reflects the eigensolver floor rather than
    # quadrature quality, so it only gets a coarse budget here; the ratio
    # bound itself must still hold.
    report = check_inequality(CoherentCase.jacobi_d(0.4, 1.1, 2.0, 0.7), 8, trials=40, rng_seed=3)
    assert report.max_ratio <= 1.0 + 1e-8
    assert report.mu.hi < 1e-9
    assert abs(report.extremal_gap) <= 1e-5


def test_report_round_trips_to_json():
    report = check_inequality(CASES[1], 6, trials=10, rng_seed=1)
    blob = report.to_json()
    assert blob["case"] == "laguerre-b M=1"
    assert blob["n"] == 6
    assert blob["trials"] == 10
    assert blob["mu_lo"] <= blob["mu_hi"]
    assert blob["max_ratio"] <= 1.0 + 1e-8


def test_check_inequality_seed_determinism():
    a = check_inequality(CASES[4], 7, trials=25, rng_seed=11)
    b = check_inequality(CASES[4], 7, trials=25, rng_seed=11)
    c = check_inequality(CASES[4], 7, trials=25, rng_seed=12)
    assert a.max_ratio == b.max_ratio
    assert a.max_ratio != c.max_ratio


def test_check_inequality_validation():
    with pytest.raises(ValidationError):
        check_inequality(CASES[0], 0)
    with pytest.raises(ValidationError):
        check_inequality(CASES[0], 5, trials=0)


def test_extremal_callables_match_coefficient_evaluation():
    # The assembled callable must agree with direct summation of the
    # difference-basis pieces, and its derivative with finite differences.
    case = CASES[4]
    n = 7
    spec = build_specialized(case, n)
    mu = smallest_zero(spec, tol=1e-13)
    ext = extremal_polynomial(spec, case, mu)
    p, dp = extremal_callables(ext)
    h = 1e-6
    for x in (-0.7, -0.2, 0.0, 0.4, 0.9):
        fd = (p(x + h) - p(x - h)) / (2.0 * h)
        assert dp(x) == pytest.approx(fd, rel=2e-5, abs=1e-8)


def test_extremal_callable_degree_and_leading_sign():
    # p has exact degree n: the top coefficient is y[n-1] (monic basis), so
    # p(x)/x^n tends to y[n-1].
    case = CASES[1]
    n = 6
    spec = build_specialized(case, n)
    mu = smallest_zero(spec, tol=1e-13)
    ext = extremal_polynomial(spec, case, mu)
    p, _ = extremal_callables(ext)
    # the subleading coefficient is O(n^2) here, so the ratio approaches the
    # leading coefficient only like 1 - O(n^2/x)
    x = 1e6
    assert p(x) / x**n == pytest.approx(ext.y[n - 1], rel=1e-3)


def test_identity_suites_all_pass():
    report = check_identities(depth=8)
    assert report.identity_failures == ()
    assert report.trials > 0


def test_identity_suites_custom_gammas():
    report = check_identities(depth=5, gammas=(0.25, 1.75))
    assert report.identity_failures == ()
    with pytest.raises(ValidationError):
        check_identities(depth=5, gammas=(0.0,))
    with pytest.raises(ValidationError):
        check_identities(depth=-1)
    with pytest.raises(ValidationError):
        check_identities(depth=21)


def test_asymptotic_trend_scaling():
    # For measures on the half line the scaled sequence n^2 mu approaches a
    # finite limit; the TrendPoint rows expose that directly.
    rows = check_asymptotics(CoherentCase.laguerre_b(1.0), n_grid=(50, 100, 200))
    assert [r.n for r in rows] == [50, 100, 200]
    assert all(r.scale_power == 2 for r in rows)
    scaled = [r.scaled for r in rows]
    # frozen from a converged run: 9.1235, 9.4858, 9.6750 climbing to pi^2
    assert scaled[0] == pytest.approx(9.1235, rel=1e-3)
    assert scaled[1] == pytest.approx(9.4858, rel=1e-3)
    assert scaled[2] == pytest.approx(9.6750, rel=1e-3)
    assert all(r.mu_lo <= r.mu_hi for r in rows)
    spread = max(scaled) / min(scaled)
    assert spread < 2.0


def test_asymptotic_trend_bounded_support_power():
    rows = check_asymptotics(CoherentCase.jacobi_b(1.2, 1.0), n_grid=(20, 40))
    assert all(r.scale_power == 4 for r in rows)
    assert isinstance(rows[0], TrendPoint)
