"""End-to-end verification of the computed constants.

Three independent angles:

* check_inequality - draws random polynomials and confirms the certified
  constant actually dominates the derivative functional, then evaluates the
  extremal polynomial (through the difference/derivative bases, never the
  monomial basis) and confirms it attains the constant to rounding;
* check_identities - the combinatorial and weighted-moment identities the
  derivations lean on, verified in exact integer/rational arithmetic where
  possible and against quadrature otherwise;
* check_asymptotics - scaled trends of mu along a degree grid, reported
  without judgment so tests (or humans) can assert what they need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterable, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .coherent import CoherentCase, p_eval, pair_data, t_eval
from .errors import ValidationError
from .functionals import functional_apply, gauss_rule
from .orthopoly import JacobiParams, jacobi_eval, jacobi_recurrence_coeffs
from .recurrence import build_specialized
from .solver import ExtremalPolynomial, Interval, extremal_polynomial, smallest_zero

__all__ = [
    "VerificationReport",
    "TrendPoint",
    "check_inequality",
    "check_identities",
    "check_asymptotics",
    "extremal_callables",
]

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of a verification run; unused fields stay None.

    Inequality runs fill case/n/trials/seed/max_ratio/extremal_gap/mu;
    identity runs fill trials (number of checks) and identity_failures.
    """

    case: CoherentCase | None
    n: int | None
    trials: int
    seed: int | None
    max_ratio: float | None
    extremal_gap: float | None
    identity_failures: tuple[str, ...] | None
    mu: Interval | None

    def to_json(self) -> dict[str, Any]:
        return {
            "case": self.case.describe() if self.case is not None else None,
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "max_ratio": self.max_ratio,
            "extremal_gap": self.extremal_gap,
            "identity_failures": list(self.identity_failures)
            if self.identity_failures is not None
            else None,
            "mu_lo": self.mu.lo if self.mu is not None else None,
            "mu_hi": self.mu.hi if self.mu is not None else None,
        }


@dataclass(frozen=True)
class TrendPoint:
    """mu enclosure at one degree, with the power-law-scaled value."""

    n: int
    mu_lo: float
    mu_hi: float
    scale_power: int
    scaled: float  # mu.mid * n**scale_power


def extremal_callables(
    ext: ExtremalPolynomial,
) -> tuple[Callable[[float], float], Callable[[float], float]]:
    """Scalar evaluators (p, p') for the extremal polynomial.

    p is assembled from the difference basis R_j = P_j - sigma_{j-1}
    (j/(j-1)) P_{j-1}; its derivative is exactly sum_j y_j j T_{j-1}.
    Both run through the orthogonal-family recurrences; converting to the
    monomial basis instead would lose tens of digits at these degrees.
    """
    case, n, y = ext.case, ext.n, ext.y
    data = pair_data(case, n)
    factors = np.zeros(n + 1)
    for j in range(2, n + 1):
        factors[j] = data.sigma_at(j - 1) * j / (j - 1.0)

    def p_tilde(x: float) -> float:
        vals, _ = p_eval(case, n, float(x))
        total = y[0] * vals[1]
        for j in range(2, n + 1):
            total += y[j - 1] * (vals[j] - factors[j] * vals[j - 1])
        return total

    def p_tilde_prime(x: float) -> float:
        tvals = t_eval(case, n - 1, float(x))
        total = 0.0
        for j in range(1, n + 1):
            total += y[j - 1] * j * tvals[j - 1]
        return total

    return p_tilde, p_tilde_prime


def check_inequality(
    case: CoherentCase, n: int, trials: int = 200, rng_seed: int = 0
) -> VerificationReport:
    """Random-polynomial stress test of c1((p')^2) <= c0(p^2)/mu.

    Every trial draws monomial coefficients uniformly from [-1, 1] at degree
    n and evaluates both functionals with a fixed 2n + 40 node budget; the
    reported max_ratio is the largest mu_hi c1((p')^2)/c0(p^2) seen, which
    certified bounds promise stays at or below 1 up to quadrature noise.
    extremal_gap is 1 minus that ratio for the extremal polynomial itself,
    which should vanish to rounding.  The gap evaluation runs the adaptive
    node-doubling path rather than the fixed trial budget: a pole sitting
    close to the support edge can need an order of magnitude more nodes
    before the last few digits settle, and the gap is exactly where those
    digits matter.
    """
    if n < 1:
        raise ValidationError(f"degree must be >= 1, got {n}")
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")
    spec = build_specialized(case, n)
    mu = smallest_zero(spec)
    nodes = 2 * n + 40
    rng = np.random.default_rng(rng_seed)
    max_ratio = 0.0
    for _ in range(trials):
        coeffs = rng.uniform(-1.0, 1.0, n + 1)
        dcoeffs = npoly.polyder(coeffs)
        num = functional_apply(case, "c1", dcoeffs, dcoeffs, nodes=nodes)
        den = functional_apply(case, "c0", coeffs, coeffs, nodes=nodes)
        ratio = mu.hi * num / den
        if ratio > max_ratio:
            max_ratio = ratio
    ext = extremal_polynomial(spec, case, mu)
    p_tilde, p_tilde_prime = extremal_callables(ext)
    num = functional_apply(case, "c1", p_tilde_prime, p_tilde_prime)
    den = functional_apply(case, "c0", p_tilde, p_tilde)
    gap = 1.0 - mu.hi * num / den
    return VerificationReport(
        case=case,
        n=n,
        trials=trials,
        seed=rng_seed,
        max_ratio=max_ratio,
        extremal_gap=gap,
        identity_failures=None,
        mu=mu,
    )


# --------------------------------------------------------------------------
# Identity suites.
# --------------------------------------------------------------------------


def _comb(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def _poch_fraction(a: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for t in range(k):
        out *= a + t
    return out


def _suite_exponential_cross_moments(depth: int, failures: list[str]) -> int:
    """c1(x^i L_j) for the plain exponential weight, in exact integers.

    Expanding the monic degree-j polynomial and integrating term by term
    gives sum_k (-1)^(j-k) (j!/k!) C(j,k) (i+k)!, which must collapse to
    i! j! C(i,j).
    """
    checks = 0
    for i in range(depth + 1):
        for j in range(depth + 1):
            total = 0
            jf = math.factorial(j)
            for k in range(j + 1):
                total += (-1) ** (j - k) * (jf // math.factorial(k)) * _comb(j, k) * math.factorial(i + k)
            expected = math.factorial(i) * jf * _comb(i, j)
            checks += 1
            if total != expected:
                failures.append(
                    f"exponential cross moment i={i} j={j}: {total} != {expected}"
                )
    return checks


def _suite_alternating_binomial(depth: int, failures: list[str]) -> int:
    """(-1)^j sum_m (-1)^m C(j,m) C(m+i,i) = C(i,j), exact integers."""
    checks = 0
    for i in range(depth + 1):
        for j in range(depth + 1):
            total = sum((-1) ** m * _comb(j, m) * _comb(m + i, i) for m in range(j + 1))
            expected = (-1) ** j * _comb(i, j)
            checks += 1
            if total != expected:
                failures.append(
                    f"alternating binomial i={i} j={j}: {total} != {expected}"
                )
    return checks


def _suite_endpoint_weighted_moments(
    depth: int, gammas: Sequence[float], failures: list[str]
) -> int:
    """Closed form of int (1 - eps x)^i p_j dw vs direct quadrature.

    w is the one-sided endpoint weight ((1 + eps x)^(gamma-1) on [-1, 1])
    and p_j its monic orthogonal family.  The closed form is
    (-eps)^j 2^(i+j+gamma) i! j! C(i,j) G(j+gamma) /
    (G(2j+gamma) (gamma+j)_(i+1)), zero for j > i by orthogonality.

    The error budget is scaled by the integrand's l1 mass under the rule,
    not by the identity's value: float64 rounding enters the node sum at
    that mass, and cancellation leaves the integral itself several orders
    below it once i + j grows past a dozen.
    """
    checks = 0
    cap = min(depth, 12)
    for g in gammas:
        for eps in (1.0, -1.0):
            params = JacobiParams(0.0, g - 1.0) if eps > 0 else JacobiParams(g - 1.0, 0.0)
            b, c = jacobi_recurrence_coeffs(params.alpha, params.beta, cap + 1)
            for i in range(cap + 1):
                for j in range(cap + 1):
                    # at least j + 1 nodes, so the rule never degenerates to
                    # p_j's own zeros (which would integrate p_j to zero by
                    # construction rather than by orthogonality)
                    m_nodes = max((i + j) // 2 + 2, j + 1)
                    rule = gauss_rule(params, m_nodes)
                    xs = rule.nodes
                    pj = np.ones_like(xs)
                    prev = np.zeros_like(xs)
                    for t in range(j):
                        pj, prev = (xs - b[t]) * pj - (c[t] * prev if t >= 1 else 0.0), pj
                    integrand = (1.0 - eps * xs) ** i * pj
                    quad = float(np.dot(rule.weights, integrand))
                    mass = float(np.sum(rule.weights))
                    ell1 = max(float(np.dot(rule.weights, np.abs(integrand))), mass)
                    log_mag = (
                        (i + j + g) * _LN2
                        + math.lgamma(i + 1.0)
                        + math.lgamma(j + 1.0)
                        + math.lgamma(j + g)
                        - math.lgamma(2.0 * j + g)
                        - (math.lgamma(g + j + i + 1.0) - math.lgamma(g + j))
                    )
                    closed = ((-eps) ** j) * _comb(i, j) * math.exp(log_mag)
                    checks += 1
                    if abs(quad - closed) > 1e-10 * max(abs(closed), ell1):
                        failures.append(
                            f"endpoint weighted moment gamma={g} eps={eps:+.0f} "
                            f"i={i} j={j}: {quad!r} != {closed!r}"
                        )
    return checks


def _suite_rational_pochhammer(
    depth: int, gammas: Sequence[Fraction], failures: list[str]
) -> int:
    """sum_m (-1)^m C(j,m) C(i+m,i) (g+i+m+1)_(j-m) (g+j)_m = (-1)^j C(i,j) (g)_j.

    Evaluated in exact rational arithmetic, so a pass is a proof for the
    tested parameters rather than a numerical observation.
    """
    checks = 0
    for g in gammas:
        for i in range(depth + 1):
            for j in range(depth + 1):
                total = Fraction(0)
                for m in range(j + 1):
                    total += (
                        (-1) ** m
                        * _comb(j, m)
                        * _comb(i + m, i)
                        * _poch_fraction(g + i + m + 1, j - m)
                        * _poch_fraction(g + j, m)
                    )
                expected = (-1) ** j * _comb(i, j) * _poch_fraction(g, j)
                checks += 1
                if total != expected:
                    failures.append(
                        f"rational pochhammer gamma={g} i={i} j={j}: {total} != {expected}"
                    )
    return checks


def check_identities(
    depth: int = 20, gammas: Iterable[float] | None = None
) -> VerificationReport:
    """Run the four structural identity suites up to the given depth.

    Two suites are exact integer computations, one is exact rational, and
    one compares closed forms against quadrature at 1e-10.  Returns a report
    whose identity_failures tuple is empty iff everything holds.
    """
    if not 0 <= depth <= 20:
        raise ValidationError(f"depth must be in [0, 20], got {depth}")
    gvals = tuple(gammas) if gammas is not None else (0.5, 1.0, 1.4, 2.5, 3.7)
    for g in gvals:
        if not g > 0.0:
            raise ValidationError(f"identity suite needs gamma > 0, got {g}")
    rational_gammas = (
        Fraction(1, 2),
        Fraction(5, 7),
        Fraction(7, 3),
        Fraction(13, 5),
    )
    failures: list[str] = []
    checks = 0
    checks += _suite_exponential_cross_moments(depth, failures)
    checks += _suite_alternating_binomial(depth, failures)
    checks += _suite_endpoint_weighted_moments(depth, gvals, failures)
    checks += _suite_rational_pochhammer(min(depth, 12), rational_gammas, failures)
    return VerificationReport(
        case=None,
        n=None,
        trials=checks,
        seed=None,
        max_ratio=None,
        extremal_gap=None,
        identity_failures=tuple(failures),
        mu=None,
    )


def check_asymptotics(
    case: CoherentCase, n_grid: Sequence[int] = (100, 200, 400, 800)
) -> tuple[TrendPoint, ...]:
    """mu enclosures along a degree grid with the natural power scaling.

    The exponential-type pairs decay like n^-2 and the bounded-support ones
    like n^-4, so the scaled column should flatten as n grows.  No
    assertions are made here; this is instrumentation.
    """
    if not n_grid or any(n < 1 for n in n_grid):
        raise ValidationError("n_grid must contain positive degrees")
    power = 2 if case.tag.startswith("laguerre") else 4
    out = []
    for n in sorted(n_grid):
        spec = build_specialized(case, n)
        mu = smallest_zero(spec)
        out.append(
            TrendPoint(
                n=n,
                mu_lo=mu.lo,
                mu_hi=mu.hi,
                scale_power=power,
                scaled=mu.mid * float(n) ** power,
            )
        )
    return tuple(out)
