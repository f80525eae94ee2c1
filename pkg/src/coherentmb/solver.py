"""Certified bounds and extremal vectors for the tridiagonal eigenproblem.

Everything here consumes a RecurrenceSpec (positive-definite symmetric
tridiagonal matrix) and produces enclosures of its smallest eigenvalue mu:

* Newton's inequality at 0 gives a lower bound |A(0)|/|A'(0)|;
* the tangent-circle refinement (Laguerre's method step from 0) gives a
  sharper lower bound that is exact for n <= 2;
* elimination quotients plus progressive quotient-difference sweeps give a
  decreasing chain of upper bounds;
* Sturm-count bisection sandwiches mu to requested relative width.

The extremal vector (restated downstream as the polynomial attaining the
sharp constant) comes from inverse iteration with the bisection midpoint as
shift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from . import _kernels
from .coherent import CoherentCase, pair_data
from .errors import LossOfSignificance, NumericalFailure, ValidationError
from .recurrence import (
    RecurrenceSpec,
    an_at_zero,
    build_specialized,
    eval_An,
)

__all__ = [
    "Interval",
    "QdState",
    "BoundsReport",
    "ExtremalPolynomial",
    "smallest_zero",
    "newton_bound",
    "laguerre_method_bound",
    "laguerre_b_closed_bounds",
    "qd_iterate",
    "extremal_polynomial",
    "bounds_report",
]

_BISECT_MAX_STEPS = 200


@dataclass(frozen=True)
class Interval:
    """A closed interval [lo, hi] certifying lo <= value <= hi."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo <= self.hi):
            raise ValidationError(f"invalid interval [{self.lo}, {self.hi}]")

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def rel_width(self) -> float:
        scale = max(abs(self.lo), abs(self.hi))
        return self.width / scale if scale > 0.0 else math.inf

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi


@dataclass(frozen=True)
class QdState:
    """Quotient/difference rows after some progressive sweeps.

    q and e are the current factorization rows (e[n-1] stays 0); qn_history
    holds the trailing quotient after each round, starting with round 0 (the
    plain elimination value).  That trailing quotient is a certified upper
    bound for mu at every round and decreases toward it.
    """

    q: np.ndarray
    e: np.ndarray
    rounds_done: int
    qn_history: tuple[float, ...]


@dataclass(frozen=True)
class BoundsReport:
    """All certified enclosures for one case and degree."""

    case: CoherentCase
    n: int
    newton_x1: float
    laguerre_x1: float
    x1_closed: float | None
    qd_upper: tuple[tuple[int, float], ...]
    mu: Interval
    markov_constant: Interval

    def to_json(self) -> dict[str, Any]:
        return {
            "case": self.case.describe(),
            "n": self.n,
            "newton_x1": self.newton_x1,
            "laguerre_x1": self.laguerre_x1,
            "x1_closed": self.x1_closed,
            "qd_upper": [[r, q] for r, q in self.qd_upper],
            "mu_lo": self.mu.lo,
            "mu_hi": self.mu.hi,
            "markov_lo": self.markov_constant.lo,
            "markov_hi": self.markov_constant.hi,
        }


@dataclass(frozen=True)
class ExtremalPolynomial:
    """Coefficients of the extremal polynomial in the difference basis.

    y[j-1] multiplies the degree-j basis polynomial
    R_j = P_j - sigma_{j-1} (j/(j-1)) P_{j-1} (with R_1 = P_1), whose
    derivative is exactly j T_{j-1}; evaluating through those recurrences
    avoids the catastrophic monomial-basis cancellation.  eigvec is the unit
    eigenvector of the tridiagonal matrix the coefficients came from.
    """

    case: CoherentCase
    n: int
    y: np.ndarray
    eigvec: np.ndarray
    rayleigh: float
    residual: float
    mu_shift: float


def _lu_rows(spec: RecurrenceSpec) -> tuple[np.ndarray, np.ndarray]:
    """Elimination quotients q and couplings e with o_j = q_j e_j."""
    n = spec.n
    q = np.empty(n)
    e = np.zeros(n)
    q[0] = spec.diag[0]
    for j in range(1, n):
        e[j - 1] = spec.offdiag_sq[j - 1] / q[j - 1]
        q[j] = spec.diag[j] - e[j - 1]
        if not (q[j] > 0.0 and math.isfinite(q[j])):
            raise LossOfSignificance(
                "positive-definite elimination broke down; matrix data inconsistent"
            )
    return q, e


def smallest_zero(spec: RecurrenceSpec, tol: float = 1e-10) -> Interval:
    """Certified enclosure of the smallest eigenvalue by Sturm bisection.

    The initial upper end is the trailing elimination quotient (a certified
    upper bound by interlacing), inflated and then verified by an actual
    count; the lower end starts at 0, which the positive-definite structure
    certifies.  The returned interval satisfies hi - lo <= tol * hi.
    """
    if not 0.0 < tol < 1.0:
        raise ValidationError(f"tolerance must be in (0, 1), got {tol}")
    diag, off = spec.diag, spec.offdiag_sq
    if _kernels.sturm_count(diag, off, 0.0) != 0:
        raise LossOfSignificance("matrix is not numerically positive definite")
    try:
        q, _ = _lu_rows(spec)
        hi = float(q[spec.n - 1]) * (1.0 + 1e-10)
    except LossOfSignificance:
        # The trailing elimination quotient drowned in rounding (eigenvalue
        # at or below the float64 noise floor of the entries).  A norm bound
        # still brackets everything, at the cost of more bisection steps.
        hi = float(np.max(diag)) + 2.0 * math.sqrt(float(np.max(off))) if spec.n > 1 else float(diag[0])
    guard = 0
    while _kernels.sturm_count(diag, off, hi) == 0:
        hi *= 1.01
        guard += 1
        if guard > 10_000:
            raise NumericalFailure("could not certify an upper end for the bisection bracket")
    lo, hi = _kernels.bisect_smallest(diag, off, 0.0, hi, tol, _BISECT_MAX_STEPS)
    if not (lo > 0.0 and hi - lo <= tol * hi):
        raise NumericalFailure(
            f"bisection failed to converge: bracket [{lo}, {hi}] after {_BISECT_MAX_STEPS} steps"
        )
    return Interval(lo, hi)


def newton_bound(spec: RecurrenceSpec) -> float:
    """Lower bound |A(0)| / |A'(0)| for the smallest zero of A_n.

    One Newton step from the origin; with all zeros real and positive the
    step never overshoots the smallest one.
    """
    a0, a0p = an_at_zero(spec)
    n = spec.n
    if a0.sign != (-1.0) ** n or a0p.sign != (-1.0) ** (n + 1):
        raise LossOfSignificance("characteristic values at 0 lost their alternating signs")
    return math.exp(a0.log_abs - a0p.log_abs)


def laguerre_method_bound(spec: RecurrenceSpec) -> float:
    """Lower bound from one step of Laguerre's method at the origin.

    x = n |A| / (|A'| + sqrt(H)) with H = (n-1)^2 A'^2 - n(n-1) A A'',
    all evaluated at 0.  Sharper than the Newton step, exact for n <= 2,
    and still a certified lower bound because every zero is real.  The
    shared-exponent evaluation makes the ratio r = n A A'' / ((n-1) A'^2)
    exponent-free, so nothing here can overflow.
    """
    n = spec.n
    if n == 1:
        return float(spec.diag[0])
    av, apv, appv = eval_An(spec, 0.0, derivatives=2)
    if av.sign != (-1.0) ** n or apv.sign != (-1.0) ** (n + 1) or appv.sign != (-1.0) ** n:
        raise LossOfSignificance("characteristic values at 0 lost their alternating signs")
    log_a, log_ap, log_app = av.log_abs(), apv.log_abs(), appv.log_abs()
    r = n / (n - 1.0) * math.exp(log_a + log_app - 2.0 * log_ap)
    if not 0.0 <= r:
        raise LossOfSignificance("curvature ratio left [0, 1); evaluation unreliable")
    r = min(r, 1.0)
    return n * math.exp(log_a - log_ap) / (1.0 + (n - 1.0) * math.sqrt(1.0 - r))


def laguerre_b_closed_bounds(M: float, n: int) -> tuple[float, float, float, float]:
    """Closed-form bound chain for the exponential-weight pair with a mass at 0.

    Returns (x1_closed, x1_newton, x_tilde1, q_n_2):

    * x1_closed - the compact rational reference value
      (1 + (n+1)M) / (n (n+1) (3 + (n+2)M)); the Newton bound is exactly
      six times it;
    * x1_newton - the Newton lower bound, 6 * x1_closed;
    * x_tilde1  - the Laguerre-method lower bound in closed form;
    * q_n_2     - the trailing quotient after two qd sweeps (upper bound).

    Everything is a rational or algebraic function of M and n, so this is a
    closed-form cross-check for the generic machinery on this case.
    """
    if not (math.isfinite(M) and M >= 0.0):
        raise ValidationError(f"mass must be finite and >= 0, got {M}")
    if n < 1:
        raise ValidationError(f"degree must be >= 1, got {n}")
    top = 1.0 + (n + 1.0) * M
    x1_closed = top / (n * (n + 1.0) * (3.0 + (n + 2.0) * M))
    x1_newton = 6.0 * x1_closed
    half_ap = (n + 1.0) * (3.0 + (n + 2.0) * M) / 6.0
    disc = half_ap * half_ap - top * (n + 1.0) * (n + 2.0) * (5.0 + (n + 3.0) * M) / 60.0
    if n == 1:
        x_tilde1 = top / half_ap
    else:
        x_tilde1 = top / (half_ap + (n - 1.0) * math.sqrt(max(disc, 0.0)))

    def p1(j: float) -> float:
        return 1.0 + M * (2.0 + j) + M * M * (2.0 + j) * (3.0 + 2.0 * j) / 6.0

    def p2(j: float) -> float:
        return (
            5.0
            + 5.0 * M * (3.0 + j)
            + M * M * (3.0 + j) * (5.0 + 2.0 * j)
            + M**3 * (2.0 + j) * (3.0 + j) * (5.0 + 2.0 * j) / 6.0
        )

    q_n_2 = 30.0 * top * p1(n - 1.0) / ((n + 1.0) * (2.0 * n + 1.0) * p2(n - 1.0))
    return x1_closed, x1_newton, x_tilde1, q_n_2


def qd_iterate(spec: RecurrenceSpec, rounds: int = 2) -> QdState:
    """Progressive quotient-difference sweeps from the elimination rows.

    Each completed sweep tightens the trailing quotient, which stays a
    certified upper bound for mu throughout.  A sweep that produces a
    nonpositive quotient (possible once the quotients approach mu to
    rounding precision) is discarded and iteration stops at the last valid
    state; breakdown is a stopping rule here, not an error.
    """
    if rounds < 0:
        raise ValidationError(f"rounds must be >= 0, got {rounds}")
    q, e = _lu_rows(spec)
    history = [float(q[spec.n - 1])]
    done = 0
    for _ in range(rounds):
        q_try = q.copy()
        e_try = e.copy()
        if _kernels.qd_sweep(q_try, e_try) != 0:
            break
        q, e = q_try, e_try
        done += 1
        history.append(float(q[spec.n - 1]))
    return QdState(q=q, e=e, rounds_done=done, qn_history=tuple(history))


def _rayleigh_and_residual(
    diag: np.ndarray, offdiag: np.ndarray, v: np.ndarray
) -> tuple[float, float]:
    tv = diag * v
    if len(v) > 1:
        tv[:-1] += offdiag * v[1:]
        tv[1:] += offdiag * v[:-1]
    ray = float(np.dot(v, tv))
    resid = float(np.linalg.norm(tv - ray * v))
    return ray, resid


def extremal_polynomial(
    spec: RecurrenceSpec, case: CoherentCase, mu: Interval | float
) -> ExtremalPolynomial:
    """Difference-basis coefficients of the polynomial attaining the constant.

    Inverse iteration on the signed tridiagonal matrix with the eigenvalue
    enclosure's midpoint as shift; if the iteration stagnates the shift is
    nudged down by successive 0.1% steps (up to three retries) and the best
    vector by residual wins.  The eigenvector is normalized so its largest
    entry is positive, making the output deterministic.
    """
    n = spec.n
    data = pair_data(case, n)
    shift0 = mu.mid if isinstance(mu, Interval) else float(mu)
    signs = np.array([math.copysign(1.0, data.sigma_at(j)) for j in range(1, n)])
    offdiag = -signs * np.sqrt(spec.offdiag_sq) if n > 1 else np.zeros(0)
    scale = float(np.max(spec.diag) + (2.0 * np.max(np.abs(offdiag)) if n > 1 else 0.0))

    best: tuple[float, float, np.ndarray] | None = None  # (resid, ray, v)
    for attempt in range(4):
        shift = shift0 * (1.0 - 1e-3 * attempt)
        v = np.full(n, 1.0 / math.sqrt(n))
        stalled = 0
        last_resid = math.inf
        for _ in range(50):
            x = _kernels.tridiag_shifted_solve(spec.diag, offdiag, shift, v)
            nx = float(np.linalg.norm(x))
            if not (math.isfinite(nx) and nx > 0.0):
                break
            v = x / nx
            ray, resid = _rayleigh_and_residual(spec.diag, offdiag, v)
            if best is None or resid < best[0]:
                best = (resid, ray, v.copy())
            if resid <= 1e-13 * scale:
                break
            if resid >= 0.5 * last_resid:
                stalled += 1
                if stalled >= 3:
                    break
            else:
                stalled = 0
            last_resid = resid
        if best is not None and best[0] <= 1e-11 * scale:
            break
    if best is None:
        raise NumericalFailure("inverse iteration produced no usable eigenvector")
    resid, ray, v = best
    imax = int(np.argmax(np.abs(v)))
    if v[imax] < 0.0:
        v = -v
    y = np.array(
        [
            v[j - 1] * math.exp(-0.5 * data.log_k1_at(j - 1)) / j
            for j in range(1, n + 1)
        ]
    )
    return ExtremalPolynomial(
        case=case,
        n=n,
        y=y,
        eigvec=v,
        rayleigh=ray,
        residual=resid / scale,
        mu_shift=shift0,
    )


def bounds_report(
    case: CoherentCase, n: int, *, tol: float = 1e-10, qd_rounds: int = 2
) -> BoundsReport:
    """Full enclosure chain for one case and degree.

    Uses the specialized matrix build (the generic build is its consistency
    twin, exercised by the test suite).  The chain satisfies

        newton_x1 <= laguerre_x1 <= mu.lo <= mu.hi <= qd(r) <= ... <= qd(0),

    and the sharp-constant enclosure is [1/sqrt(mu.hi), 1/sqrt(mu.lo)].
    """
    spec = build_specialized(case, n)
    newton = newton_bound(spec)
    lag = laguerre_method_bound(spec)
    mu = smallest_zero(spec, tol)
    qd = qd_iterate(spec, qd_rounds)
    x1_closed: float | None = None
    if case.tag == "laguerre-b":
        x1_closed = laguerre_b_closed_bounds(case.mass, n)[0]
    markov = Interval(1.0 / math.sqrt(mu.hi), 1.0 / math.sqrt(mu.lo))
    return BoundsReport(
        case=case,
        n=n,
        newton_x1=newton,
        laguerre_x1=lag,
        x1_closed=x1_closed,
        qd_upper=tuple(enumerate(qd.qn_history)),
        mu=mu,
        markov_constant=markov,
    )
