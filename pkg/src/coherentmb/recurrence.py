"""Tridiagonal representation of the extremal eigenproblem.

The sharp constant for degree n is 1/sqrt(mu) where mu is the smallest
eigenvalue of a real symmetric positive-definite tridiagonal matrix K built
from the pair sequences.  Its characteristic polynomial satisfies

    A_0 = 1,  A_1 = lam - d_1,
    A_j(lam) = (lam - d_j) A_{j-1}(lam) - o_{j-1} A_{j-2}(lam),

with d_j the diagonal of K and o_j the squared off-diagonal entries.

Sign convention, normalized here and nowhere else: the bilinear identities
behind these coefficients arrive most naturally as det(lam I + B) with B
having a negative diagonal.  This module stores K = -B, so K is positive
definite, every d_j and o_j below is positive, and the target mu is the
smallest zero of A_n.  Downstream code never needs to think about the flip.

Two independent builders produce the same matrix: a generic one straight
from the norm/coupling sequences, and a specialized one using per-case
cancelled forms of the same entries.  Their entrywise agreement is one of
the package's consistency gates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import _kernels
from .coherent import CoherentCase, pair_data
from .errors import LossOfSignificance, ValidationError
from .functionals import jacobi_d_moments, laguerre_c_moments
from .orthopoly import JacobiParams, jacobi_log_norm

__all__ = [
    "RecurrenceSpec",
    "ScaledPolyValue",
    "SignedLog",
    "build_generic",
    "build_specialized",
    "eval_An",
    "an_at_zero",
]

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class ScaledPolyValue:
    """A float with a separated binary exponent: value = mantissa * 2^exponent.

    The mantissa is frexp-normalized (|mantissa| in [0.5, 1), or exactly 0),
    so magnitudes far beyond double range stay representable.
    """

    mantissa: float
    exponent: int

    @classmethod
    def from_parts(cls, value: float, exponent: int = 0) -> "ScaledPolyValue":
        if value == 0.0:
            return cls(0.0, 0)
        m, e = math.frexp(value)
        return cls(m, e + exponent)

    @property
    def sign(self) -> float:
        if self.mantissa == 0.0:
            return 0.0
        return math.copysign(1.0, self.mantissa)

    def log_abs(self) -> float:
        if self.mantissa == 0.0:
            return -math.inf
        return math.log(abs(self.mantissa)) + self.exponent * _LN2

    def value(self) -> float:
        """Collapse to a plain float; over/underflows for extreme exponents."""
        return math.ldexp(self.mantissa, self.exponent)


@dataclass(frozen=True)
class SignedLog:
    """sign in {-1, 0, +1} with log|value|; exact across huge dynamic range."""

    sign: float
    log_abs: float

    def value(self) -> float:
        if self.sign == 0.0:
            return 0.0
        return self.sign * math.exp(self.log_abs)


@dataclass(frozen=True, eq=False)
class RecurrenceSpec:
    """Dimension n, positive diagonal d_1..d_n, squared off-diagonal o_1..o_{n-1}."""

    n: int
    diag: np.ndarray
    offdiag_sq: np.ndarray
    a1_constant: float  # A_1(lam) = lam - a1_constant; equals diag[0]
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValidationError(f"matrix dimension must be >= 1, got {self.n}")
        if len(self.diag) != self.n or len(self.offdiag_sq) != self.n - 1:
            raise ValidationError("diagonal/off-diagonal lengths do not match n")
        if not (np.all(np.isfinite(self.diag)) and np.all(self.diag > 0.0)):
            raise LossOfSignificance("diagonal entries must be positive and finite")
        if len(self.offdiag_sq) and not (
            np.all(np.isfinite(self.offdiag_sq)) and np.all(self.offdiag_sq > 0.0)
        ):
            raise LossOfSignificance("squared off-diagonal entries must be positive and finite")
        if self.a1_constant != self.diag[0]:
            raise ValidationError("a1_constant must equal the first diagonal entry")

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "diag": [float(v) for v in self.diag],
            "offdiag_sq": [float(v) for v in self.offdiag_sq],
            "a1_constant": float(self.a1_constant),
            "meta": dict(self.meta),
        }


def _finish(case: CoherentCase, diag: np.ndarray, off: np.ndarray, builder: str) -> RecurrenceSpec:
    diag = np.ascontiguousarray(diag, dtype=np.float64)
    off = np.ascontiguousarray(off, dtype=np.float64)
    diag.setflags(write=False)
    off.setflags(write=False)
    return RecurrenceSpec(
        n=len(diag),
        diag=diag,
        offdiag_sq=off,
        a1_constant=float(diag[0]),
        meta={"case": case.describe(), "builder": builder},
    )


def build_generic(case: CoherentCase, n: int) -> RecurrenceSpec:
    """Matrix entries assembled directly from the norm/coupling sequences.

    d_1 = k0_1 / k1_0,
    d_i = k0_i/(i^2 k1_{i-1}) + sigma_{i-1}^2 k0_{i-1}/((i-1)^2 k1_{i-1}),
    o_j = sigma_j^2 k0_j^2 / (j^4 k1_{j-1} k1_j),

    evaluated in log space so nothing overflows before the final exp (every
    finished entry is a modest number even when the norms are astronomical).
    """
    if n < 1:
        raise ValidationError(f"dimension must be >= 1, got {n}")
    data = pair_data(case, n)
    diag = np.empty(n)
    off = np.empty(n - 1)
    diag[0] = math.exp(data.log_k0_at(1) - data.log_k1_at(0))
    for i in range(2, n + 1):
        li, lprev = math.log(i), math.log(i - 1.0)
        s = data.sigma_at(i - 1)
        diag[i - 1] = math.exp(
            data.log_k0_at(i) - 2.0 * li - data.log_k1_at(i - 1)
        ) + s * s * math.exp(data.log_k0_at(i - 1) - 2.0 * lprev - data.log_k1_at(i - 1))
    for j in range(1, n):
        s = data.sigma_at(j)
        off[j - 1] = s * s * math.exp(
            2.0 * data.log_k0_at(j)
            - 4.0 * math.log(j)
            - data.log_k1_at(j - 1)
            - data.log_k1_at(j)
        )
    return _finish(case, diag, off, "generic")


def _specialized_laguerre_self(alpha: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    # Pole weight degenerated away entirely: the classical self-coherent
    # Laguerre pair.  These literal expressions are the reference the
    # vanishing-pole limit of the shifted family must reproduce.
    diag = np.empty(n)
    off = np.empty(n - 1)
    diag[0] = alpha + 1.0
    for i in range(2, n + 1):
        diag[i - 1] = 2.0 + alpha / i
    for j in range(1, n):
        off[j - 1] = 1.0 + alpha / j
    return diag, off


def build_specialized(case: CoherentCase, n: int) -> RecurrenceSpec:
    """Matrix entries from per-case cancelled closed forms.

    Algebraically identical to build_generic but evaluated along different
    expression paths, which makes the pair a strong mutual check.  For the
    shifted-pole cases the entries still consume the stabilized moment
    sequence, but combined as quotient/remainder factors rather than through
    the norm sequences.
    """
    if n < 1:
        raise ValidationError(f"dimension must be >= 1, got {n}")
    tag = case.tag
    diag = np.empty(n)
    off = np.empty(n - 1)

    if tag == "laguerre-a":
        a, xi = case.alpha, case.xi
        diag[0] = a + 1.0 - xi + xi / (xi - a)
        for i in range(2, n + 1):
            diag[i - 1] = 2.0 + (a - xi) / i
        for j in range(1, n):
            off[j - 1] = 1.0 + a / j

    elif tag == "laguerre-b":
        m = case.mass
        diag[0] = (1.0 + 2.0 * m) / (1.0 + m)
        diag[1:] = 2.0
        off[:] = 1.0

    elif tag == "laguerre-c":
        a, xi, m = case.alpha, case.xi, case.mass
        if xi == 0.0 and m == 0.0:
            diag, off = _specialized_laguerre_self(a, n)
        else:
            lt = _moment_logs(case, n)
            diag[0] = math.exp(math.lgamma(a + 2.0) - lt[0])
            for i in range(2, n + 1):
                q_i = (i - 1.0) * (i + a) / i * math.exp(lt[i - 2] - lt[i - 1])
                e_prev = math.exp(lt[i - 1] - lt[i - 2]) / (i - 1.0)
                diag[i - 1] = q_i + e_prev
            if n >= 2:
                off[0] = math.exp(math.lgamma(a + 2.0) + lt[1] - 2.0 * lt[0])
            for j in range(2, n):
                off[j - 1] = (
                    (j - 1.0) * (j + a) / (j * j) * math.exp(lt[j - 2] + lt[j] - 2.0 * lt[j - 1])
                )

    elif tag == "jacobi-a":
        a, b, xi, eps = case.alpha, case.beta, case.xi, case.epsilon
        s = a + b
        diag[0] = (
            -eps
            * ((1.0 + s) * (2.0 + s) * xi * xi + 2.0 * (a - b) * (1.0 + s) * xi + (a - b) ** 2 - (2.0 + s))
            / ((1.0 + s) * (2.0 + s) * (xi * s - b + a))
        )
        for i in range(2, n + 1):
            t = 2.0 * i + s
            diag[i - 1] = (
                -eps * (xi - (b - a) * (s - 2.0) / ((t - 2.0) * t)) / (i * (i + s - 1.0))
            )
        for j in range(1, n):
            t = 2.0 * j + s
            off[j - 1] = 4.0 * (j + a) * (j + b) / (j * (j + s) * (t + 1.0) * t * t * (t - 1.0))

    elif tag in ("jacobi-b", "jacobi-c"):
        g, m = case.gamma, case.mass
        pow2g = 2.0**g

        def nu(k: int) -> float:
            return pow2g if k < 0 else pow2g + (k + 1.0) * m * (k + g)

        diag[0] = 2.0 * nu(1) / ((g + 1.0) * (g + 2.0) * nu(0))
        for i in range(2, n + 1):
            t = 2.0 * i + g
            diag[i - 1] = 2.0 * nu(i) / ((t - 1.0) * t * nu(i - 1)) + 2.0 * nu(i - 2) / (
                (t - 2.0) * (t - 1.0) * nu(i - 1)
            )
        for j in range(1, n):
            t = 2.0 * j + g
            off[j - 1] = 4.0 / ((t - 1.0) * t * t * (t + 1.0))

    elif tag == "jacobi-d":
        a, b, xi = case.alpha, case.beta, case.xi
        s = a + b
        lu = _moment_logs(case, n)
        diag[0] = math.exp(jacobi_log_norm(JacobiParams(a, b), 1) - lu[0])
        for i in range(2, n + 1):
            t = 2.0 * i + s
            q_i = (
                4.0 * (i - 1.0) * (i + a) * (i + b)
                / (i * (t + 1.0) * (t - 1.0) * t * t)
                * math.exp(lu[i - 2] - lu[i - 1])
            )
            e_prev = math.exp(lu[i - 1] - lu[i - 2]) / ((i - 1.0) * (i + s))
            diag[i - 1] = q_i + e_prev
        if n >= 2:
            off[0] = math.exp(
                jacobi_log_norm(JacobiParams(a, b), 1) + lu[1] - 2.0 * lu[0]
            ) / (s + 2.0)
        for j in range(2, n):
            t = 2.0 * j + s
            off[j - 1] = (
                4.0 * (j - 1.0) * (j + a) * (j + b)
                / (j * j * (j + s + 1.0) * (t + 1.0) * (t - 1.0) * t * t)
                * math.exp(lu[j - 2] + lu[j] - 2.0 * lu[j - 1])
            )

    else:  # pragma: no cover - tags validated at construction
        raise ValidationError(f"unknown case tag {tag!r}")

    return _finish(case, diag, off, "specialized")


def _moment_logs(case: CoherentCase, n: int) -> np.ndarray:
    """log-magnitudes of the derivative-side moment sequence, 0..n."""
    if case.tag == "laguerre-c":
        mom = laguerre_c_moments(case.alpha, case.xi, case.mass, n)
    else:
        mom = jacobi_d_moments(
            case.alpha, case.beta, case.xi, case.epsilon, case.mass, n
        )
    return mom.log_abs


def eval_An(
    spec: RecurrenceSpec, lam: float, derivatives: int = 0
) -> tuple[ScaledPolyValue, ...]:
    """A_n(lam) and up to two derivatives, with a shared binary exponent.

    The three-term recurrence and its differentiated companions are run
    together; all carried values share one exponent that is rescaled in
    lockstep, so the results are exact in sign and log-magnitude even when
    A_n itself is far outside double range.
    """
    if derivatives not in (0, 1, 2):
        raise ValidationError(f"derivatives must be 0, 1, or 2, got {derivatives}")
    a, ap, app, e = _kernels.eval_charpoly(spec.diag, spec.offdiag_sq, float(lam))
    out = (
        ScaledPolyValue.from_parts(a, e),
        ScaledPolyValue.from_parts(ap, e),
        ScaledPolyValue.from_parts(app, e),
    )
    return out[: derivatives + 1]


def an_at_zero(spec: RecurrenceSpec) -> tuple[SignedLog, SignedLog]:
    """(A_n(0), A_n'(0)) as signed logs.

    A_n(0) = (-1)^n det K, and when the elimination pivots of K are all
    positive (they are, K being positive definite, barring extreme rounding)
    the determinant is their product, accumulated in log space.  A_n'(0)
    comes from the shared-exponent recurrence evaluation.
    """
    n = spec.n
    pivots_ok = True
    log_det = 0.0
    p = 0.0
    for i in range(n):
        p = spec.diag[i] - (spec.offdiag_sq[i - 1] / p if i >= 1 else 0.0)
        if not p > 0.0:
            pivots_ok = False
            break
        log_det += math.log(p)
    if pivots_ok:
        a0 = SignedLog((-1.0) ** n, log_det)
        _, apv = eval_An(spec, 0.0, derivatives=1)
        a0p = SignedLog(apv.sign, apv.log_abs())
    else:
        av, apv = eval_An(spec, 0.0, derivatives=1)
        a0 = SignedLog(av.sign, av.log_abs())
        a0p = SignedLog(apv.sign, apv.log_abs())
    return a0, a0p
