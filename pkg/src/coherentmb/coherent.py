"""Coherent measure pairs: case descriptors, norms, and extremal bases.

A case couples two positive measures (c0, c1) so that the c1-orthogonal
monic polynomial of degree n is a fixed two-term combination of derivatives
of consecutive c0-orthogonal ones:

    T_n = P'_{n+1}/(n+1) - sigma_n P'_n / n.

Everything downstream (the tridiagonal eigenproblem, the bounds, the
extremal polynomials) is driven by three sequences per case: the coupling
coefficients sigma_n and the squared norms c0(P_n^2), c1(T_n^2), kept as
signed values and log-magnitudes so no supported n overflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import LossOfSignificance, ValidationError
from .functionals import jacobi_d_moments, laguerre_c_moments
from .orthopoly import (
    JacobiParams,
    LaguerreParams,
    jacobi_eval,
    jacobi_log_norm,
    jacobi_recurrence_coeffs,
    laguerre_eval,
    laguerre_log_norm,
)

__all__ = [
    "CoherentCase",
    "PairData",
    "CASE_TAGS",
    "pair_data",
    "sigma",
    "log_k0",
    "log_k1",
    "p_eval",
    "t_eval",
    "coherence_residual",
]

CASE_TAGS = (
    "laguerre-a",
    "laguerre-b",
    "laguerre-c",
    "jacobi-a",
    "jacobi-b",
    "jacobi-c",
    "jacobi-d",
)

# Which parameters each tag accepts (mass-free tags must leave mass at 0).
_FIELDS = {
    "laguerre-a": ("alpha", "xi"),
    "laguerre-b": ("mass",),
    "laguerre-c": ("alpha", "xi", "mass"),
    "jacobi-a": ("alpha", "beta", "xi"),
    "jacobi-b": ("gamma", "mass"),
    "jacobi-c": ("gamma", "mass"),
    "jacobi-d": ("alpha", "beta", "xi", "mass"),
}


@dataclass(frozen=True)
class CoherentCase:
    """One of the seven supported measure pairs, with validated parameters."""

    tag: str
    alpha: float | None = None
    beta: float | None = None
    gamma: float | None = None
    xi: float | None = None
    mass: float = 0.0

    def __post_init__(self) -> None:
        if self.tag not in CASE_TAGS:
            raise ValidationError(f"unknown case tag {self.tag!r}; expected one of {CASE_TAGS}")
        allowed = _FIELDS[self.tag]
        for name in ("alpha", "beta", "gamma", "xi"):
            val = getattr(self, name)
            if name in allowed:
                if val is None:
                    raise ValidationError(f"{self.tag} requires parameter {name}")
                if not math.isfinite(val):
                    raise ValidationError(f"{self.tag}: {name} must be finite, got {val}")
            elif val is not None:
                raise ValidationError(f"{self.tag} does not take parameter {name}")
        if "mass" in allowed:
            if not (math.isfinite(self.mass) and self.mass >= 0.0):
                raise ValidationError(f"{self.tag}: mass must be finite and >= 0, got {self.mass}")
        elif self.mass != 0.0:
            raise ValidationError(f"{self.tag} does not take a point mass")
        self._check_ranges()

    def _check_ranges(self) -> None:
        tag = self.tag
        if tag == "laguerre-a":
            if not self.alpha > 0.0:
                raise ValidationError(f"laguerre-a needs alpha > 0, got {self.alpha}")
            if not self.xi < 0.0:
                raise ValidationError(f"laguerre-a needs xi < 0, got {self.xi}")
        elif tag == "laguerre-c":
            if not self.alpha > -1.0:
                raise ValidationError(f"laguerre-c needs alpha > -1, got {self.alpha}")
            if not self.xi <= 0.0:
                raise ValidationError(f"laguerre-c needs xi <= 0, got {self.xi}")
        elif tag == "jacobi-a":
            if not (self.alpha > 0.0 and self.beta > 0.0):
                raise ValidationError(
                    f"jacobi-a needs alpha, beta > 0, got ({self.alpha}, {self.beta})"
                )
            if not abs(self.xi) > 1.0:
                raise ValidationError(f"jacobi-a needs |xi| > 1, got {self.xi}")
        elif tag in ("jacobi-b", "jacobi-c"):
            if not self.gamma > 0.0:
                raise ValidationError(f"{tag} needs gamma > 0, got {self.gamma}")
        elif tag == "jacobi-d":
            if not (self.alpha > -1.0 and self.beta > -1.0):
                raise ValidationError(
                    f"jacobi-d needs alpha, beta > -1, got ({self.alpha}, {self.beta})"
                )
            if not abs(self.xi) >= 1.0:
                raise ValidationError(f"jacobi-d needs |xi| >= 1, got {self.xi}")

    @property
    def epsilon(self) -> float:
        """Orientation sign of the linear factor for the Jacobi cases."""
        if self.tag == "jacobi-a":
            return 1.0 if self.xi < -1.0 else -1.0
        if self.tag == "jacobi-b":
            return 1.0
        if self.tag == "jacobi-c":
            return -1.0
        if self.tag == "jacobi-d":
            return 1.0 if self.xi <= -1.0 else -1.0
        raise ValidationError(f"epsilon is not defined for {self.tag}")

    def describe(self) -> str:
        parts = [self.tag]
        for name in _FIELDS[self.tag]:
            key = "M" if name == "mass" else name
            parts.append(f"{key}={getattr(self, name):g}")
        return " ".join(parts)

    # Named constructors, one per supported pair.
    @classmethod
    def laguerre_a(cls, alpha: float, xi: float) -> "CoherentCase":
        return cls("laguerre-a", alpha=alpha, xi=xi)

    @classmethod
    def laguerre_b(cls, mass: float) -> "CoherentCase":
        return cls("laguerre-b", mass=mass)

    @classmethod
    def laguerre_c(cls, alpha: float, xi: float, mass: float = 0.0) -> "CoherentCase":
        return cls("laguerre-c", alpha=alpha, xi=xi, mass=mass)

    @classmethod
    def jacobi_a(cls, alpha: float, beta: float, xi: float) -> "CoherentCase":
        return cls("jacobi-a", alpha=alpha, beta=beta, xi=xi)

    @classmethod
    def jacobi_b(cls, gamma: float, mass: float = 0.0) -> "CoherentCase":
        return cls("jacobi-b", gamma=gamma, mass=mass)

    @classmethod
    def jacobi_c(cls, gamma: float, mass: float = 0.0) -> "CoherentCase":
        return cls("jacobi-c", gamma=gamma, mass=mass)

    @classmethod
    def jacobi_d(cls, alpha: float, beta: float, xi: float, mass: float = 0.0) -> "CoherentCase":
        return cls("jacobi-d", alpha=alpha, beta=beta, xi=xi, mass=mass)


@dataclass(frozen=True)
class PairData:
    """sigma_n, log c0(P_n^2), log c1(T_n^2) for n up to a fixed degree."""

    case: CoherentCase
    sigmas: np.ndarray  # index 0 unused (nan); signed
    log_k0s: np.ndarray
    log_k1s: np.ndarray

    @property
    def n_max(self) -> int:
        return len(self.sigmas) - 1

    def sigma_at(self, n: int) -> float:
        if not 1 <= n <= self.n_max:
            raise ValidationError(f"sigma is defined for 1 <= n <= {self.n_max}, got {n}")
        return float(self.sigmas[n])

    def log_k0_at(self, n: int) -> float:
        if not 0 <= n <= self.n_max:
            raise ValidationError(f"index out of range: {n}")
        return float(self.log_k0s[n])

    def log_k1_at(self, n: int) -> float:
        if not 0 <= n <= self.n_max:
            raise ValidationError(f"index out of range: {n}")
        return float(self.log_k1s[n])


def _laguerre_a_ratios(alpha: float, xi: float, n_max: int) -> np.ndarray:
    """Forward ratios of the base-family values at the pole location.

    r_n = A_{n+1}(xi)/A_n(xi) for the Laguerre(alpha-1) family; the forward
    direction is the stable one here because xi sits left of the support, so
    these are dominant-solution ratios.  Every r_n must stay negative.
    """
    r = np.empty(n_max + 1)
    r[0] = xi - alpha
    for j in range(1, n_max + 1):
        r[j] = (xi - 2.0 * j - alpha) - j * (j + alpha - 1.0) / r[j - 1]
    if not np.all(r < 0.0):
        raise LossOfSignificance("pole-value ratio left its sign range; parameters too extreme")
    return r


def _jacobi_a_ratios(alpha: float, beta: float, xi: float, eps: float, n_max: int) -> np.ndarray:
    """Same forward ratio chain for the Jacobi(alpha-1, beta-1) family at xi."""
    b, c = jacobi_recurrence_coeffs(alpha - 1.0, beta - 1.0, n_max + 1)
    r = np.empty(n_max + 1)
    r[0] = xi - b[0]
    for j in range(1, n_max + 1):
        r[j] = (xi - b[j]) - c[j] / r[j - 1]
    if not np.all(-eps * r > 0.0):
        raise LossOfSignificance("pole-value ratio left its sign range; parameters too extreme")
    return r


def _build_arrays(case: CoherentCase, n_max: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    sig = np.full(n_max + 1, np.nan)
    lk0 = np.empty(n_max + 1)
    lk1 = np.empty(n_max + 1)
    tag = case.tag

    if tag == "laguerre-a":
        a, xi = case.alpha, case.xi
        r = _laguerre_a_ratios(a, xi, n_max)
        for n in range(n_max + 1):
            lk0[n] = math.lgamma(n + 1.0) + math.lgamma(a + n) + math.log(-r[n])
            lk1[n] = math.lgamma(n + 1.0) + math.lgamma(a + n + 1.0)
            if n >= 1:
                sig[n] = n * (n + a) / r[n]

    elif tag == "laguerre-b":
        m = case.mass
        for n in range(n_max + 1):
            lk0[n] = (
                2.0 * math.lgamma(n + 1.0)
                + math.log((n + 1.0) * m + 1.0)
                - math.log(n * m + 1.0)
            )
            lk1[n] = 2.0 * math.lgamma(n + 1.0)
            if n >= 1:
                sig[n] = -n * (1.0 + n * m) / ((n + 1.0) * m + 1.0)

    elif tag == "laguerre-c":
        a, xi, m = case.alpha, case.xi, case.mass
        mom = laguerre_c_moments(a, xi, m, n_max)
        base0 = LaguerreParams(a)
        lk1[0] = mom.log_abs[0]
        if mom.signs[0] <= 0.0:
            raise LossOfSignificance("zeroth derivative-side moment must be positive")
        for n in range(n_max + 1):
            lk0[n] = laguerre_log_norm(base0, n)
            if n >= 1:
                sig[n] = float(mom.signs[n] * mom.signs[n - 1]) * math.exp(
                    float(mom.log_abs[n] - mom.log_abs[n - 1])
                )
                lk1[n] = (
                    math.lgamma(n)  # (n-1)!
                    + math.lgamma(a + 1.0 + n)  # Gamma(alpha+1 + (n-1) + 1)
                    + float(mom.log_abs[n] - mom.log_abs[n - 1])
                )

    elif tag == "jacobi-a":
        a, b, xi, eps = case.alpha, case.beta, case.xi, case.epsilon
        s = a + b
        r = _jacobi_a_ratios(a, b, xi, eps, n_max)
        base0 = JacobiParams(a - 1.0, b - 1.0)
        base1 = JacobiParams(a, b)
        for n in range(n_max + 1):
            lk0[n] = jacobi_log_norm(base0, n) + math.log(abs(r[n]))
            lk1[n] = jacobi_log_norm(base1, n)
            if n >= 1:
                t = 2.0 * n + s
                sig[n] = (
                    4.0 * n * (n + a) * (n + b) * (n + s - 1.0)
                    / ((t - 1.0) * t * t * (t + 1.0) * r[n])
                )

    elif tag in ("jacobi-b", "jacobi-c"):
        g, m, eps = case.gamma, case.mass, case.epsilon
        pow2g = 2.0**g

        def nu(n: int) -> float:
            return pow2g if n < 0 else pow2g + (n + 1.0) * m * (n + g)

        base1 = JacobiParams(0.0, g)
        for n in range(n_max + 1):
            t = 2.0 * n + g
            lk0[n] = (
                2.0 * (math.lgamma(n + g) - math.lgamma(t))
                + t * math.log(2.0)
                + 2.0 * math.lgamma(n + 1.0)
                - math.log(t)
                + math.log(nu(n))
                - math.log(nu(n - 1))
            )
            lk1[n] = jacobi_log_norm(base1, n)
            if n >= 1:
                sig[n] = 2.0 * eps * n * (n + g) * nu(n - 1) / (t * (t + 1.0) * nu(n))

    elif tag == "jacobi-d":
        a, b, xi, eps, m = case.alpha, case.beta, case.xi, case.epsilon, case.mass
        mom = jacobi_d_moments(a, b, xi, eps, m, n_max)
        base0 = JacobiParams(a, b)
        base1 = JacobiParams(a + 1.0, b + 1.0)
        lk1[0] = mom.log_abs[0]
        if mom.signs[0] <= 0.0:
            raise LossOfSignificance("zeroth derivative-side moment must be positive")
        for n in range(n_max + 1):
            lk0[n] = jacobi_log_norm(base0, n)
            if n >= 1:
                sig[n] = float(mom.signs[n] * mom.signs[n - 1]) * math.exp(
                    float(mom.log_abs[n] - mom.log_abs[n - 1])
                )
                lk1[n] = jacobi_log_norm(base1, n - 1) + float(
                    mom.log_abs[n] - mom.log_abs[n - 1]
                )

    else:  # pragma: no cover - tags validated at construction
        raise ValidationError(f"unknown case tag {tag!r}")

    _check_sign_pattern(case, sig, n_max)
    if not (np.all(np.isfinite(lk0)) and np.all(np.isfinite(lk1))):
        raise LossOfSignificance("norm sequence is not finite; parameters too extreme")
    return sig, lk0, lk1


def _expected_sigma_sign(case: CoherentCase) -> float:
    tag = case.tag
    if tag in ("laguerre-a", "laguerre-c"):
        return -1.0
    if tag in ("jacobi-a", "jacobi-d"):
        return -case.epsilon
    if tag in ("jacobi-b", "jacobi-c"):
        return case.epsilon
    return -1.0  # laguerre-b


def _check_sign_pattern(case: CoherentCase, sig: np.ndarray, n_max: int) -> None:
    if n_max < 1:
        return
    want = _expected_sigma_sign(case)
    # A zero sigma (possible only for laguerre-b at n with degenerate mass
    # algebra, which cannot happen for mass >= 0) would break the coupling.
    body = sig[1:]
    if not (np.all(np.isfinite(body)) and np.all(want * body > 0.0)):
        raise LossOfSignificance(
            f"coupling coefficients broke their sign pattern for {case.describe()}"
        )


@lru_cache(maxsize=64)
def _pair_data_cached(case: CoherentCase, n_max: int) -> PairData:
    sig, lk0, lk1 = _build_arrays(case, n_max)
    for arr in (sig, lk0, lk1):
        arr.setflags(write=False)
    return PairData(case, sig, lk0, lk1)


def pair_data(case: CoherentCase, n_max: int) -> PairData:
    """Coupling and norm sequences for degrees 0..n_max (cached per case)."""
    if n_max < 0:
        raise ValidationError(f"n_max must be >= 0, got {n_max}")
    return _pair_data_cached(case, n_max)


def sigma(case: CoherentCase, n: int) -> float:
    """Coupling coefficient sigma_n (n >= 1)."""
    if n < 1:
        raise ValidationError(f"sigma is defined for n >= 1, got {n}")
    return pair_data(case, n).sigma_at(n)


def log_k0(case: CoherentCase, n: int) -> float:
    """log c0(P_n^2)."""
    return pair_data(case, max(n, 0)).log_k0_at(n)


def log_k1(case: CoherentCase, n: int) -> float:
    """log c1(T_n^2)."""
    return pair_data(case, max(n, 0)).log_k1_at(n)


# --------------------------------------------------------------------------
# Pointwise evaluation of the two orthogonal families.
# --------------------------------------------------------------------------


def _family_values(kind: str, params, n: int, x: float) -> np.ndarray:
    ev = laguerre_eval(params, n, x) if kind == "laguerre" else jacobi_eval(params, n, x)
    return np.array([ev.value(j) for j in range(n + 1)])


def _family_derivs(kind: str, params, n: int, x: float) -> np.ndarray:
    """d/dx of the monic family: n times the degree-lowered, shifted family."""
    out = np.zeros(n + 1)
    if n == 0:
        return out
    if kind == "laguerre":
        shifted = _family_values("laguerre", LaguerreParams(params.alpha + 1.0), n - 1, x)
    else:
        shifted = _family_values(
            "jacobi", JacobiParams(params.alpha + 1.0, params.beta + 1.0), n - 1, x
        )
    for j in range(1, n + 1):
        out[j] = j * shifted[j - 1]
    return out


def _p_base(case: CoherentCase):
    """(kind, params, style, location) describing how P is realized."""
    tag = case.tag
    if tag == "laguerre-a":
        return "laguerre", LaguerreParams(case.alpha - 1.0), "divided-difference", case.xi
    if tag == "laguerre-b":
        return "laguerre", LaguerreParams(0.0), "point-mass", 0.0
    if tag == "laguerre-c":
        return "laguerre", LaguerreParams(case.alpha), "classical", None
    if tag == "jacobi-a":
        return (
            "jacobi",
            JacobiParams(case.alpha - 1.0, case.beta - 1.0),
            "divided-difference",
            case.xi,
        )
    if tag == "jacobi-b":
        return "jacobi", JacobiParams(0.0, case.gamma - 1.0), "point-mass", 1.0
    if tag == "jacobi-c":
        return "jacobi", JacobiParams(case.gamma - 1.0, 0.0), "point-mass", -1.0
    return "jacobi", JacobiParams(case.alpha, case.beta), "classical", None


def _log_norms(kind: str, params, n: int) -> np.ndarray:
    if kind == "laguerre":
        return np.array([laguerre_log_norm(params, j) for j in range(n + 1)])
    return np.array([jacobi_log_norm(params, j) for j in range(n + 1)])


def _pole_ratios(case: CoherentCase, n_max: int) -> np.ndarray:
    if case.tag == "laguerre-a":
        return _laguerre_a_ratios(case.alpha, case.xi, n_max)
    return _jacobi_a_ratios(case.alpha, case.beta, case.xi, case.epsilon, n_max)


def p_eval(
    case: CoherentCase, n: int, x: float, *, derivative: bool = False
) -> tuple[np.ndarray, np.ndarray | None]:
    """Values (and optionally derivatives) of P_0..P_n at x.

    P is the monic family orthogonal for c0.  The realization depends on the
    case: classical family, quotient against the linear factor (with a
    reproducing-kernel form when x is within 1e-8 of the factor's root), or
    a point-mass (kernel-corrected) modification of a classical family.
    Evaluation is linear-scale and intended for moderate degrees on the
    support of the measures.
    """
    if n < 0:
        raise ValidationError(f"degree must be >= 0, got {n}")
    kind, params, style, loc = _p_base(case)

    if style == "classical":
        vals = _family_values(kind, params, n, x)
        ders = _family_derivs(kind, params, n, x) if derivative else None
        return vals, ders

    if style == "divided-difference":
        xi = loc
        base_vals = _family_values(kind, params, n + 1, x)
        ratios = _pole_ratios(case, n)
        if abs(x - xi) > 1e-8 * (1.0 + abs(xi)):
            vals = (base_vals[1 : n + 2] - ratios * base_vals[: n + 1]) / (x - xi)
            # the degree-0 quotient is exactly 1; pin it to kill its roundoff
            vals[0] = 1.0
            if not derivative:
                return vals, None
            base_ders = _family_derivs(kind, params, n + 1, x)
            ders = (base_ders[1 : n + 2] - ratios * base_ders[: n + 1] - vals) / (x - xi)
            ders[0] = 0.0
            return vals, ders
        # Kernel form at the root: P_j(x) = k_j K_j(x, xi) / p_j(xi).
        pole_vals = _family_values(kind, params, n, xi)
        log_k = _log_norms(kind, params, n)
        ks = np.exp(log_k)
        terms = base_vals[: n + 1] * pole_vals / ks
        kern = np.cumsum(terms)
        vals = ks * kern / pole_vals
        vals[0] = 1.0
        if not derivative:
            return vals, None
        base_ders = _family_derivs(kind, params, n, x)
        dterms = base_ders * pole_vals / ks
        dkern = np.cumsum(dterms)
        ders = ks * dkern / pole_vals
        ders[0] = 0.0
        return vals, ders

    # Point-mass style: P_j = p_j - kappa_j K_{j-1}(x, loc).
    m = case.mass
    vals_x = _family_values(kind, params, n, x)
    if m == 0.0:
        ders = _family_derivs(kind, params, n, x) if derivative else None
        return vals_x, ders
    vals_loc = _family_values(kind, params, n, loc)
    ks = np.exp(_log_norms(kind, params, n))
    kern_x = np.cumsum(vals_x * vals_loc / ks)  # K_j(x, loc)
    kern_loc = np.cumsum(vals_loc * vals_loc / ks)  # K_j(loc, loc)
    vals = vals_x.copy()
    kappas = np.zeros(n + 1)
    for j in range(1, n + 1):
        kappas[j] = m * vals_loc[j] / (1.0 + m * kern_loc[j - 1])
        vals[j] = vals_x[j] - kappas[j] * kern_x[j - 1]
    if not derivative:
        return vals, None
    ders_x = _family_derivs(kind, params, n, x)
    dkern_x = np.cumsum(ders_x * vals_loc / ks)
    ders = ders_x.copy()
    for j in range(1, n + 1):
        ders[j] = ders_x[j] - kappas[j] * dkern_x[j - 1]
    return vals, ders


def _t_base(case: CoherentCase):
    """(kind, params, combined) describing how T is realized."""
    tag = case.tag
    if tag == "laguerre-a":
        return "laguerre", LaguerreParams(case.alpha), False
    if tag == "laguerre-b":
        return "laguerre", LaguerreParams(0.0), False
    if tag == "laguerre-c":
        return "laguerre", LaguerreParams(case.alpha + 1.0), True
    if tag == "jacobi-a":
        return "jacobi", JacobiParams(case.alpha, case.beta), False
    if tag == "jacobi-b":
        return "jacobi", JacobiParams(0.0, case.gamma), False
    if tag == "jacobi-c":
        return "jacobi", JacobiParams(case.gamma, 0.0), False
    return "jacobi", JacobiParams(case.alpha + 1.0, case.beta + 1.0), True


def t_eval(case: CoherentCase, n: int, x: float) -> np.ndarray:
    """Values of T_0..T_n at x (the monic c1-orthogonal family)."""
    if n < 0:
        raise ValidationError(f"degree must be >= 0, got {n}")
    kind, params, combined = _t_base(case)
    base_vals = _family_values(kind, params, n, x)
    if not combined:
        return base_vals
    if n == 0:
        return np.array([1.0])
    data = pair_data(case, n)
    out = np.empty(n + 1)
    out[0] = 1.0
    for j in range(1, n + 1):
        out[j] = base_vals[j] - data.sigma_at(j) * base_vals[j - 1]
    return out


def coherence_residual(case: CoherentCase, n: int, x: float) -> float:
    """Relative defect of T_n = P'_{n+1}/(n+1) - sigma_n P'_n / n at x.

    Near zero (1e-9 or so) for every supported case and moderate n; this is
    the structural identity the whole construction rests on, so it doubles
    as an end-to-end check of the evaluators and the coupling coefficients.
    """
    if n < 1:
        raise ValidationError(f"residual is defined for n >= 1, got {n}")
    _, ders = p_eval(case, n + 1, x, derivative=True)
    tvals = t_eval(case, n, x)
    s = sigma(case, n)
    term1 = ders[n + 1] / (n + 1.0)
    term2 = s * ders[n] / n
    lhs = tvals[n]
    scale = max(abs(lhs), abs(term1), abs(term2), 1e-300)
    return (lhs - (term1 - term2)) / scale
