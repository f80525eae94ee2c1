"""Numerical linear functionals for the seven measure pairs.

Two layers live here.  The generic layer is Gauss quadrature: rules for the
classical Laguerre/Jacobi weights via Golub-Welsch, with polynomial or
rational smooth factors folded into the integrand and point masses added
exactly.  The special layer is the two non-classical moment sequences
c1(L_n^{alpha+1}) and c1(P_n^{(alpha+1,beta+1)}), which are computed by
closed forms where those exist and otherwise by a backward (minimal-solution)
ratio recurrence anchored with quadrature, since the forward recurrence for
these moments is violently unstable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING, Callable, Union

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.linalg import eigh_tridiagonal

from .errors import (
    DegenerateFunctional,
    LossOfSignificance,
    QuadratureBudgetError,
    ValidationError,
)
from .orthopoly import (
    JacobiParams,
    LaguerreParams,
    jacobi_eval,
    jacobi_log_norm,
    jacobi_recurrence_coeffs,
    laguerre_eval,
    laguerre_log_norm,
    laguerre_recurrence_coeffs,
)

if TYPE_CHECKING:
    from .coherent import CoherentCase

__all__ = [
    "QuadratureRule",
    "MomentSequence",
    "gauss_rule",
    "apply",
    "laguerre_c_moments",
    "jacobi_d_moments",
    "functional_apply",
]

_LN2 = math.log(2.0)
_LN10 = math.log(10.0)
WeightParams = Union[LaguerreParams, JacobiParams]
Integrand = Union[Callable[[np.ndarray], np.ndarray], np.ndarray, list, tuple]

# Node-count policy: adaptive paths start here and double up to the cap.
_ADAPTIVE_START = 64
# Near-support poles (|xi| down to ~0.05 on the half line) need on the
# order of a thousand nodes before the doubling test settles at 1e-10.
_ADAPTIVE_CAP = 4096
_ANCHOR_CAP = 4096


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes/weights for a continuous measure plus an optional point mass."""

    nodes: np.ndarray
    weights: np.ndarray
    point_mass: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if len(self.nodes) != len(self.weights) or len(self.nodes) == 0:
            raise ValidationError("rule needs matching, nonempty nodes and weights")
        # Far Gauss-Laguerre weights underflow to 0.0 at a few hundred nodes;
        # that is harmless, so only genuinely negative weights are rejected.
        if not np.all(self.weights >= 0.0):
            raise ValidationError("quadrature weights must be nonnegative")
        if len(self.nodes) > 1 and not np.all(np.diff(self.nodes) > 0.0):
            raise ValidationError("quadrature nodes must be strictly increasing")


@dataclass(frozen=True)
class MomentSequence:
    """Signed log-magnitudes of c1 applied to a designated classical family."""

    signs: np.ndarray
    log_abs: np.ndarray
    method: str

    def __len__(self) -> int:
        return len(self.signs)

    def signed_log(self, n: int) -> tuple[float, float]:
        return float(self.signs[n]), float(self.log_abs[n])

    def value(self, n: int) -> float:
        """Linear-scale moment; may overflow for large n by design."""
        return float(self.signs[n]) * math.exp(float(self.log_abs[n]))


def gauss_rule(
    weight: WeightParams, m: int, point_mass: tuple[float, float] | None = None
) -> QuadratureRule:
    """Golub-Welsch rule with m nodes for a classical weight.

    Exact for polynomials of degree <= 2m-1 against the continuous part.
    Smooth factors such as (x - xi) or 1/(x - xi) are deliberately not baked
    into rules; fold them into the integrand at apply time.
    """
    if m < 1:
        raise ValidationError(f"node count must be >= 1, got {m}")
    if isinstance(weight, LaguerreParams):
        b, c = laguerre_recurrence_coeffs(weight.alpha, m)
        log_k0 = laguerre_log_norm(weight, 0)
    else:
        b, c = jacobi_recurrence_coeffs(weight.alpha, weight.beta, m)
        log_k0 = jacobi_log_norm(weight, 0)
    off = np.sqrt(c[1:m])
    nodes, vecs = eigh_tridiagonal(b, off)
    weights = math.exp(log_k0) * vecs[0, :] ** 2
    if isinstance(weight, LaguerreParams):
        weights = _repair_laguerre_tail_weights(weight, m, nodes, weights)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes, weights, point_mass)


def _repair_laguerre_tail_weights(
    weight: LaguerreParams, m: int, nodes: np.ndarray, weights: np.ndarray
) -> np.ndarray:
    """Recompute far-tail weights the eigensolver flushed to zero.

    The leading eigenvector components behind the far-node weights decay
    like exp(-x/2); once they drop below roughly 1e-18 the tridiagonal
    eigensolver returns exact zeros, silently deleting those nodes from the
    rule.  That is harmless for bounded integrands but breaks polynomial
    exactness: a degree-2n integrand can put visible mass exactly where the
    weights vanished.  Any weight suspiciously small relative to the largest
    one is therefore recomputed from the closed form

        w_i = Gamma(m + alpha + 1) m! x_i / Lhat_{m+1}(x_i)^2

    (Lhat monic), evaluated in log space so the result is accurate down to
    the underflow threshold.  Weights whose true value is below double
    range stay zero; their contributions are below any representable
    integrand's resolution.
    """
    cutoff = float(np.max(weights)) * 1e-25
    bad = np.nonzero(weights <= cutoff)[0]
    if bad.size == 0:
        return weights
    out = weights.copy()
    log_front = math.lgamma(m + weight.alpha + 1.0) + math.lgamma(m + 1.0)
    xs = nodes[bad]
    log_w = log_front + np.log(xs) - _monic_laguerre_log_abs_sq(weight.alpha, m + 1, xs)
    with np.errstate(under="ignore"):
        out[bad] = np.where(log_w > -745.0, np.exp(log_w), 0.0)
    return out


def _monic_laguerre_log_abs_sq(alpha: float, deg: int, xs: np.ndarray) -> np.ndarray:
    """2 log |Lhat_deg(x)| for an array of points, overflow-safe.

    Same three-term recurrence as the scalar evaluator, vectorized across
    the points and carrying a per-point binary exponent so degree-thousands
    values stay representable.
    """
    p_prev = np.ones_like(xs)
    p_curr = xs - (alpha + 1.0)
    expo = np.zeros(xs.shape, dtype=np.int64)
    for j in range(1, deg):
        p_next = (xs - (2.0 * j + alpha + 1.0)) * p_curr - (j * (j + alpha)) * p_prev
        p_prev, p_curr = p_curr, p_next
        big = np.abs(p_curr) > 2.0**500
        if np.any(big):
            p_curr[big] *= 2.0**-500
            p_prev[big] *= 2.0**-500
            expo[big] += 500
    with np.errstate(divide="ignore"):
        return 2.0 * (np.log(np.abs(p_curr)) + expo * _LN2)


@lru_cache(maxsize=128)
def _cached_rule(kind: str, a: float, bb: float, m: int) -> QuadratureRule:
    if kind == "laguerre":
        return gauss_rule(LaguerreParams(a), m)
    return gauss_rule(JacobiParams(a, bb), m)


def _rule_for(base: WeightParams, m: int) -> QuadratureRule:
    if isinstance(base, LaguerreParams):
        return _cached_rule("laguerre", base.alpha, 0.0, m)
    return _cached_rule("jacobi", base.alpha, base.beta, m)


def _eval_at(f: Callable, xs: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(f(xs), dtype=float)
        if out.shape == xs.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([float(f(x)) for x in xs])


def _as_callable(integrand: Integrand) -> Callable[[np.ndarray], np.ndarray]:
    if callable(integrand):
        return integrand
    coeffs = np.atleast_1d(np.asarray(integrand, dtype=float))
    return lambda x: npoly.polyval(x, coeffs)


def apply(
    rule: QuadratureRule,
    integrand: Integrand,
    smooth_factor: Callable[[np.ndarray], np.ndarray] | None = None,
) -> float:
    """sum_i w_i f(x_i) s(x_i), plus M f(loc) s(loc) for a point mass.

    The smooth factor is applied at the mass location too, so rules whose
    mass sits at a pole of the factor must be assembled differently (the
    case-level functional_apply takes care of that routing).
    """
    f = _as_callable(integrand)
    fx = _eval_at(f, rule.nodes)
    if smooth_factor is not None:
        fx = fx * _eval_at(smooth_factor, rule.nodes)
    total = float(np.dot(rule.weights, fx))
    if rule.point_mass is not None:
        loc, mm = rule.point_mass
        if mm != 0.0:
            term = float(f(np.asarray(loc)))
            if smooth_factor is not None:
                term *= float(smooth_factor(np.asarray(loc)))
            total += mm * term
    return total


# --------------------------------------------------------------------------
# Case measures: which classical base, factor, and mass realize c0/c1.
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class _Measure:
    base: WeightParams
    poly_factor: tuple[float, ...] | None = None  # ascending coefficients
    pole: float | None = None  # factor pole_sign / (x - pole)
    pole_sign: float = 1.0
    mass: tuple[float, float] | None = None  # added exactly, never factored


def _measure(case: "CoherentCase", which: str) -> _Measure:
    if which not in ("c0", "c1"):
        raise ValidationError(f"functional selector must be 'c0' or 'c1', got {which!r}")
    tag = case.tag
    if tag == "laguerre-a":
        if which == "c0":
            return _Measure(LaguerreParams(case.alpha - 1.0), poly_factor=(-case.xi, 1.0))
        return _Measure(LaguerreParams(case.alpha))
    if tag == "laguerre-b":
        if which == "c0":
            return _Measure(LaguerreParams(0.0), mass=(0.0, case.mass))
        return _Measure(LaguerreParams(0.0))
    if tag == "laguerre-c":
        if which == "c0":
            return _Measure(LaguerreParams(case.alpha))
        if case.xi == 0.0:
            return _Measure(LaguerreParams(case.alpha), mass=(0.0, case.mass))
        return _Measure(
            LaguerreParams(case.alpha + 1.0), pole=case.xi, mass=(case.xi, case.mass)
        )
    if tag == "jacobi-a":
        if which == "c0":
            eps = case.epsilon
            return _Measure(
                JacobiParams(case.alpha - 1.0, case.beta - 1.0),
                poly_factor=(-eps * case.xi, eps),
            )
        return _Measure(JacobiParams(case.alpha, case.beta))
    if tag == "jacobi-b":
        if which == "c0":
            return _Measure(JacobiParams(0.0, case.gamma - 1.0), mass=(1.0, case.mass))
        return _Measure(JacobiParams(0.0, case.gamma))
    if tag == "jacobi-c":
        if which == "c0":
            return _Measure(JacobiParams(case.gamma - 1.0, 0.0), mass=(-1.0, case.mass))
        return _Measure(JacobiParams(case.gamma, 0.0))
    if tag == "jacobi-d":
        if which == "c0":
            return _Measure(JacobiParams(case.alpha, case.beta))
        if case.xi == 1.0:
            return _Measure(JacobiParams(case.alpha, case.beta + 1.0), mass=(1.0, case.mass))
        if case.xi == -1.0:
            return _Measure(JacobiParams(case.alpha + 1.0, case.beta), mass=(-1.0, case.mass))
        return _Measure(
            JacobiParams(case.alpha + 1.0, case.beta + 1.0),
            pole=case.xi,
            pole_sign=case.epsilon,
            mass=(case.xi, case.mass),
        )
    raise ValidationError(f"unknown case tag {tag!r}")


def functional_apply(
    case: "CoherentCase",
    which: str,
    p: Integrand,
    q: Integrand,
    *,
    nodes: int | None = None,
) -> float:
    """Value of the bilinear form c0(pq) or c1(pq) for the case's measures.

    p and q are ascending monomial coefficient arrays or callables.  With
    explicit ``nodes`` the continuous part uses exactly that many nodes;
    otherwise polynomial inputs get an exact rule sized from their degree and
    callables (or rational-factor measures) get node doubling to 1e-10
    relative agreement.
    """
    meas = _measure(case, which)
    p_arr = None if callable(p) else np.atleast_1d(np.asarray(p, dtype=float))
    q_arr = None if callable(q) else np.atleast_1d(np.asarray(q, dtype=float))
    deg = None
    if p_arr is not None and q_arr is not None:
        prod = npoly.polymul(p_arr, q_arr)
        deg = len(prod) - 1
        f = lambda x: npoly.polyval(x, prod)
    else:
        fp = _as_callable(p)
        fq = _as_callable(q)
        f = lambda x: np.asarray(fp(x)) * np.asarray(fq(x))

    if meas.pole is None:
        fac_coeffs = meas.poly_factor
        if fac_coeffs is not None:
            fc = np.asarray(fac_coeffs)
            fac = lambda x: npoly.polyval(x, fc)
            fdeg = len(fac_coeffs) - 1
        else:
            fac = None
            fdeg = 0
        if nodes is not None:
            val = _fixed_quad(meas.base, nodes, f, fac)
        elif deg is not None:
            m = (deg + fdeg) // 2 + 1
            val = _fixed_quad(meas.base, m, f, fac)
        else:
            val = _doubling_functional(meas.base, f, fac, _ADAPTIVE_START)
    else:
        pole, sgn = meas.pole, meas.pole_sign
        fac = lambda x: sgn / (x - pole)
        if nodes is not None:
            val = _fixed_quad(meas.base, nodes, f, fac)
        else:
            start = _ADAPTIVE_START if deg is None else max(deg // 2 + 15, 32)
            val = _doubling_functional(meas.base, f, fac, start)

    if meas.mass is not None:
        loc, mm = meas.mass
        if mm != 0.0:
            val += mm * float(np.asarray(f(np.asarray(loc)), dtype=float))
    return val


def _fixed_quad(base: WeightParams, m: int, f: Callable, fac: Callable | None) -> float:
    rule = _rule_for(base, m)
    fx = _eval_at(f, rule.nodes)
    if fac is not None:
        fx = fx * _eval_at(fac, rule.nodes)
    return float(np.dot(rule.weights, fx))


def _doubling_functional(
    base: WeightParams, f: Callable, fac: Callable | None, start: int
) -> float:
    m = max(1, start)
    prev = _fixed_quad(base, m, f, fac)
    while m <= _ADAPTIVE_CAP:
        m *= 2
        curr = _fixed_quad(base, m, f, fac)
        if abs(curr - prev) <= 1e-10 * (abs(curr) + 1e-300):
            return curr
        prev = curr
    raise QuadratureBudgetError(
        f"quadrature not converged to 1e-10 within {_ADAPTIVE_CAP} nodes"
    )


# --------------------------------------------------------------------------
# Non-classical moment sequences.
# --------------------------------------------------------------------------


def _log_pochhammer(a: float, n: int) -> float:
    return math.lgamma(a + n) - math.lgamma(a)


def _anchor_quad(base: WeightParams, factor: Callable, start: int) -> float:
    """Node-doubled quadrature of a one-signed integrand, to near machine."""
    m = start
    rule = _rule_for(base, m)
    prev = float(np.dot(rule.weights, _eval_at(factor, rule.nodes)))
    while m <= _ANCHOR_CAP:
        m *= 2
        rule = _rule_for(base, m)
        curr = float(np.dot(rule.weights, _eval_at(factor, rule.nodes)))
        if abs(curr - prev) <= 5e-14 * abs(curr):
            return curr
        prev = curr
    raise QuadratureBudgetError(
        f"moment anchor quadrature not converged within {_ANCHOR_CAP} nodes"
    )


def _poly_values_vec(b: np.ndarray, c: np.ndarray, n: int, xs: np.ndarray) -> np.ndarray:
    """p_n at many points by the forward recurrence, unscaled (small n only)."""
    prev = np.zeros_like(xs)
    curr = np.ones_like(xs)
    for j in range(n):
        prev, curr = curr, (xs - b[j]) * curr - (c[j] * prev if j >= 1 else 0.0)
    return curr


def _ratio_chain(
    coeff_factory: Callable[[int], tuple[np.ndarray, np.ndarray]],
    xi: float,
    n_top: int,
    start: int,
) -> np.ndarray:
    """Backward continued-fraction ratios rho_j = m_{j+1}/m_j, j = 1..n_top.

    m is the minimal solution of the monic three-term recurrence
    m_{n+1} = (xi - b_n) m_n - c_n m_{n-1} (n >= 1) whose coefficient arrays
    come from coeff_factory(length).  The chain runs from a zero tail at
    increasing depth until the first n_top ratios reproduce to 1e-14 relative.
    """
    if n_top < 1:
        return np.zeros(1)
    depth = start
    head_prev: np.ndarray | None = None
    while depth <= max(65536, 64 * start):
        b, c = coeff_factory(depth + 1)
        rho = np.empty(n_top + 1)
        r = 0.0
        for n in range(depth, 1, -1):
            r = c[n] / ((xi - b[n]) - r)
            if n - 1 <= n_top:
                rho[n - 1] = r
        head = rho[1:]
        if head_prev is not None and np.all(
            np.abs(head - head_prev) <= 1e-14 * np.abs(head_prev)
        ):
            return rho
        head_prev = head.copy()
        depth *= 2
    raise LossOfSignificance("backward moment recurrence failed to stabilize")


def _assemble_signed_logs(
    v0: float, v1: float, rho: np.ndarray, n_max: int
) -> tuple[np.ndarray, np.ndarray]:
    signs = np.empty(n_max + 1)
    logs = np.empty(n_max + 1)
    signs[0] = math.copysign(1.0, v0)
    logs[0] = math.log(abs(v0))
    if n_max >= 1:
        if v1 == 0.0:
            raise DegenerateFunctional("first-order moment vanished; pair is degenerate")
        signs[1] = math.copysign(1.0, v1)
        logs[1] = math.log(abs(v1))
    for n in range(1, n_max):
        r = float(rho[n])
        signs[n + 1] = signs[n] * math.copysign(1.0, r)
        logs[n + 1] = logs[n] + math.log(abs(r))
    return signs, logs


def _add_mass_part(
    signs: np.ndarray,
    logs: np.ndarray,
    mass: float,
    poly_signs: np.ndarray,
    poly_logs: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Signed-log addition of M * p_n(xi); both parts must agree in sign."""
    if mass == 0.0:
        return signs, logs
    log_m = math.log(mass)
    out_logs = logs.copy()
    for n in range(len(signs)):
        if poly_signs[n] == 0.0:
            continue
        if poly_signs[n] != signs[n]:
            raise DegenerateFunctional(
                "continuous and point-mass moment parts disagree in sign; "
                "the sign pattern of the pair data is broken"
            )
        out_logs[n] = np.logaddexp(logs[n], log_m + poly_logs[n])
    return signs, out_logs


def laguerre_c_moments(
    alpha: float, xi: float, M: float, n_max: int, *, cross_validate: bool = True
) -> MomentSequence:
    """Moments t_n = c1(L_n^{alpha+1}) for the Laguerre pair with a shifted pole.

    xi = 0 uses the closed form (-1)^n (n! Gamma(alpha+1) + M (alpha+2)_n).
    xi < 0 computes the continuous part by the backward ratio recurrence
    anchored at a quadrature value of t~_0 (the forward recurrence loses all
    significance well before n = 40 once the pole sits a few units out), then
    adds M L_n^{alpha+1}(xi) in signed-log arithmetic.
    """
    if not alpha > -1.0:
        raise ValidationError(f"needs alpha > -1, got {alpha}")
    if not xi <= 0.0:
        raise ValidationError(f"needs xi <= 0, got {xi}")
    if not M >= 0.0:
        raise ValidationError(f"needs M >= 0, got {M}")
    if n_max < 0:
        raise ValidationError(f"needs n_max >= 0, got {n_max}")

    if xi == 0.0:
        signs = np.array([(-1.0) ** n for n in range(n_max + 1)])
        lg = math.lgamma(alpha + 1.0)
        logs = np.array([math.lgamma(n + 1.0) + lg for n in range(n_max + 1)])
        if M > 0.0:
            lm = math.log(M)
            logs = np.logaddexp(
                logs,
                np.array([lm + _log_pochhammer(alpha + 2.0, n) for n in range(n_max + 1)]),
            )
        return MomentSequence(signs, logs, "closed-form")

    base = LaguerreParams(alpha + 1.0)
    t0 = _anchor_quad(base, lambda x: 1.0 / (x - xi), 64)
    if not t0 > 0.0:
        raise DegenerateFunctional("zeroth moment of the shifted Laguerre pair is nonpositive")
    t1 = (xi - alpha - 2.0) * t0 + math.exp(math.lgamma(alpha + 2.0))
    rho = _ratio_chain(
        lambda length: laguerre_recurrence_coeffs(alpha + 1.0, length),
        xi,
        n_max - 1,
        n_max + 40,
    )
    signs, logs = _assemble_signed_logs(t0, t1, rho, n_max)
    for n in range(n_max + 1):
        if signs[n] != (-1.0) ** n:
            raise LossOfSignificance(
                f"moment sign pattern broke at n={n}; backward recurrence unreliable"
            )
    if cross_validate:
        _cross_validate_laguerre(alpha, xi, signs, logs, n_max)
    if M > 0.0:
        ev = laguerre_eval(base, n_max, xi)
        p_signs = np.array([ev.sign(n) for n in range(n_max + 1)])
        p_logs = np.array([ev.log_abs(n) for n in range(n_max + 1)])
        signs, logs = _add_mass_part(signs, logs, M, p_signs, p_logs)
    return MomentSequence(signs, logs, "backward-recurrence")


def _cross_validate_laguerre(
    alpha: float, xi: float, signs: np.ndarray, logs: np.ndarray, n_max: int
) -> None:
    base = LaguerreParams(alpha + 1.0)
    b, c = laguerre_recurrence_coeffs(alpha + 1.0, max(n_max, 1))
    for n in (1, 2, 3, 5, 8, 13):
        if n > n_max:
            break
        # Cancellation in the quadrature grows like exp(4 sqrt(n |xi|));
        # only degrees where fewer than ~7 digits die can certify anything.
        if 4.0 * math.sqrt(n * abs(xi)) / _LN10 > 7.0:
            break
        quad = _ladder_quad(base, (128, 256, 512), lambda xs, n=n: _poly_values_vec(b, c, n, xs) / (xs - xi))
        if quad is None:
            continue
        rec = signs[n] * math.exp(logs[n])
        if abs(quad - rec) > 1e-7 * abs(quad):
            raise LossOfSignificance(
                f"stabilized moment path disagrees with quadrature at n={n}: "
                f"{rec!r} vs {quad!r}"
            )


def _ladder_quad(base: WeightParams, ladder: tuple[int, ...], f: Callable) -> float | None:
    prev = None
    for m in ladder:
        rule = _rule_for(base, m)
        val = float(np.dot(rule.weights, _eval_at(f, rule.nodes)))
        if prev is not None and abs(val - prev) <= 3e-8 * (abs(val) + 1e-300):
            return val
        prev = val
    return None


def jacobi_d_moments(
    alpha: float,
    beta: float,
    xi: float,
    epsilon: float,
    M: float,
    n_max: int,
    *,
    cross_validate: bool = True,
) -> MomentSequence:
    """Moments u_n = c1(P_n^{(alpha+1,beta+1)}) for the Jacobi pair with a pole.

    |xi| = 1 has closed forms (the pole merges with the weight and drops one
    exponent); |xi| > 1 uses the anchored backward ratio recurrence, for the
    same stability reason as the Laguerre variant.  The point-mass part
    M P_n^{(alpha+1,beta+1)}(xi) is added in signed-log arithmetic.
    """
    if not (alpha > -1.0 and beta > -1.0):
        raise ValidationError(f"needs alpha, beta > -1, got ({alpha}, {beta})")
    if not abs(xi) >= 1.0:
        raise ValidationError(f"needs |xi| >= 1, got {xi}")
    expected_eps = 1.0 if xi <= -1.0 else -1.0
    if epsilon != expected_eps:
        raise ValidationError(f"epsilon must be {expected_eps:+.0f} for xi={xi}")
    if not M >= 0.0:
        raise ValidationError(f"needs M >= 0, got {M}")
    if n_max < 0:
        raise ValidationError(f"needs n_max >= 0, got {n_max}")

    s = alpha + beta
    base = JacobiParams(alpha + 1.0, beta + 1.0)

    if xi == 1.0 or xi == -1.0:
        signs = np.empty(n_max + 1)
        logs = np.empty(n_max + 1)
        # With the pole at an endpoint, c1's continuous part reduces to a
        # classical Jacobi measure with one exponent lowered; its moments
        # against the (alpha+1, beta+1) family telescope into pure gammas.
        hi = beta if xi == 1.0 else alpha
        lo = alpha if xi == 1.0 else beta
        for n in range(n_max + 1):
            logs[n] = (
                (n + s + 2.0) * _LN2
                + math.lgamma(n + 1.0)
                + math.lgamma(n + hi + 2.0)
                + math.lgamma(lo + 1.0)
                - math.lgamma(2.0 * n + s + 3.0)
            )
            signs[n] = 1.0 if xi == 1.0 else (-1.0) ** n
        if cross_validate:
            _cross_validate_jacobi_edge(alpha, beta, xi, signs, logs, n_max)
        method = "closed-form"
    else:
        u0 = _anchor_quad(base, lambda x: epsilon / (x - xi), 32)
        if not u0 > 0.0:
            raise DegenerateFunctional("zeroth moment of the shifted Jacobi pair is nonpositive")
        bj, _ = jacobi_recurrence_coeffs(alpha + 1.0, beta + 1.0, 1)
        u1 = (xi - bj[0]) * u0 + epsilon * math.exp(jacobi_log_norm(base, 0))
        rho = _ratio_chain(
            lambda length: jacobi_recurrence_coeffs(alpha + 1.0, beta + 1.0, length),
            xi,
            n_max - 1,
            n_max + 40,
        )
        signs, logs = _assemble_signed_logs(u0, u1, rho, n_max)
        expected = (lambda n: 1.0) if xi > 1.0 else (lambda n: (-1.0) ** n)
        for n in range(n_max + 1):
            if signs[n] != expected(n):
                raise LossOfSignificance(
                    f"moment sign pattern broke at n={n}; backward recurrence unreliable"
                )
        if cross_validate:
            _cross_validate_jacobi_pole(alpha, beta, xi, epsilon, signs, logs, n_max)
        method = "backward-recurrence"

    if M > 0.0:
        ev = jacobi_eval(base, n_max, xi)
        p_signs = np.array([ev.sign(n) for n in range(n_max + 1)])
        p_logs = np.array([ev.log_abs(n) for n in range(n_max + 1)])
        signs, logs = _add_mass_part(signs, logs, M, p_signs, p_logs)
    return MomentSequence(signs, logs, method)


def _cross_validate_jacobi_edge(
    alpha: float, beta: float, xi: float, signs: np.ndarray, logs: np.ndarray, n_max: int
) -> None:
    # Reduced classical measure: exact polynomial quadrature, no instability.
    reduced = (
        JacobiParams(alpha, beta + 1.0) if xi == 1.0 else JacobiParams(alpha + 1.0, beta)
    )
    b, c = jacobi_recurrence_coeffs(alpha + 1.0, beta + 1.0, max(n_max, 1))
    for n in (1, 2, 5, 13, 21, 34):
        if n > min(n_max, 40):
            break
        rule = _rule_for(reduced, n + 4)
        quad = float(np.dot(rule.weights, _poly_values_vec(b, c, n, rule.nodes)))
        rec = signs[n] * math.exp(logs[n])
        if abs(quad - rec) > 1e-9 * abs(quad):
            raise LossOfSignificance(
                f"endpoint-pole closed form disagrees with quadrature at n={n}"
            )


def _cross_validate_jacobi_pole(
    alpha: float,
    beta: float,
    xi: float,
    epsilon: float,
    signs: np.ndarray,
    logs: np.ndarray,
    n_max: int,
) -> None:
    base = JacobiParams(alpha + 1.0, beta + 1.0)
    b, c = jacobi_recurrence_coeffs(alpha + 1.0, beta + 1.0, max(n_max, 1))
    # Quadrature loses about n log10(|xi| + sqrt(xi^2 - 1)) digits here.
    growth = math.log10(abs(xi) + math.sqrt(xi * xi - 1.0))
    for n in (1, 2, 3, 5, 8, 13):
        if n > n_max or n * growth > 7.0:
            break
        quad = _ladder_quad(
            base, (64, 128, 256), lambda xs, n=n: _poly_values_vec(b, c, n, xs) * (epsilon / (xs - xi))
        )
        if quad is None:
            continue
        rec = signs[n] * math.exp(logs[n])
        if abs(quad - rec) > 1e-7 * abs(quad):
            raise LossOfSignificance(
                f"stabilized moment path disagrees with quadrature at n={n}: "
                f"{rec!r} vs {quad!r}"
            )
