"""Numerical kernels with an optional numba backend.

Every kernel is written as a plain function over contiguous float64 arrays.
At import time the module resolves a backend from the ``COHERENTMB_BACKEND``
environment variable (``auto``, ``numba``, or ``python``) and, when numba is
selected, wraps each kernel with ``numba.njit(cache=True)``.  The pure-Python
definitions remain the fallback path, so results are identical either way up
to instruction scheduling.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "BACKEND",
    "backend",
    "sturm_count",
    "bisect_smallest",
    "eval_charpoly",
    "qd_sweep",
    "tridiag_shifted_solve",
    "warmup",
]

_BACKEND_ENV = "COHERENTMB_BACKEND"
_TWO_P500 = 2.0**500
_TWO_M500 = 2.0**-500
_TINY_PIVOT = 1e-300


def _resolve_backend() -> str:
    choice = os.environ.get(_BACKEND_ENV, "auto").strip().lower()
    if choice not in ("auto", "numba", "python"):
        raise ValueError(
            f"{_BACKEND_ENV} must be 'auto', 'numba', or 'python', got {choice!r}"
        )
    if choice == "python":
        return "python"
    try:
        import numba  # noqa: F401
    except ImportError:
        if choice == "numba":
            raise RuntimeError(
                f"{_BACKEND_ENV}=numba requested but numba is not importable"
            ) from None
        return "python"
    return "numba"


BACKEND = _resolve_backend()


def backend() -> str:
    """Name of the active kernel backend, 'numba' or 'python'."""
    return BACKEND


def sturm_count(diag: np.ndarray, offdiag_sq: np.ndarray, lam: float) -> int:
    """Number of eigenvalues of the symmetric tridiagonal matrix below lam.

    Counts negative pivots of the shifted LDL^T sweep
    d_i = (diag_i - lam) - offdiag_sq_{i-1}/d_{i-1}, replacing an exactly
    zero pivot by a tiny positive value so the sweep can continue.
    """
    n = diag.shape[0]
    count = 0
    d = 1.0
    for i in range(n):
        if i == 0:
            d = diag[0] - lam
        else:
            d = (diag[i] - lam) - offdiag_sq[i - 1] / d
        if d == 0.0:
            d = _TINY_PIVOT
        if d < 0.0:
            count += 1
    return count


def bisect_smallest(
    diag: np.ndarray,
    offdiag_sq: np.ndarray,
    lo: float,
    hi: float,
    tol: float,
    maxit: int,
) -> tuple[float, float]:
    """Shrink a bracket [lo, hi] around the smallest eigenvalue by bisection.

    Assumes the caller verified sturm_count(lo) == 0 and sturm_count(hi) >= 1;
    both properties are maintained as loop invariants.  Stops when
    hi - lo <= tol * hi or after maxit steps.
    """
    for _ in range(maxit):
        if hi - lo <= tol * hi:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if sturm_count(diag, offdiag_sq, mid) == 0:
            lo = mid
        else:
            hi = mid
    return lo, hi


def eval_charpoly(
    diag: np.ndarray, offdiag_sq: np.ndarray, lam: float
) -> tuple[float, float, float, int]:
    """Characteristic polynomial of the tridiagonal matrix and two derivatives.

    Runs the three-term recurrence
    A_i = (lam - d_i) A_{i-1} - o_{i-1} A_{i-2}
    together with its first and second derivative recurrences, rescaling all
    carried values by powers of 2^500 whenever their shared magnitude leaves
    [2^-500, 2^500].  Returns (a, ap, app, e) so that
    A_n(lam) = a * 2^e, A_n'(lam) = ap * 2^e, A_n''(lam) = app * 2^e.
    """
    n = diag.shape[0]
    a_pp = 0.0
    a_p = 1.0
    d1_pp = 0.0
    d1_p = 0.0
    d2_pp = 0.0
    d2_p = 0.0
    a = a_p
    d1 = d1_p
    d2 = d2_p
    e = 0
    for i in range(n):
        x = lam - diag[i]
        o = offdiag_sq[i - 1] if i >= 1 else 0.0
        a = x * a_p - o * a_pp
        d1 = a_p + x * d1_p - o * d1_pp
        d2 = 2.0 * d1_p + x * d2_p - o * d2_pp
        m = abs(a)
        if abs(d1) > m:
            m = abs(d1)
        if abs(d2) > m:
            m = abs(d2)
        if abs(a_p) > m:
            m = abs(a_p)
        if abs(d1_p) > m:
            m = abs(d1_p)
        if abs(d2_p) > m:
            m = abs(d2_p)
        if m > _TWO_P500:
            a *= _TWO_M500
            d1 *= _TWO_M500
            d2 *= _TWO_M500
            a_p *= _TWO_M500
            d1_p *= _TWO_M500
            d2_p *= _TWO_M500
            e += 500
        elif 0.0 < m < _TWO_M500:
            a *= _TWO_P500
            d1 *= _TWO_P500
            d2 *= _TWO_P500
            a_p *= _TWO_P500
            d1_p *= _TWO_P500
            d2_p *= _TWO_P500
            e -= 500
        a_pp = a_p
        a_p = a
        d1_pp = d1_p
        d1_p = d1
        d2_pp = d2_p
        d2_p = d2
    return a, d1, d2, e


def qd_sweep(q: np.ndarray, e: np.ndarray) -> int:
    """One progressive quotient-difference sweep, in place.

    q has length n, e has length n with e[n-1] kept at 0.  Returns 0 on
    success, or the 1-based index of the first nonpositive or nonfinite new
    quotient, in which case the arrays are left partially updated and the
    caller must discard them.
    """
    n = q.shape[0]
    qp = q[0] + e[0]
    if not (qp > 0.0) or not np.isfinite(qp):
        return 1
    for j in range(1, n):
        ep = q[j] * e[j - 1] / qp
        qnext = q[j] + e[j] - ep
        q[j - 1] = qp
        e[j - 1] = ep
        qp = qnext
        if not (qp > 0.0) or not np.isfinite(qp):
            return j + 1
    q[n - 1] = qp
    e[n - 1] = 0.0
    return 0


def tridiag_shifted_solve(
    diag: np.ndarray, offdiag: np.ndarray, shift: float, rhs: np.ndarray
) -> np.ndarray:
    """Solve (T - shift*I) x = rhs for symmetric tridiagonal T.

    T has main diagonal ``diag`` and signed off-diagonal ``offdiag``.
    Gaussian elimination with partial pivoting between adjacent rows; the
    fill-in occupies one extra superdiagonal.  A zero pivot is replaced by a
    tiny value, which is the standard inverse-iteration trick.
    """
    n = diag.shape[0]
    dd = np.empty(n)
    ee = np.zeros(n)
    ff = np.zeros(n)
    sub = np.zeros(n)
    x = rhs.copy()
    for i in range(n):
        dd[i] = diag[i] - shift
    for i in range(n - 1):
        ee[i] = offdiag[i]
        sub[i] = offdiag[i]
    for i in range(n - 1):
        if abs(sub[i]) > abs(dd[i]):
            tmp = dd[i]
            dd[i] = sub[i]
            sub[i] = tmp
            tmp = ee[i]
            ee[i] = dd[i + 1]
            dd[i + 1] = tmp
            if i + 1 < n - 1:
                ff[i] = ee[i + 1]
                ee[i + 1] = 0.0
            tmp = x[i]
            x[i] = x[i + 1]
            x[i + 1] = tmp
        if dd[i] == 0.0:
            dd[i] = _TINY_PIVOT
        m = sub[i] / dd[i]
        dd[i + 1] -= m * ee[i]
        if i + 1 < n - 1:
            ee[i + 1] -= m * ff[i]
        x[i + 1] -= m * x[i]
    if dd[n - 1] == 0.0:
        dd[n - 1] = _TINY_PIVOT
    x[n - 1] = x[n - 1] / dd[n - 1]
    if n >= 2:
        x[n - 2] = (x[n - 2] - ee[n - 2] * x[n - 1]) / dd[n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (x[i] - ee[i] * x[i + 1] - ff[i] * x[i + 2]) / dd[i]
    return x


if BACKEND == "numba":
    import numba

    sturm_count = numba.njit(cache=True)(sturm_count)
    bisect_smallest = numba.njit(cache=True)(bisect_smallest)
    eval_charpoly = numba.njit(cache=True)(eval_charpoly)
    qd_sweep = numba.njit(cache=True)(qd_sweep)
    tridiag_shifted_solve = numba.njit(cache=True)(tridiag_shifted_solve)


def warmup() -> None:
    """Trigger JIT compilation of every kernel on tiny inputs.

    A no-op for results; call once before timing-sensitive work so that
    compilation cost does not land inside a measured region.  Safe to call
    under the python backend too.
    """
    d = np.array([2.0, 2.0, 2.0])
    o = np.array([1.0, 1.0])
    b = np.array([1.0, 0.5])
    sturm_count(d, o, 0.1)
    bisect_smallest(d, o, 0.0, 4.0, 1e-6, 60)
    eval_charpoly(d, o, 0.0)
    qd_sweep(np.array([2.0, 1.0]), np.array([0.5, 0.0]))
    tridiag_shifted_solve(np.array([2.0, 2.0]), np.array([-1.0]), 0.3, b)
