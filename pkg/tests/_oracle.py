"""Independent reference computations for the test suite.

Nothing here reuses the library's numerics.  Three tools:

* an mpmath Stieltjes procedure that derives monic orthogonal polynomials,
  norms and coupling coefficients for any measure pair straight from
  quadrature, with no closed forms (the frozen constants in the unit tests
  were produced by these routines at 50 digits);
* mpmath forward recurrences for the modified-moment sequences, run at
  enough working precision that their known forward instability is
  harmless, to cross-check the double-precision backward (Miller) chains;
* a float64 cyclic-Jacobi-rotation eigensolver, which (unlike a standard
  QR-based dense solve) computes the smallest eigenvalue of a positive
  definite matrix to high *relative* accuracy, so enclosures of
  eigenvalues near 1e-8 can be checked at 1e-10 relative tolerance.
"""

from __future__ import annotations

import math

import mpmath as mp
import numpy as np

# ---------------------------------------------------------------------------
# Polynomial helpers over mpmath coefficients (ascending order).
# ---------------------------------------------------------------------------


def polmul(p, q):
    out = [mp.mpf(0)] * (len(p) + len(q) - 1)
    for i, pi in enumerate(p):
        for j, qj in enumerate(q):
            out[i + j] += pi * qj
    return out


def polsub(p, q):
    n = max(len(p), len(q))
    return [
        (p[i] if i < len(p) else mp.mpf(0)) - (q[i] if i < len(q) else mp.mpf(0))
        for i in range(n)
    ]


def scal(a, p):
    return [a * x for x in p]


def deriv(p):
    return [i * p[i] for i in range(1, len(p))]


def polval(p, x):
    return mp.polyval(list(reversed(p)), x)


# ---------------------------------------------------------------------------
# Measure realizations.  Each functional maps an ascending coefficient list
# to an mp value by direct quadrature (plus point-mass terms).
# ---------------------------------------------------------------------------


def _laguerre_functional(alpha, factor=None, mass=0.0, mass_at=0.0):
    split = [0, 1, 5, 20, 60, mp.inf]

    def F(c):
        def f(x):
            w = x ** mp.mpf(alpha) * mp.e ** (-x)
            v = polval(c, x) * w
            return v * factor(x) if factor is not None else v

        total = mp.quad(f, split)
        if mass:
            total += mass * polval(c, mp.mpf(mass_at))
        return total

    return F


def _jacobi_functional(alpha, beta, factor=None, mass=0.0, mass_at=0.0):
    def F(c):
        def f(x):
            w = (1 - x) ** mp.mpf(alpha) * (1 + x) ** mp.mpf(beta)
            v = polval(c, x) * w
            return v * factor(x) if factor is not None else v

        total = mp.quad(f, [-1, 0, 1])
        if mass:
            total += mass * polval(c, mp.mpf(mass_at))
        return total

    return F


def case_functionals(case):
    """(F0, F1) mp functionals realizing the pair of measures for a case."""
    tag = case.tag
    if tag == "laguerre-a":
        a, xi = case.alpha, case.xi
        return (
            _laguerre_functional(a - 1, factor=lambda x, s=xi: x - s),
            _laguerre_functional(a),
        )
    if tag == "laguerre-b":
        return (
            _laguerre_functional(0.0, mass=case.mass, mass_at=0.0),
            _laguerre_functional(0.0),
        )
    if tag == "laguerre-c":
        a, xi, m = case.alpha, case.xi, case.mass
        return (
            _laguerre_functional(a),
            _laguerre_functional(
                a + 1, factor=lambda x, s=xi: 1 / (x - s), mass=m, mass_at=xi
            ),
        )
    if tag == "jacobi-a":
        a, b, xi, eps = case.alpha, case.beta, case.xi, case.epsilon
        return (
            _jacobi_functional(a - 1, b - 1, factor=lambda x, s=xi, e=eps: e * (x - s)),
            _jacobi_functional(a, b),
        )
    if tag == "jacobi-b":
        g, m = case.gamma, case.mass
        return (
            _jacobi_functional(0.0, g - 1, mass=m, mass_at=1.0),
            _jacobi_functional(0.0, g),
        )
    if tag == "jacobi-c":
        g, m = case.gamma, case.mass
        return (
            _jacobi_functional(g - 1, 0.0, mass=m, mass_at=-1.0),
            _jacobi_functional(g, 0.0),
        )
    if tag == "jacobi-d":
        a, b, xi, eps, m = case.alpha, case.beta, case.xi, case.epsilon, case.mass
        if xi == 1.0:
            c1 = _jacobi_functional(a, b + 1, mass=m, mass_at=1.0)
        elif xi == -1.0:
            c1 = _jacobi_functional(a + 1, b, mass=m, mass_at=-1.0)
        else:
            c1 = _jacobi_functional(
                a + 1,
                b + 1,
                factor=lambda x, s=xi, e=eps: 1 / (e * (x - s)),
                mass=m,
                mass_at=xi,
            )
        return (_jacobi_functional(a, b), c1)
    raise ValueError(f"unknown tag {tag!r}")


# ---------------------------------------------------------------------------
# Stieltjes: monic orthogonal polynomials for an arbitrary functional.
# ---------------------------------------------------------------------------


def stieltjes(F, nmax):
    """Monic orthogonal polynomials and norms for F, degrees 0..nmax."""
    polys = [[mp.mpf(1)]]
    norms = [F([mp.mpf(1)])]
    a0 = F([mp.mpf(0), mp.mpf(1)]) / norms[0]
    polys.append([-a0, mp.mpf(1)])
    norms.append(F(polmul(polys[1], polys[1])))
    for k in range(1, nmax):
        xpk = [mp.mpf(0)] + polys[k]
        ak = F(polmul(xpk, polys[k])) / norms[k]
        bk = norms[k] / norms[k - 1]
        new = polsub(polsub(xpk, scal(ak, polys[k])), scal(bk, polys[k - 1]))
        polys.append(new)
        norms.append(F(polmul(new, new)))
    return polys, norms


def pair_oracle(case, nmax, dps=50):
    """(P, T, k0, k1, sigma, residuals) for a case, straight from quadrature.

    sigma[n] solves T_n = P'_{n+1}/(n+1) - sigma_n P'_n/n by matching the
    x^(n-1) coefficient; residuals[n-1] reports how far the remaining
    coefficients are from honoring the same relation (coherence check).
    """
    with mp.workdps(dps):
        F0, F1 = case_functionals(case)
        P, k0 = stieltjes(F0, nmax + 1)
        T, k1 = stieltjes(F1, nmax)
        sig = [None]
        resid = []
        for n in range(1, nmax + 1):
            dP1 = scal(mp.mpf(1) / (n + 1), deriv(P[n + 1]))
            rhs = polsub(dP1, T[n])
            s = rhs[n - 1] * n / deriv(P[n])[n - 1]
            sig.append(s)
            r = polsub(rhs, scal(s / n, deriv(P[n])))
            resid.append(max(abs(x) for x in r) if r else mp.mpf(0))
        return P, T, k0, k1, sig, resid


def ktilde(k0, k1, sig, n):
    """Coupling matrix data (1-indexed diag, offdiag squares) from pair data."""
    d = [mp.mpf(0)] * (n + 1)
    osq = [mp.mpf(0)] * (n + 1)
    d[1] = k0[1] / k1[0]
    for i in range(2, n + 1):
        d[i] = k0[i] / (i**2 * k1[i - 1]) + sig[i - 1] ** 2 * k0[i - 1] / (
            (i - 1) ** 2 * k1[i - 1]
        )
    for i in range(1, n):
        osq[i] = sig[i] ** 2 * k0[i] ** 2 / (i**4 * k1[i - 1] * k1[i])
    return d, osq


def smallest_eig_mp(d, osq, n):
    """Smallest eigenvalue of the coupling matrix, mp dense solve."""
    A = mp.zeros(n)
    for i in range(1, n + 1):
        A[i - 1, i - 1] = d[i]
    for i in range(1, n):
        A[i - 1, i] = A[i, i - 1] = -mp.sqrt(osq[i])
    ev = mp.eigsy(A, eigvals_only=True)
    return min(mp.mpf(x) for x in ev)


def mu_oracle(case, n, dps=50):
    """End-to-end smallest eigenvalue for a case at degree n, all in mp."""
    _, _, k0, k1, sig, _ = pair_oracle(case, n, dps=dps)
    with mp.workdps(dps):
        d, osq = ktilde(k0, k1, sig, n)
        return smallest_eig_mp(d, osq, n)


# ---------------------------------------------------------------------------
# Forward modified-moment recurrences in mp.
# ---------------------------------------------------------------------------


def _mp_laguerre_coeffs(alpha, n):
    b = [2 * j + mp.mpf(alpha) + 1 for j in range(n)]
    c = [j * (j + mp.mpf(alpha)) for j in range(n)]
    return b, c


def _mp_jacobi_coeffs(alpha, beta, n):
    a, b = mp.mpf(alpha), mp.mpf(beta)
    s = a + b
    bs = []
    cs = []
    for j in range(n):
        if j == 0:
            bs.append((b - a) / (s + 2))
        else:
            bs.append((b * b - a * a) / ((2 * j + s) * (2 * j + s + 2)))
        if j == 1:
            cs.append(4 * (1 + a) * (1 + b) / ((2 + s) ** 2 * (3 + s)))
        else:
            cs.append(
                4 * j * (j + a) * (j + b) * (j + s)
                / ((2 * j + s) ** 2 * (2 * j + s + 1) * (2 * j + s - 1))
            )
    return bs, cs


def _mp_monic_eval(bs, cs, n, x):
    vals = [mp.mpf(1)]
    if n >= 1:
        vals.append(x - bs[0])
    for j in range(1, n):
        vals.append((x - bs[j]) * vals[j] - cs[j] * vals[j - 1])
    return vals


def laguerre_pole_moments_mp(alpha, xi, n_max, dps=60):
    """t~_n = int_0^inf L_n^(alpha+1)(x) x^(alpha+1) e^-x / (x - xi) dx.

    Quadrature anchor for t~_0, then the forward inhomogeneous chain
    t~_1 = (xi - b_0) t~_0 + Gamma(alpha+2),
    t~_(n+1) = (xi - b_n) t~_n - c_n t~_(n-1).
    """
    with mp.workdps(dps):
        a1 = mp.mpf(alpha) + 1
        xm = mp.mpf(xi)
        if xi == 0.0:
            t0 = mp.gamma(a1)
        else:
            t0 = mp.quad(
                lambda x: x**a1 * mp.e ** (-x) / (x - xm), [0, 1, 5, 20, 60, mp.inf]
            )
        b, c = _mp_laguerre_coeffs(a1, n_max + 1)
        out = [t0]
        if n_max >= 1:
            out.append((xm - b[0]) * t0 + mp.gamma(a1 + 1))
        for n in range(1, n_max):
            out.append((xm - b[n]) * out[n] - c[n] * out[n - 1])
        return out


def laguerre_c_moments_mp(alpha, xi, M, n_max, dps=60):
    """Full modified moments c1(L_n^(alpha+1)) including the point mass."""
    with mp.workdps(dps):
        pole = laguerre_pole_moments_mp(alpha, xi, n_max, dps=dps)
        if not M:
            return pole
        b, c = _mp_laguerre_coeffs(mp.mpf(alpha) + 1, n_max)
        lvals = _mp_monic_eval(b, c, n_max, mp.mpf(xi))
        return [pole[n] + mp.mpf(M) * lvals[n] for n in range(n_max + 1)]


def jacobi_pole_moments_mp(alpha, beta, xi, epsilon, n_max, dps=60):
    """u~_n = int_-1^1 P_n^(a+1,b+1)(x) (1-x)^(a+1) (1+x)^(b+1) / (eps (x - xi)) dx."""
    with mp.workdps(dps):
        a1, b1 = mp.mpf(alpha) + 1, mp.mpf(beta) + 1
        xm, eps = mp.mpf(xi), mp.mpf(epsilon)
        # For |xi| = 1 the pole merges with an endpoint factor and leaves an
        # integrable algebraic singularity, which tanh-sinh handles directly.
        u0 = mp.quad(
            lambda x: (1 - x) ** a1 * (1 + x) ** b1 / (eps * (x - xm)), [-1, 0, 1]
        )
        k0 = (
            2 ** (a1 + b1 + 1)
            * mp.gamma(a1 + 1)
            * mp.gamma(b1 + 1)
            / mp.gamma(a1 + b1 + 2)
        )
        b, c = _mp_jacobi_coeffs(a1, b1, n_max + 1)
        out = [u0]
        if n_max >= 1:
            out.append((xm - b[0]) * u0 + eps * k0)
        for n in range(1, n_max):
            out.append((xm - b[n]) * out[n] - c[n] * out[n - 1])
        return out


def jacobi_d_moments_mp(alpha, beta, xi, epsilon, M, n_max, dps=60):
    """Full modified moments c1(P_n^(a+1,b+1)) including the point mass."""
    with mp.workdps(dps):
        pole = jacobi_pole_moments_mp(alpha, beta, xi, epsilon, n_max, dps=dps)
        if not M:
            return pole
        b, c = _mp_jacobi_coeffs(mp.mpf(alpha) + 1, mp.mpf(beta) + 1, n_max)
        pvals = _mp_monic_eval(b, c, n_max, mp.mpf(xi))
        return [pole[n] + mp.mpf(M) * pvals[n] for n in range(n_max + 1)]


def dense_smallest_mp(diag, offdiag_sq, dps=40):
    """Smallest eigenvalue of the float64 tridiagonal matrix, solved densely
    in extended precision.

    The entries are taken verbatim (each float64 is an exact rational), so
    this isolates the eigenvalue-extraction step: any difference from the
    library's bisection is solver error, not assembly error.
    """
    with mp.workdps(dps):
        n = len(diag)
        A = mp.zeros(n)
        for i in range(n):
            A[i, i] = mp.mpf(float(diag[i]))
        for i in range(n - 1):
            A[i, i + 1] = A[i + 1, i] = -mp.sqrt(mp.mpf(float(offdiag_sq[i])))
        ev = mp.eigsy(A, eigvals_only=True)
        return float(min(mp.mpf(x) for x in ev))


# ---------------------------------------------------------------------------
# Dense smallest eigenvalue with high relative accuracy (cyclic Jacobi).
# ---------------------------------------------------------------------------


def dense_smallest(diag, offdiag_sq, tol=1e-15, max_sweeps=60):
    """Smallest eigenvalue of the symmetric tridiagonal PD matrix, float64.

    Cyclic Jacobi rotations with the relative off-diagonal criterion
    |a_pq| <= tol sqrt(a_pp a_qq); for positive definite matrices this
    delivers small eigenvalues to near machine *relative* precision, which
    QR-type dense solvers do not.
    """
    n = len(diag)
    A = np.zeros((n, n))
    idx = np.arange(n)
    A[idx, idx] = diag
    off = -np.sqrt(np.asarray(offdiag_sq))
    for i in range(n - 1):
        A[i, i + 1] = A[i + 1, i] = off[i]
    for _ in range(max_sweeps):
        done = True
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= tol * math.sqrt(A[p, p] * A[q, q]):
                    continue
                done = False
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if theta >= 0:
                    t = 1.0 / (theta + math.hypot(1.0, theta))
                else:
                    t = -1.0 / (-theta + math.hypot(1.0, theta))
                cs = 1.0 / math.hypot(1.0, t)
                sn = t * cs
                rp = A[p, :].copy()
                rq = A[q, :].copy()
                A[p, :] = cs * rp - sn * rq
                A[q, :] = sn * rp + cs * rq
                cp = A[:, p].copy()
                cq = A[:, q].copy()
                A[:, p] = cs * cp - sn * cq
                A[:, q] = sn * cp + cs * cq
                A[p, q] = A[q, p] = 0.0
        if done:
            break
    return float(np.min(np.diagonal(A)))


# ---------------------------------------------------------------------------
# Random case draws over numerically comfortable parameter ranges.
# ---------------------------------------------------------------------------


def random_case(rng, tag):
    """A random admissible case of the given tag for stress tests up to n=50.

    The ranges are broad but avoid parameter corners whose smallest
    eigenvalue collapses below the float64 noise floor of the matrix
    entries before n = 50 (strong pole/mass-driven exponential decay);
    there the eigenvalue is not determined by the double-precision data
    and no cross-algorithm statement about it can hold.
    """
    import coherentmb as cmb

    if tag == "laguerre-a":
        return cmb.CoherentCase.laguerre_a(
            alpha=rng.uniform(0.2, 3.0), xi=-rng.uniform(0.1, 3.0)
        )
    if tag == "laguerre-b":
        return cmb.CoherentCase.laguerre_b(mass=rng.uniform(0.0, 5.0))
    if tag == "laguerre-c":
        xi = 0.0 if rng.random() < 0.3 else -rng.uniform(0.05, 0.5)
        return cmb.CoherentCase.laguerre_c(
            alpha=rng.uniform(-0.8, 2.0), xi=xi, mass=rng.uniform(0.0, 3.0)
        )
    if tag == "jacobi-a":
        side = 1.0 if rng.random() < 0.5 else -1.0
        return cmb.CoherentCase.jacobi_a(
            alpha=rng.uniform(0.1, 2.5),
            beta=rng.uniform(0.1, 2.5),
            xi=side * rng.uniform(1.1, 3.0),
        )
    if tag == "jacobi-b":
        return cmb.CoherentCase.jacobi_b(
            gamma=rng.uniform(0.1, 3.0), mass=rng.uniform(0.0, 3.0)
        )
    if tag == "jacobi-c":
        return cmb.CoherentCase.jacobi_c(
            gamma=rng.uniform(0.1, 3.0), mass=rng.uniform(0.0, 3.0)
        )
    if tag == "jacobi-d":
        u = rng.random()
        if u < 0.3:
            xi = 1.0
        elif u < 0.6:
            xi = -1.0
        else:
            xi = (1.0 if rng.random() < 0.5 else -1.0) * rng.uniform(1.0, 1.03)
        return cmb.CoherentCase.jacobi_d(
            alpha=rng.uniform(-0.7, 1.5),
            beta=rng.uniform(-0.7, 1.5),
            xi=xi,
            mass=rng.uniform(0.0, 1.0),
        )
    raise ValueError(f"unknown tag {tag!r}")


def resolvable_case(rng, tag):
    """A random case whose smallest eigenvalue stays well above the float64
    resolvability floor for n <= 12 (mu >= ~1e-6 times the matrix scale).

    Used for eigensolver-equivalence checks at 1e-10 relative tolerance:
    below that floor the rounded matrix entries themselves do not pin the
    eigenvalue to 1e-10, so any two correct algorithms may disagree more.
    Calibrated by scanning 200 draws per tag against an extended-precision
    dense solve (worst observed discrepancy ~5e-12).
    """
    import coherentmb as cmb

    if tag == "laguerre-c":
        xi = 0.0 if rng.random() < 0.4 else -rng.uniform(0.05, 0.6)
        return cmb.CoherentCase.laguerre_c(
            alpha=rng.uniform(-0.8, 2.0), xi=xi, mass=rng.uniform(0.0, 3.0)
        )
    if tag == "jacobi-d":
        xi = 1.0 if rng.random() < 0.5 else -1.0
        return cmb.CoherentCase.jacobi_d(
            alpha=rng.uniform(-0.6, 1.2),
            beta=rng.uniform(-0.6, 1.2),
            xi=xi,
            mass=rng.uniform(0.0, 1.0),
        )
    return random_case(rng, tag)


def resolvable_degree(rng, tag):
    """Random degree for eigensolver-equivalence draws (n <= 12; jacobi-d
    capped at 10 where its eigenvalue decays fastest)."""
    return int(rng.integers(2, 11 if tag == "jacobi-d" else 13))
