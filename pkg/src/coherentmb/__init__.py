"""Certified Markov constants for coherent pairs of measures.

The package computes, for seven families of coherent measure pairs
(c0, c1), the sharp constant M_n in the inequality

    c1((p')^2) <= M_n^2 c0(p^2)        for all polynomials p, deg p <= n,

as M_n = 1 / sqrt(mu) where mu is the smallest eigenvalue of a symmetric
tridiagonal matrix assembled from the pair's orthogonal-polynomial data.
Everything is certified: mu comes with a two-sided enclosure, the analytic
lower bounds and qd upper bounds bracket it, and the extremal polynomial
can be evaluated and checked against quadrature.
"""

from .coherent import (
    CASE_TAGS,
    CoherentCase,
    PairData,
    coherence_residual,
    log_k0,
    log_k1,
    p_eval,
    pair_data,
    sigma,
    t_eval,
)
from .errors import (
    DegenerateFunctional,
    LossOfSignificance,
    NumericalFailure,
    QuadratureBudgetError,
    ValidationError,
)
from .functionals import (
    MomentSequence,
    QuadratureRule,
    apply,
    functional_apply,
    gauss_rule,
    jacobi_d_moments,
    laguerre_c_moments,
)
from .orthopoly import (
    JacobiParams,
    LaguerreParams,
    PolySequenceEval,
    jacobi_eval,
    jacobi_log_norm,
    jacobi_recurrence_coeffs,
    laguerre_eval,
    laguerre_log_norm,
    laguerre_recurrence_coeffs,
    reproducing_kernel,
)
from .recurrence import (
    RecurrenceSpec,
    ScaledPolyValue,
    SignedLog,
    an_at_zero,
    build_generic,
    build_specialized,
    eval_An,
)
from .solver import (
    BoundsReport,
    ExtremalPolynomial,
    Interval,
    QdState,
    bounds_report,
    extremal_polynomial,
    laguerre_b_closed_bounds,
    laguerre_method_bound,
    newton_bound,
    qd_iterate,
    smallest_zero,
)
from .verify import (
    TrendPoint,
    VerificationReport,
    check_asymptotics,
    check_identities,
    check_inequality,
    extremal_callables,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # cases and pair data
    "CASE_TAGS",
    "CoherentCase",
    "PairData",
    "pair_data",
    "sigma",
    "log_k0",
    "log_k1",
    "p_eval",
    "t_eval",
    "coherence_residual",
    # orthogonal families
    "LaguerreParams",
    "JacobiParams",
    "PolySequenceEval",
    "laguerre_recurrence_coeffs",
    "jacobi_recurrence_coeffs",
    "laguerre_eval",
    "jacobi_eval",
    "laguerre_log_norm",
    "jacobi_log_norm",
    "reproducing_kernel",
    # functionals and quadrature
    "QuadratureRule",
    "MomentSequence",
    "gauss_rule",
    "apply",
    "functional_apply",
    "laguerre_c_moments",
    "jacobi_d_moments",
    # tridiagonal recurrence
    "RecurrenceSpec",
    "ScaledPolyValue",
    "SignedLog",
    "build_generic",
    "build_specialized",
    "eval_An",
    "an_at_zero",
    # solver
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
    # verification
    "VerificationReport",
    "TrendPoint",
    "check_inequality",
    "check_identities",
    "check_asymptotics",
    "extremal_callables",
    # errors
    "ValidationError",
    "NumericalFailure",
    "LossOfSignificance",
    "QuadratureBudgetError",
    "DegenerateFunctional",
]
