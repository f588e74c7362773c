"""
Adaptive Gauss-Kronrod integration with explicit error accounting and an evaluation budget.

Thin layer over QUADPACK (``scipy.integrate.quad``, 21-point Gauss-Kronrod panels with
adaptive bisection). QUADPACK reports trouble through ``IntegrationWarning``; here every such
condition becomes a :class:`QuadratureNonConvergence` carrying the best estimate, so that no
integral used as an oracle ever silently returns a best-effort number.
"""
import logging
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Tuple

from scipy import integrate

from nlsignal.exceptions import QuadratureNonConvergence

logger = logging.getLogger(__name__)

DEFAULT_BUDGET: int = 10_000_000
ABSOLUTE_FLOOR: float = 1e-300
MAX_SUBINTERVALS: int = 500


@dataclass(frozen=True)
class QuadratureResult:
    """
    Value of a numerical integral with its error estimate.

    ``tolerance`` is the absolute accuracy the integral was asked for, resolved against the
    value (``max(rel_tol * |value|, abs_tol)``); ``converged`` is true iff the estimate meets it.
    """

    value: float
    error_estimate: float
    evaluations: int
    tolerance: float

    def __post_init__(self):
        if self.error_estimate < 0 or math.isnan(self.error_estimate):
            raise ValueError(f"error_estimate must be >= 0, got {self.error_estimate}")

    @property
    def converged(self) -> bool:
        """Whether the error estimate meets the requested tolerance."""
        return self.error_estimate <= self.tolerance

    def __add__(self, other: "QuadratureResult") -> "QuadratureResult":
        return QuadratureResult(
            self.value + other.value,
            self.error_estimate + other.error_estimate,
            self.evaluations + other.evaluations,
            self.tolerance + other.tolerance,
        )

    def scaled(self, factor: float) -> "QuadratureResult":
        """Returns this result multiplied by a constant."""
        factor = float(factor)
        return QuadratureResult(
            self.value * factor,
            self.error_estimate * abs(factor),
            self.evaluations,
            self.tolerance * abs(factor),
        )


class EvaluationBudget:
    """
    Counts integrand evaluations across (possibly nested) integrals and aborts once the
    allowance is used up.

    ::

        budget = EvaluationBudget(1000)
        integrate_adaptive(math.sin, 0, 1, rel_tol=1e-10, budget=budget)
        budget.used  # number of kernel calls made
    """

    def __init__(self, limit: int = DEFAULT_BUDGET):
        if limit <= 0:
            raise ValueError(f"'limit' must be positive but was '{limit}'")
        self.limit = limit
        self.used = 0

    def counted(self, func: Callable[[float], float]) -> Callable[[float], float]:
        """Wraps ``func`` so each call is charged against this budget."""

        def wrapped(x: float) -> float:
            self.used += 1
            if self.used > self.limit:
                raise _BudgetExhausted()
            return func(x)

        return wrapped


class _BudgetExhausted(Exception):
    pass


def integrate_adaptive(  # pylint: disable=too-many-arguments
    func: Callable[[float], float],
    lower: float,
    upper: float,
    rel_tol: float,
    abs_tol: float = ABSOLUTE_FLOOR,
    budget: EvaluationBudget = None,
    points: Tuple[float, ...] = (),
) -> QuadratureResult:
    """
    Integrates ``func`` over ``[lower, upper]`` (``upper`` may be ``math.inf``).

    :param rel_tol: requested relative accuracy.
    :param abs_tol: absolute accuracy floor; reached first for integrals that vanish.
    :param budget: shared evaluation budget. A fresh default budget is used if omitted.
    :param points: interior break points where the integrand has kinks (finite ranges only).
    :raise QuadratureNonConvergence: if the tolerance is not met or the budget runs out.
    """
    budget = budget or EvaluationBudget()
    if upper == lower:
        return QuadratureResult(0.0, 0.0, 0, abs_tol)
    if upper < lower:
        return integrate_adaptive(
            func, upper, lower, rel_tol, abs_tol, budget, points
        ).scaled(-1.0)

    start = budget.used
    kwargs = {"epsabs": abs_tol, "epsrel": rel_tol, "limit": MAX_SUBINTERVALS}
    inner_points = tuple(p for p in points if lower < p < upper)
    if inner_points and math.isfinite(upper):
        kwargs["points"] = inner_points

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        try:
            value, error = integrate.quad(budget.counted(func), lower, upper, **kwargs)[:2]
        except _BudgetExhausted:
            raise QuadratureNonConvergence(
                math.nan, math.inf, budget.used - start, "evaluation budget exhausted"
            ) from None

    evaluations = budget.used - start
    tolerance = max(rel_tol * abs(value), abs_tol)
    result = QuadratureResult(float(value), float(error), evaluations, tolerance)

    quad_warnings = [w for w in caught if issubclass(w.category, integrate.IntegrationWarning)]
    if quad_warnings or not result.converged:
        reason = str(quad_warnings[0].message).splitlines()[0] if quad_warnings else (
            "error estimate above tolerance"
        )
        raise QuadratureNonConvergence(result.value, result.error_estimate, evaluations, reason)

    logger.debug(
        "quad [%s, %s]: %.6e +- %.1e (%d calls)", lower, upper, value, error, evaluations
    )
    return result
