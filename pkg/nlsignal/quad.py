"""
Quadrature oracle for ``S2``: evaluates the defining integrals directly from the commutator
kernels, independently of the closed forms in :mod:`nlsignal.signaling`.

The interior part is integrated over Bob's time ``t2`` (outer) and, for each ``t2``, over the
invariant ``y = (t2 - t1)**2 - R**2`` of Alice's time ``t1`` (inner). The inner kernel
``exp(-y / 4 l**2) / (2 sqrt(R**2 + y))`` has width ``4 l**2``, so it is integrated in
``u = y / (4 l**2)`` where the width is one at every ``l``; the lower limit is shifted out
(``u = u_lo + v``) and ``exp(-u_lo)`` applied afterwards, which keeps timelike values
representable down to ``exp(-700)``.

Alice may use any rectangular window and Bob any switching; nothing here assumes a regime.
"""
import logging
import math
from typing import Callable, Sequence, Tuple

import numpy as np

from nlsignal.detectors import Delta, DetectorPair
from nlsignal.field import SpectralDensity
from nlsignal.kronrod import EvaluationBudget, QuadratureResult, integrate_adaptive

logger = logging.getLogger(__name__)

MIN_TOLERANCE: float = 1e-10
# Beyond v = 60 the shifted kernel exp(-v) is below 1e-26 of its peak.
KERNEL_CUTOFF: float = 60.0


def _check_tolerance(tol: float) -> None:
    if not tol >= MIN_TOLERANCE:
        raise ValueError(f"tol must be >= {MIN_TOLERANCE}, got {tol}")


def _inner_interior(  # pylint: disable=too-many-arguments
    t2: float,
    pair: DetectorPair,
    sd: SpectralDensity,
    rel_tol: float,
    budget: EvaluationBudget,
) -> Tuple[float, float]:
    """
    ``int dt1 chi_A(t1) cos(W t1) interior(R**2 - (t2 - t1)**2)`` and its error estimate.
    """
    start, end = pair.alice.support
    distance, omega = pair.separation, pair.omega
    if t2 - start <= distance:
        return 0.0, 0.0
    width = 4 * sd.width_sq
    u_hi = ((t2 - start) ** 2 - distance**2) / width
    u_lo = ((t2 - end) ** 2 - distance**2) / width if t2 - end > distance else 0.0
    span = min(u_hi - u_lo, KERNEL_CUTOFF)

    def kernel(v: float) -> float:
        lag = math.sqrt(distance**2 + width * (u_lo + v))
        return math.cos(omega * (t2 - lag)) * math.exp(-v) / (2 * lag)

    result = integrate_adaptive(kernel, 0.0, span, rel_tol, abs_tol=1e-300, budget=budget)
    factor = -sd.weight / (2 * math.pi) * math.exp(-u_lo)
    return factor * result.value, abs(factor) * result.error_estimate


def integrate_s2_nonlocal(
    pair: DetectorPair, sd: SpectralDensity, tol: float = 1e-10, budget: EvaluationBudget = None
) -> QuadratureResult:
    """
    Interior-kernel part ``s2_ell`` of ``S2`` by nested adaptive quadrature.

    :param tol: relative tolerance, at least ``1e-10``; the inner integrals run at ``tol / 10``.
    :param budget: kernel-call budget shared by all nested integrals (10**7 by default).
    :raise QuadratureNonConvergence: if any integral misses its tolerance or the budget runs out.
    """
    _check_tolerance(tol)
    budget = budget or EvaluationBudget()
    prefactor = 4 * pair.amp_product
    inner_tol = tol / 10

    if isinstance(pair.bob, Delta):
        tau = pair.bob.at
        value, error = _inner_interior(tau, pair, sd, inner_tol, budget)
        scale = prefactor * pair.kappa * math.cos(pair.omega * tau)
        tolerance = max(tol * abs(scale * value), 1e-300)
        result = QuadratureResult(scale * value, abs(scale) * error, budget.used, tolerance)
        logger.debug("oracle s2_ell (delta, tau=%s): %.17e", tau, result.value)
        return result

    start, end = pair.alice.support
    distance = pair.separation
    lower = max(pair.bob.support[0], start + distance)
    upper = pair.bob.support[1]
    if upper <= lower:
        return QuadratureResult(0.0, 0.0, 0, 0.0)

    inner_errors = []

    def outer(t2: float) -> float:
        value, error = _inner_interior(t2, pair, sd, inner_tol, budget)
        inner_errors.append(abs(math.cos(pair.omega * t2)) * error)
        return math.cos(pair.omega * t2) * value

    layer = sd.width_sq / distance
    points = (start + distance + layer, start + distance + 100 * layer, end + distance)
    result = integrate_adaptive(outer, lower, upper, tol, abs_tol=1e-300, budget=budget,
                                points=points)
    inner_bound = (upper - lower) * max(inner_errors, default=0.0)
    result = QuadratureResult(
        result.value, result.error_estimate + inner_bound, result.evaluations, result.tolerance
    ).scaled(prefactor)
    logger.debug(
        "oracle s2_ell (window %s): %.17e +- %.1e in %d calls",
        pair.bob.support, result.value, result.error_estimate, budget.used,
    )
    return result


def integrate_s2_local(
    pair: DetectorPair, tol: float = 1e-10, budget: EvaluationBudget = None
) -> QuadratureResult:
    """
    Local signal ``s2_local``: the cone delta is integrated analytically in Alice's time
    (``t1 = t2 - R``, Jacobian ``1 / (2R)``), leaving a quadrature over Bob's time.
    """
    _check_tolerance(tol)
    budget = budget or EvaluationBudget()
    start, end = pair.alice.support
    distance, omega = pair.separation, pair.omega
    prefactor = pair.amp_product / (math.pi * distance)

    def integrand(t2: float) -> float:
        return math.cos(omega * t2) * math.cos(omega * (t2 - distance))

    if isinstance(pair.bob, Delta):
        tau = pair.bob.at
        inside = start < tau - distance < end
        value = prefactor * pair.kappa * integrand(tau) if inside else 0.0
        return QuadratureResult(value, 0.0, 1, tol * abs(value))

    lower = max(pair.bob.support[0], start + distance)
    upper = min(pair.bob.support[1], end + distance)
    if upper <= lower:
        return QuadratureResult(0.0, 0.0, 0, 0.0)
    return integrate_adaptive(integrand, lower, upper, tol, abs_tol=1e-300, budget=budget).scaled(
        prefactor
    )


def integrate_s2_total(
    pair: DetectorPair, sd: SpectralDensity, tol: float = 1e-10, budget: EvaluationBudget = None
) -> QuadratureResult:
    """``s2_total = (1 + 1/alpha) s2_local + s2_ell`` from the oracle integrals."""
    budget = budget or EvaluationBudget()
    local = integrate_s2_local(pair, tol, budget)
    return local.scaled(1 + sd.weight) + integrate_s2_nonlocal(pair, sd, tol, budget)


def extrapolate_constant_density(
    pair: DetectorPair,
    ell: float,
    epsilons: Sequence[float],
    correction: Callable[[DetectorPair, SpectralDensity], float] = None,
) -> Tuple[float, np.ndarray]:
    """
    Non-local correction ``s2_total - s2_local`` for the constant density ``rho = ell**2``.

    The constant density needs a regulator; with ``exp(-eps mu**2)`` it becomes the Gaussian
    family with ``alpha = eps / ell**2``. The correction is evaluated at each ``eps`` and
    extrapolated linearly to ``eps -> 0``.

    :param correction: evaluates the correction for a density; defaults to the oracle
        (``integrate_s2_total - integrate_s2_local``).
    :returns: the extrapolated correction and the per-``eps`` corrections.
    """
    if len(epsilons) < 2:
        raise ValueError("at least two regulator values are needed to extrapolate")
    correction = correction or _oracle_correction
    values = np.array(
        [correction(pair, SpectralDensity.regulated_constant(ell, eps)) for eps in epsilons]
    )
    slope, intercept = np.polyfit(np.asarray(epsilons, dtype=float), values, 1)
    logger.info(
        "constant-density correction at ell=%s: %.10e (slope in eps %.3e)", ell, intercept, slope
    )
    return float(intercept), values


def _oracle_correction(pair: DetectorPair, sd: SpectralDensity) -> float:
    local = integrate_s2_local(pair).value
    return sd.weight * local + integrate_s2_nonlocal(pair, sd).value


__all__ = [
    "QuadratureResult",
    "integrate_s2_nonlocal",
    "integrate_s2_local",
    "integrate_s2_total",
    "extrapolate_constant_density",
]
