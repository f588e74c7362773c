"""
Sweeps over the non-locality scale and the scaling laws fitted to them.

Two models are fitted to ``|y(ell)|``:

* :class:`PowerLaw`, ``|y| = coefficient * ell**exponent``, linear in ``(log ell, log|y|)``;
* :class:`ExpInvSq`, ``log|y| = intercept + slope / ell**2``, linear in ``(1/ell**2, log|y|)``.

Fits take either signed values or, for signals that underflow, ``log|y|`` directly (the
``*_log`` variants); the residual RMS is measured in ``log|y|`` and so is a relative deviation.
"""
import enum
import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats

from nlsignal.caching import OracleCache, cached
from nlsignal.detectors import Delta, DetectorPair
from nlsignal.exceptions import DegenerateGridError, OracleMismatch, SignChangeError
from nlsignal.field import SpectralDensity
from nlsignal.kronrod import QuadratureResult
from nlsignal.parallel import TaskManager, delayed
from nlsignal.quad import integrate_s2_nonlocal
from nlsignal.signaling import SignalingBreakdown, breakdown

logger = logging.getLogger(__name__)

MIN_FIT_POINTS: int = 5
MIN_CLASSIFY_POINTS: int = 8
MIN_CLASSIFY_DECADES: float = 1.5
SEPARATION_FACTOR: float = 10.0
ORACLE_REL_TOL: float = 1e-6
ORACLE_ABS_TOL: float = 1e-12

Configuration = Union[DetectorPair, Callable[[float], DetectorPair]]


@dataclass(frozen=True)
class PowerLaw:
    """``sign * exp(log_coefficient) * ell**exponent``."""

    exponent: float
    log_coefficient: float
    sign: float = 1.0

    @property
    def coefficient(self) -> float:
        try:
            return self.sign * math.exp(self.log_coefficient)
        except OverflowError:
            return self.sign * math.inf

    def log_abs(self, ell):
        return self.log_coefficient + self.exponent * np.log(ell)

    def __call__(self, ell):
        return self.sign * np.exp(self.log_abs(ell))


@dataclass(frozen=True)
class ExpInvSq:
    slope: float
    intercept: float

    def log_abs(self, ell):
        return self.intercept + self.slope / np.square(ell)


@dataclass(frozen=True)
class ScalingFit:
    """
    Least-squares fit of a scaling model.

    ``residual_rms`` is the RMS of ``log|y| - model`` over the ``points_used`` points and
    ``r_squared`` the squared linear correlation in the model's linearizing coordinates.
    """

    model: Union[PowerLaw, ExpInvSq]
    residual_rms: float
    points_used: int
    r_squared: float

    def asdict(self) -> dict:
        """Flat record of the fit, as written to run summaries."""
        if isinstance(self.model, PowerLaw):
            parameters = {
                "exponent": self.model.exponent,
                "log_coefficient": self.model.log_coefficient,
                "sign": self.model.sign,
            }
        else:
            parameters = {"slope": self.model.slope, "intercept": self.model.intercept}
        return {
            "model": type(self.model).__name__,
            **parameters,
            "residual_rms": self.residual_rms,
            "points_used": self.points_used,
            "r_squared": self.r_squared,
        }


class SuppressionKind(enum.Enum):
    POLYNOMIAL = "Polynomial"
    EXPONENTIAL = "Exponential"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Suppression:
    """How a signal vanishes as ``ell -> 0``; ``order`` is set for polynomial suppression."""

    kind: SuppressionKind
    order: Optional[int] = None

    def __str__(self):
        if self.kind is SuppressionKind.POLYNOMIAL:
            return f"Polynomial({self.order})"
        return self.kind.value


EXPONENTIAL = Suppression(SuppressionKind.EXPONENTIAL)
INCONCLUSIVE = Suppression(SuppressionKind.INCONCLUSIVE)


def polynomial(order: int) -> Suppression:
    return Suppression(SuppressionKind.POLYNOMIAL, order)


# Sweeps


@dataclass(frozen=True)
class SweepPoint:
    """Closed-form breakdown at one ``ell``, with the oracle's ``s2_ell`` when requested."""

    ell: float
    breakdown: SignalingBreakdown
    oracle: Optional[QuadratureResult] = None

    def check_oracle(self, rel_tol: float = ORACLE_REL_TOL, abs_tol: float = ORACLE_ABS_TOL):
        """
        :raise OracleMismatch: if the closed-form ``s2_ell`` and the oracle disagree by more than
            ``max(rel_tol |closed form|, abs_tol)``.
        """
        if self.oracle is None:
            return
        closed = self.breakdown.s2_ell
        tolerance = max(rel_tol * abs(closed), abs_tol)
        if abs(closed - self.oracle.value) > tolerance:
            raise OracleMismatch(closed, self.oracle.value, tolerance)


def _evaluate_point(  # pylint: disable=too-many-arguments
    ell: float,
    pair: DetectorPair,
    sd: SpectralDensity,
    oracle: bool,
    tol: float,
    cache: Optional[OracleCache],
) -> SweepPoint:
    result = breakdown(pair, sd)
    quadrature = None
    if oracle:
        integrate = cached(integrate_s2_nonlocal, cache) if cache else integrate_s2_nonlocal
        quadrature = integrate(pair, sd, tol)
    return SweepPoint(ell, result, quadrature)


def _check_grid(grid: Sequence[float]) -> None:
    if len(grid) == 0:
        raise DegenerateGridError("the grid is empty")
    values = np.asarray(grid, dtype=float)
    if not np.all(np.isfinite(values)) or np.any(values <= 0):
        raise DegenerateGridError(f"grid values must be positive and finite, got {list(grid)}")
    if np.any(np.diff(values) <= 0):
        raise DegenerateGridError("the grid must be strictly increasing")


def sweep(  # pylint: disable=too-many-arguments
    configuration: Configuration,
    sd_template: SpectralDensity,
    ell_grid: Sequence[float],
    oracle: bool = False,
    tol: float = 1e-10,
    workers: int = None,
    cache: OracleCache = None,
) -> List[SweepPoint]:
    """
    Evaluates the closed-form breakdown at every ``ell`` of the grid.

    :param configuration: a fixed detector pair, or a function ``ell -> pair`` for sweeps where
        the configuration moves with the scale.
    :param sd_template: density whose ``alpha`` is kept; its ``ell`` is replaced per point.
    :param oracle: also integrate ``s2_ell`` numerically at every point.
    :param workers: worker processes; ``1`` evaluates in-process.
    :returns: one :class:`SweepPoint` per grid value, in grid order.
    :raise SweepFailure: if any point failed; the individual exceptions are attached.
    """
    _check_grid(ell_grid)
    make_pair = configuration if callable(configuration) else lambda _: configuration
    logger.info(
        "sweeping %d values of ell in [%s, %s]%s",
        len(ell_grid), ell_grid[0], ell_grid[-1], " with oracle" if oracle else "",
    )
    manager = TaskManager(workers=workers)
    manager.add_tasks(
        delayed(_evaluate_point)(
            float(ell), make_pair(float(ell)), sd_template.with_ell(float(ell)), oracle, tol, cache
        )
        for ell in ell_grid
    )
    return manager.run()


def tau_sweep(
    pair: DetectorPair, sd: SpectralDensity, taus: Sequence[float], workers: int = 1
) -> List[Tuple[float, SignalingBreakdown]]:
    """
    Breakdowns of a delta-kicked Bob at each kick time in ``taus`` (fixed ``ell``), e.g. for
    approaching the future lightband boundary ``tau -> T + R`` from the timelike side.
    """
    if not isinstance(pair.bob, Delta):
        raise TypeError("tau_sweep needs a delta-switched Bob")
    manager = TaskManager(workers=workers)
    manager.add_tasks(
        delayed(breakdown)(pair.replace(bob=Delta(tau, pair.bob.kick_strength)), sd)
        for tau in taus
    )
    return list(zip((float(tau) for tau in taus), manager.run()))


def is_monotone_rise(values: Sequence[float]) -> bool:
    """Whether ``values`` strictly increase."""
    return bool(np.all(np.diff(np.asarray(values, dtype=float)) > 0))


def correction_points(points: Sequence[SweepPoint]) -> List[Tuple[float, float]]:
    """``(ell, log|s2_total - s2_local|)`` pairs of a sweep."""
    return [(point.ell, point.breakdown.log_abs_correction) for point in points]


# Fits


def _log_points(points: Sequence[Tuple[float, float]]) -> List[Tuple[float, float]]:
    values = np.array([value for _, value in points], dtype=float)
    if np.any(values == 0) or not np.all(np.isfinite(values)):
        raise DegenerateGridError("fit values must be nonzero and finite")
    n_positive = int(np.sum(values > 0))
    n_negative = len(values) - n_positive
    if n_positive and n_negative:
        raise SignChangeError(n_positive, n_negative)
    return [(ell, math.log(abs(value))) for ell, value in points]


def _linear_fit(abscissa: np.ndarray, log_values: np.ndarray) -> Tuple[float, float, float, float]:
    if len(abscissa) < MIN_FIT_POINTS:
        raise DegenerateGridError(
            f"a fit needs at least {MIN_FIT_POINTS} points, got {len(abscissa)}"
        )
    if len(np.unique(abscissa)) != len(abscissa):
        raise DegenerateGridError("the grid has repeated values")
    if not np.all(np.isfinite(log_values)):
        raise DegenerateGridError("log values must be finite")
    regression = stats.linregress(abscissa, log_values)
    residuals = log_values - (regression.intercept + regression.slope * abscissa)
    rms = float(np.sqrt(np.mean(np.square(residuals))))
    return float(regression.slope), float(regression.intercept), rms, float(regression.rvalue**2)


def _split(log_points: Sequence[Tuple[float, float]]) -> Tuple[np.ndarray, np.ndarray]:
    ells = np.array([ell for ell, _ in log_points], dtype=float)
    if np.any(ells <= 0):
        raise DegenerateGridError("ell values must be positive")
    return ells, np.array([value for _, value in log_points], dtype=float)


def fit_power_law_log(log_points: Sequence[Tuple[float, float]]) -> ScalingFit:
    """Power-law fit to ``(ell, log|y|)`` pairs; the model carries ``log|coefficient|``."""
    ells, log_values = _split(log_points)
    exponent, intercept, rms, r_squared = _linear_fit(np.log(ells), log_values)
    return ScalingFit(PowerLaw(exponent, intercept), rms, len(ells), r_squared)


def fit_exp_inv_sq_log(log_points: Sequence[Tuple[float, float]]) -> ScalingFit:
    """``log|y| = intercept + slope / ell**2`` fit to ``(ell, log|y|)`` pairs."""
    ells, log_values = _split(log_points)
    slope, intercept, rms, r_squared = _linear_fit(1 / np.square(ells), log_values)
    return ScalingFit(ExpInvSq(slope, intercept), rms, len(ells), r_squared)


def fit_power_law(points: Sequence[Tuple[float, float]]) -> ScalingFit:
    """
    Least-squares power law through ``(ell, y)`` points in log-log coordinates.

    :raise SignChangeError: if the values change sign within the grid.
    :raise DegenerateGridError: for fewer than five points, repeated ``ell`` or zero values.
    """
    fit = fit_power_law_log(_log_points(points))
    if points[0][1] < 0:
        model = fit.model
        fit = ScalingFit(
            PowerLaw(model.exponent, model.log_coefficient, -1.0), fit.residual_rms,
            fit.points_used, fit.r_squared,
        )
    logger.debug("power-law fit: %s", fit)
    return fit


def fit_exp_inv_sq(points: Sequence[Tuple[float, float]]) -> ScalingFit:
    """
    Least-squares fit of ``log|y| = intercept + slope / ell**2``.

    :raise SignChangeError: if the values change sign within the grid.
    :raise DegenerateGridError: for fewer than five points, repeated ``ell`` or zero values.
    """
    return fit_exp_inv_sq_log(_log_points(points))


def classify_suppression(
    points: Sequence[Tuple[float, float]],
    log_values: bool = False,
    min_decades: float = MIN_CLASSIFY_DECADES,
) -> Suppression:
    """
    Decides whether ``y(ell)`` vanishes polynomially or exponentially as ``ell -> 0``.

    Both models are fitted; one wins when its residual RMS is at least ten times smaller than
    the other's. A polynomial verdict carries the fitted exponent rounded to an integer.

    :param log_values: the points are ``(ell, log|y|)`` rather than ``(ell, y)``.
    :param min_decades: minimum span of the ``ell`` grid, in decades.
    :returns: ``Inconclusive`` when neither model wins, when the grid has fewer than eight
        points or spans too little, or when the values change sign.
    """
    if len(points) < MIN_CLASSIFY_POINTS:
        logger.warning("%d points are too few to classify suppression", len(points))
        return INCONCLUSIVE
    ells = [ell for ell, _ in points]
    if min(ells) <= 0 or math.log10(max(ells) / min(ells)) < min_decades:
        logger.warning("ell grid spans less than %s decades", min_decades)
        return INCONCLUSIVE
    try:
        log_points = list(points) if log_values else _log_points(points)
        power = fit_power_law_log(log_points)
        exponential = fit_exp_inv_sq_log(log_points)
    except (SignChangeError, DegenerateGridError) as error:
        logger.warning("cannot classify suppression: %s", error)
        return INCONCLUSIVE

    floor = np.finfo(float).eps
    power_rms = power.residual_rms + floor
    exponential_rms = exponential.residual_rms + floor
    logger.info(
        "suppression fits: power-law rms %.3e (exponent %.4f), exp(1/ell^2) rms %.3e",
        power.residual_rms, power.model.exponent, exponential.residual_rms,
    )
    if SEPARATION_FACTOR * power_rms <= exponential_rms:
        return polynomial(int(round(power.model.exponent)))
    if SEPARATION_FACTOR * exponential_rms <= power_rms:
        return EXPONENTIAL
    return INCONCLUSIVE
