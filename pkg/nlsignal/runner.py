"""
Runs an :class:`~nlsignal.configurations.ExperimentSpec`: sweeps the scenario over its ``ell``
grid, writes the results table and a JSON summary, and maps failures onto exit codes.

Exit codes: 0 success, 1 invalid spec or configuration, 2 numerical non-convergence, 3 a check
failed (including closed-form/oracle disagreement).
"""
import json
import logging
import math
import os
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np
import pandas as pd

from nlsignal.analysis import (
    SweepPoint,
    classify_suppression,
    correction_points,
    fit_exp_inv_sq_log,
    fit_power_law_log,
    is_monotone_rise,
    sweep,
    tau_sweep,
)
from nlsignal.caching import OracleCache
from nlsignal.configurations import ExperimentSpec, Scenario, spec_to_mapping
from nlsignal.detectors import DetectorPair
from nlsignal.exceptions import (
    ConfigurationError,
    QuadratureNonConvergence,
    SpecValidationError,
    SweepFailure,
)
from nlsignal.signaling import degenerate_ratio, ratio_nonlocal

logger = logging.getLogger(__name__)

EXIT_SUCCESS = 0
EXIT_INVALID = 1
EXIT_NONCONVERGENCE = 2
EXIT_CHECK_FAILED = 3

TABLE_COLUMNS = [
    "ell", "s2_local", "s2_ell", "s2_total", "correction", "oracle_value", "oracle_error",
]
TABLE_NAME = "results.csv"
SUMMARY_NAME = "summary.json"
# Timelike grids span less than the default 1.5 decades.
TIMELIKE_MIN_DECADES = 0.75
LEADING_RESIDUAL_RATIO = 1e-2


@dataclass(frozen=True)
class Check:
    name: str
    expected: str
    observed: float
    passed: bool

    def asdict(self) -> dict:
        return {
            "name": self.name,
            "expected": self.expected,
            "observed": _json_number(self.observed),
            "pass": self.passed,
        }


@dataclass(frozen=True)
class RunReport:
    exit_code: int
    table_path: Optional[str] = None
    summary_path: Optional[str] = None
    checks: tuple = ()


def _json_number(value: float):
    return value if math.isfinite(value) else str(value)


def results_table(points: List[SweepPoint]) -> pd.DataFrame:
    """One row per ``ell``, in :data:`TABLE_COLUMNS` order; missing oracle values are NaN."""
    rows = [
        (
            point.ell,
            point.breakdown.s2_local,
            point.breakdown.s2_ell,
            point.breakdown.s2_total,
            point.breakdown.correction,
            point.oracle.value if point.oracle else np.nan,
            point.oracle.error_estimate if point.oracle else np.nan,
        )
        for point in points
    ]
    return pd.DataFrame(rows, columns=TABLE_COLUMNS)


def write_table(table: pd.DataFrame, path: str) -> None:
    """Writes the table with 17 significant digits in scientific notation."""
    table.to_csv(path, index=False, float_format="%.16e", na_rep="nan", lineterminator="\n")


def _range_check(name: str, observed: float, target: float, tolerance: float) -> Check:
    return Check(name, f"{target} +- {tolerance}", observed, abs(observed - target) <= tolerance)


def _oracle_check(points: List[SweepPoint], tolerance: float) -> Check:
    deviations = [
        abs(point.breakdown.s2_ell - point.oracle.value)
        / max(abs(point.breakdown.s2_ell), 1e-12 / tolerance)
        for point in points
        if point.oracle is not None
    ]
    worst = max(deviations, default=0.0)
    return Check("oracle_agreement", f"<= {tolerance}", worst, worst <= tolerance)


class _Analysis:
    """Scenario-specific fits and checks over a finished sweep."""

    def __init__(self, spec: ExperimentSpec, workers: Optional[int]):
        self.spec = spec
        self.workers = workers
        self.fit: Optional[dict] = None
        self.classification: Optional[str] = None
        self.extra: dict = {}
        self.checks: List[Check] = []

    def run(self, points: List[SweepPoint]) -> None:
        handlers = {
            Scenario.FIG3: self._narrow_window,
            Scenario.LIGHTBAND_DELTA: self._local_limit,
            Scenario.LIGHTBAND_EXTENDED: self._local_limit,
            Scenario.LOCAL_LIMIT: self._local_limit,
            Scenario.TIMELIKE: self._timelike,
            Scenario.TIMELIKE_SUPPRESSION: self._timelike_suppression,
            Scenario.DEGENERATE_RATIO: self._degenerate_ratio,
        }
        handlers[self.spec.scenario](points)

    def _power_law(self, points: List[SweepPoint]):
        if len(points) < 5:
            return None
        fit = fit_power_law_log(correction_points(points))
        self.fit = fit.asdict()
        self.classification = str(classify_suppression(correction_points(points), log_values=True))
        return fit

    def _narrow_window(self, points: List[SweepPoint]) -> None:
        fit = self._power_law(points)
        if fit is not None:
            self.checks.append(_range_check("correction_exponent", fit.model.exponent, 2.0, 0.05))
            self.checks.append(Check("residual_rms", "<= 0.01", fit.residual_rms,
                                     fit.residual_rms <= 0.01))

    def _local_limit(self, points: List[SweepPoint]) -> None:
        fit = self._power_law(points)
        if fit is None:
            return
        self.checks.append(_range_check("correction_exponent", fit.model.exponent, 2.0, 0.1))
        # s2_ell + s2_local / alpha is the correction itself, so this pins the rate at which
        # s2_ell approaches -s2_local / alpha. The leading term only holds for ell << R.
        ell_max = LEADING_RESIDUAL_RATIO * self.spec.parameter("R")
        residuals = [
            (point.ell, math.log(abs(point.breakdown.correction - leading)))
            for point, leading in ((p, p.breakdown.leading_correction) for p in points)
            if point.ell <= ell_max
            and leading is not None
            and point.breakdown.correction != leading
        ]
        if len(residuals) >= 5:
            residual_fit = fit_power_law_log(residuals)
            self.extra["leading_residual_exponent"] = residual_fit.model.exponent
            self.checks.append(
                _range_check("leading_residual_exponent", residual_fit.model.exponent, 4.0, 0.3)
            )

    def _timelike(self, points: List[SweepPoint]) -> None:
        self.checks.append(
            Check("local_vanishes", "== 0", max(abs(p.breakdown.s2_local) for p in points),
                  all(p.breakdown.s2_local == 0 for p in points))
        )
        if len(points) >= 5:
            fit = fit_exp_inv_sq_log(correction_points(points))
            self.fit = fit.asdict()
            self.classification = str(
                classify_suppression(
                    correction_points(points), log_values=True, min_decades=TIMELIKE_MIN_DECADES
                )
            )

    def _timelike_suppression(self, points: List[SweepPoint]) -> None:
        self._timelike(points)
        if self.fit is None:
            return
        self.checks.append(
            Check("exp_inv_sq_r_squared", ">= 0.999", self.fit["r_squared"],
                  self.fit["r_squared"] >= 0.999)
        )
        self.checks.append(
            Check("classification", "Exponential", math.nan, self.classification == "Exponential")
        )
        self._boundary(points)

    def _boundary(self, points: List[SweepPoint]) -> None:
        spec = self.spec
        boundary = spec.parameter("T") + spec.parameter("R")
        ells = [point.ell for point in points]

        def at_boundary(ell: float) -> DetectorPair:
            return spec.pair(tau=boundary + ell / 10)

        near = sweep(at_boundary, spec.density(), ells, workers=self.workers)
        self.extra["boundary_classification"] = str(
            classify_suppression(
                correction_points(near), log_values=True, min_decades=TIMELIKE_MIN_DECADES
            )
        )

        ell = float(np.sqrt(ells[0] * ells[-1]))
        taus = boundary + ell * np.linspace(5.0, 0.01, 25)
        crossing = tau_sweep(spec.pair(tau=taus[0]), spec.density().with_ell(ell), taus,
                             workers=self.workers)
        rising = [result.log_abs_correction for _, result in crossing]
        self.checks.append(
            Check("boundary_monotone_rise", "log|S2| rises as tau -> T + R", ell,
                  is_monotone_rise(rising))
        )

    def _degenerate_ratio(self, points: List[SweepPoint]) -> None:
        spec = self.spec
        pair = spec.pair()
        for point in points:
            observed = ratio_nonlocal(pair, spec.density().with_ell(point.ell))
            expected = degenerate_ratio(point.ell, spec.parameter("R"), spec.parameter("T"))
            deviation = abs(observed / expected - 1)
            self.extra.setdefault("ratios", []).append(
                {"ell": point.ell, "ratio": observed, "expected": expected}
            )
            self.checks.append(Check("degenerate_ratio", "relative deviation <= 0.01",
                                     deviation, deviation <= 0.01))


def run(
    spec: ExperimentSpec,
    out_dir: str,
    workers: Optional[int] = None,
    cache: OracleCache = None,
) -> RunReport:
    """
    Runs ``spec`` and writes ``results.csv`` and ``summary.json`` into ``out_dir``.

    Exceptions propagate; :func:`execute` turns them into exit codes.
    """
    grid = spec.ell_grid.values()
    logger.info(
        "running %s over %d ell values in [%s, %s]",
        spec.scenario.value, len(grid), grid[0], grid[-1],
    )
    pair = spec.pair()
    points = sweep(
        pair, spec.density(), grid, oracle=spec.oracle_check, tol=spec.tolerance,
        workers=workers, cache=cache,
    )

    analysis = _Analysis(spec, workers)
    analysis.run(points)
    checks = list(analysis.checks)
    if spec.oracle_check:
        checks.append(_oracle_check(points, 1e-6))

    os.makedirs(out_dir, exist_ok=True)
    table_path = os.path.join(out_dir, TABLE_NAME)
    write_table(results_table(points), table_path)

    summary = {
        "scenario": spec.scenario.value,
        "parameters": {
            key: value for key, value in spec_to_mapping(spec).items() if key != "scenario"
        },
        "fit": analysis.fit,
        "classification": analysis.classification,
        "checks": [check.asdict() for check in checks],
    }
    if analysis.extra:
        summary["details"] = analysis.extra
    summary_path = os.path.join(out_dir, SUMMARY_NAME)
    with open(summary_path, "w", encoding="utf-8") as file:
        json.dump(summary, file, indent=2, default=_json_number)
        file.write("\n")

    failed = [check.name for check in checks if not check.passed]
    for check in checks:
        logger.info("check %s: observed %s (expected %s)%s", check.name, check.observed,
                    check.expected, "" if check.passed else " FAILED")
    exit_code = EXIT_CHECK_FAILED if failed else EXIT_SUCCESS
    return RunReport(exit_code, table_path, summary_path, tuple(checks))


def _is_nonconvergence(error: BaseException) -> bool:
    if isinstance(error, QuadratureNonConvergence):
        return True
    return isinstance(error, SweepFailure) and any(
        isinstance(inner, QuadratureNonConvergence) for inner in error.exceptions
    )


def _is_invalid(error: BaseException) -> bool:
    invalid = (SpecValidationError, ConfigurationError)
    if isinstance(error, invalid):
        return True
    return isinstance(error, SweepFailure) and all(
        isinstance(inner, invalid) for inner in error.exceptions
    )


def execute(
    spec_factory: Callable[[], ExperimentSpec],
    out_dir: str,
    workers: Optional[int] = None,
    cache: OracleCache = None,
    dry_run: bool = False,
) -> int:
    """
    Builds and runs a spec, returning the process exit code. Diagnostics go to the log.
    """
    try:
        spec = spec_factory()
        if dry_run:
            logger.info("Run plan: %s over ell = %s", spec.scenario.value,
                        ", ".join(f"{ell:.6g}" for ell in spec.ell_grid.values()))
            logger.info("Parameters: %s", spec_to_mapping(spec))
            logger.info("Exiting due to dry run")
            return EXIT_SUCCESS
        return run(spec, out_dir, workers, cache).exit_code
    except Exception as error:  # pylint: disable=broad-except
        if _is_invalid(error):
            logger.error("invalid specification: %s", error)
            return EXIT_INVALID
        if _is_nonconvergence(error):
            logger.error("numerical non-convergence: %s", error)
            return EXIT_NONCONVERGENCE
        raise
