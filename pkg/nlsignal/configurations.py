"""
Experiment specifications, their flat ``key = value`` file format, scenario presets and the
configuration-matrix generator used to build grids of detector configurations.
"""
import enum
import itertools
import logging
import math
import os
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np

from nlsignal.detectors import Delta, DetectorPair, Rect
from nlsignal.exceptions import SpecValidationError
from nlsignal.field import SpectralDensity

logger = logging.getLogger(__name__)

WORKERS_VARIABLE = "NLSIGNAL_WORKERS"

PARAMETER_NAMES: Tuple[str, ...] = (
    "omega", "R", "T", "tau", "a", "b", "kappa", "amp_product", "alpha",
)
PARAMETER_DEFAULTS: Dict[str, float] = {"kappa": 1.0, "amp_product": 1.0, "alpha": 1.0}


class Scenario(enum.Enum):
    LIGHTBAND_DELTA = "LightbandDelta"
    LIGHTBAND_EXTENDED = "LightbandExtended"
    TIMELIKE = "Timelike"
    FIG3 = "Fig3"
    LOCAL_LIMIT = "LocalLimit"
    TIMELIKE_SUPPRESSION = "TimelikeSuppression"
    DEGENERATE_RATIO = "DegenerateRatio"


REQUIRED_PARAMETERS: Dict[Scenario, Tuple[str, ...]] = {
    Scenario.LIGHTBAND_DELTA: ("omega", "R", "T", "tau"),
    Scenario.LIGHTBAND_EXTENDED: ("omega", "R", "T", "a", "b"),
    Scenario.TIMELIKE: ("omega", "R", "T", "tau"),
    Scenario.FIG3: ("omega", "R", "T", "a", "b"),
    Scenario.LOCAL_LIMIT: ("omega", "R", "T"),
    Scenario.TIMELIKE_SUPPRESSION: ("omega", "R", "T", "tau"),
    Scenario.DEGENERATE_RATIO: ("omega", "R", "T", "a", "b"),
}


@dataclass(frozen=True)
class EllGrid:
    """Grid of non-locality scales: ``count`` points from ``min`` to ``max``."""

    min: float
    max: float
    count: int
    spacing: str = "log"

    def __post_init__(self):
        if self.spacing not in ("log", "linear"):
            raise SpecValidationError(
                f"ell_spacing must be 'log' or 'linear', got {self.spacing!r}"
            )
        if self.count < 1:
            raise SpecValidationError(f"ell_count must be at least 1, got {self.count}")
        if not (self.min > 0 and math.isfinite(self.max)):
            raise SpecValidationError(
                f"ell_min must be positive and ell_max finite, got {self.min}, {self.max}"
            )
        if self.max < self.min or (self.count > 1 and self.max == self.min):
            raise SpecValidationError(
                f"ell_max ({self.max}) must exceed ell_min ({self.min}) for {self.count} points"
            )

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.min])
        if self.spacing == "log":
            return np.logspace(math.log10(self.min), math.log10(self.max), self.count)
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class ExperimentSpec:
    """
    A complete, validated description of one run.

    ``parameters`` holds the named physical inputs (a subset of :data:`PARAMETER_NAMES`);
    ``kappa``, ``amp_product`` and ``alpha`` default to one.
    """

    scenario: Scenario
    parameters: Mapping[str, float]
    ell_grid: EllGrid
    oracle_check: bool = False
    tolerance: float = 1e-10

    def __post_init__(self):
        unknown = sorted(set(self.parameters) - set(PARAMETER_NAMES))
        if unknown:
            raise SpecValidationError(f"unknown parameters: {', '.join(unknown)}")
        required = REQUIRED_PARAMETERS[self.scenario]
        missing = [name for name in required if name not in self.parameters]
        if missing:
            raise SpecValidationError(
                f"scenario {self.scenario.value} needs parameters: {', '.join(missing)}"
            )
        for name, value in self.parameters.items():
            if not math.isfinite(value):
                raise SpecValidationError(f"parameter {name} must be finite, got {value}")
        if self.scenario is Scenario.LOCAL_LIMIT and not (
            "tau" in self.parameters or {"a", "b"} <= set(self.parameters)
        ):
            raise SpecValidationError("scenario LocalLimit needs either tau or both a and b")
        if {"a", "b"} <= set(self.parameters) and not self.parameters["a"] < self.parameters["b"]:
            raise SpecValidationError(
                f"a ({self.parameters['a']}) must be less than b ({self.parameters['b']})"
            )
        if not self.tolerance >= 1e-10:
            raise SpecValidationError(f"tolerance must be at least 1e-10, got {self.tolerance}")

    def parameter(self, name: str) -> float:
        """A parameter value, falling back to its default."""
        if name in self.parameters:
            return self.parameters[name]
        if name in PARAMETER_DEFAULTS:
            return PARAMETER_DEFAULTS[name]
        raise SpecValidationError(f"scenario {self.scenario.value} has no parameter {name}")

    @property
    def uses_rect(self) -> bool:
        """Whether Bob has a rectangular window ``[a, b]`` rather than a kick at ``tau``."""
        if self.scenario is Scenario.LOCAL_LIMIT:
            return {"a", "b"} <= set(self.parameters)
        return "a" in REQUIRED_PARAMETERS[self.scenario]

    def pair(self, tau: Optional[float] = None) -> DetectorPair:
        """Detector pair described by this spec; ``tau`` overrides the kick time."""
        alice = Rect(0.0, self.parameter("T"))
        if self.uses_rect:
            bob = Rect(self.parameter("a"), self.parameter("b"))
        else:
            bob = Delta(self.parameter("tau") if tau is None else tau, self.parameter("kappa"))
        return DetectorPair(
            self.parameter("omega"), self.parameter("R"), alice, bob, self.parameter("amp_product")
        )

    def density(self) -> SpectralDensity:
        return SpectralDensity(self.ell_grid.min, self.parameter("alpha"))

    def with_overrides(self, **overrides) -> "ExperimentSpec":
        """
        Returns a copy with parameters and grid/oracle settings replaced; ``None`` values are
        ignored. Keys use the config-file names (``ell_min``, ``oracle_check``, ``R``, ...).
        """
        overrides = {key: value for key, value in overrides.items() if value is not None}
        return spec_from_mapping({**spec_to_mapping(self), **overrides})


# Flat key = value format


def spec_to_mapping(spec: ExperimentSpec) -> Dict[str, object]:
    mapping: Dict[str, object] = {"scenario": spec.scenario.value}
    mapping.update(
        {name: spec.parameters[name] for name in PARAMETER_NAMES if name in spec.parameters}
    )
    mapping.update(
        {
            "ell_min": spec.ell_grid.min,
            "ell_max": spec.ell_grid.max,
            "ell_count": spec.ell_grid.count,
            "ell_spacing": spec.ell_grid.spacing,
            "oracle_check": spec.oracle_check,
            "tolerance": spec.tolerance,
        }
    )
    return mapping


def _parse_bool(text: str) -> bool:
    lowered = str(text).strip().lower()
    if lowered in ("true", "yes", "1"):
        return True
    if lowered in ("false", "no", "0"):
        return False
    raise SpecValidationError(f"oracle_check must be true or false, got {text!r}")


def _parse_float(key: str, text) -> float:
    try:
        return float(text)
    except (TypeError, ValueError):
        raise SpecValidationError(f"{key} must be a number, got {text!r}") from None


def spec_from_mapping(mapping: Mapping[str, object]) -> ExperimentSpec:
    """
    Builds a spec from flat keys. Keys absent from ``mapping`` take the scenario preset's
    values; unknown keys are errors.

    :raise SpecValidationError: for unknown keys, unparsable values or an invalid spec.
    """
    if "scenario" not in mapping:
        raise SpecValidationError("missing key: scenario")
    try:
        scenario = Scenario(str(mapping["scenario"]))
    except ValueError:
        names = ", ".join(s.value for s in Scenario)
        raise SpecValidationError(
            f"unknown scenario {mapping['scenario']!r}; expected one of {names}"
        ) from None

    grid_keys = ("ell_min", "ell_max", "ell_count", "ell_spacing")
    known = {"scenario", "oracle_check", "tolerance", *grid_keys, *PARAMETER_NAMES}
    unknown = sorted(set(mapping) - known)
    if unknown:
        raise SpecValidationError(f"unknown keys: {', '.join(unknown)}")

    preset = spec_to_mapping(SCENARIO_PRESETS[scenario])
    if "a" in mapping or "b" in mapping:
        # a window given explicitly replaces the preset kick
        preset.pop("tau", None)
    merged = {**preset, **mapping}
    parameters = {
        name: _parse_float(name, merged[name]) for name in PARAMETER_NAMES if name in merged
    }
    count = _parse_float("ell_count", merged["ell_count"])
    if count != int(count):
        raise SpecValidationError(f"ell_count must be an integer, got {merged['ell_count']!r}")
    grid = EllGrid(
        _parse_float("ell_min", merged["ell_min"]),
        _parse_float("ell_max", merged["ell_max"]),
        int(count),
        str(merged["ell_spacing"]),
    )
    oracle_check = merged["oracle_check"]
    if not isinstance(oracle_check, bool):
        oracle_check = _parse_bool(str(oracle_check))
    return ExperimentSpec(
        scenario, parameters, grid, oracle_check, _parse_float("tolerance", merged["tolerance"])
    )


def loads(text: str) -> ExperimentSpec:
    """
    Parses the flat config format: one ``key = value`` per line, ``#`` starts a comment.

    ::

        scenario = Fig3
        b = 8.2        # widen Bob's window
        ell_count = 40
    """
    mapping: Dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, separator, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not separator or not key or not value:
            raise SpecValidationError(f"line {number}: expected 'key = value', got {raw!r}")
        if key in mapping:
            raise SpecValidationError(f"line {number}: duplicate key {key!r}")
        mapping[key] = value
    return spec_from_mapping(mapping)


def _format(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dumps(spec: ExperimentSpec) -> str:
    """Serializes ``spec`` so that ``loads(dumps(spec)) == spec``."""
    return "".join(f"{key} = {_format(value)}\n" for key, value in spec_to_mapping(spec).items())


def load(path: str) -> ExperimentSpec:
    with open(path, "r", encoding="utf-8") as file:
        return loads(file.read())


def dump(spec: ExperimentSpec, path: str) -> None:
    with open(path, "w", encoding="utf-8") as file:
        file.write(dumps(spec))


def default_workers() -> Optional[int]:
    """Worker count from ``$NLSIGNAL_WORKERS``; ``None`` (one per CPU) when unset."""
    value = os.environ.get(WORKERS_VARIABLE)
    if not value:
        return None
    try:
        workers = int(value)
    except ValueError:
        raise SpecValidationError(f"{WORKERS_VARIABLE} must be an integer, got {value!r}") from None
    if workers < 1:
        raise SpecValidationError(f"{WORKERS_VARIABLE} must be positive, got {workers}")
    return workers


def _preset(scenario: Scenario, grid: EllGrid, **parameters: float) -> ExperimentSpec:
    return ExperimentSpec(scenario, parameters, grid)


_LIGHTBAND_GRID = EllGrid(7e-3, 7e-1, 20)
_TIMELIKE_GRID = EllGrid(0.05, 0.3, 20)

SCENARIO_PRESETS: Dict[Scenario, ExperimentSpec] = {
    Scenario.LIGHTBAND_DELTA: _preset(
        Scenario.LIGHTBAND_DELTA, _LIGHTBAND_GRID, omega=1.0, R=7.0, T=2.0, tau=8.0
    ),
    Scenario.LIGHTBAND_EXTENDED: _preset(
        Scenario.LIGHTBAND_EXTENDED, _LIGHTBAND_GRID, omega=1.0, R=7.0, T=2.0, a=7.0, b=9.0
    ),
    Scenario.TIMELIKE: _preset(
        Scenario.TIMELIKE, _TIMELIKE_GRID, omega=1.0, R=7.0, T=2.0, tau=12.0
    ),
    Scenario.FIG3: _preset(
        Scenario.FIG3, EllGrid(1e-3, 1e-1, 20), omega=1.0, R=7.0, T=2.0, a=8.0, b=8.1
    ),
    Scenario.LOCAL_LIMIT: _preset(
        Scenario.LOCAL_LIMIT, _LIGHTBAND_GRID, omega=1.0, R=7.0, T=2.0, tau=8.0
    ),
    Scenario.TIMELIKE_SUPPRESSION: _preset(
        Scenario.TIMELIKE_SUPPRESSION, _TIMELIKE_GRID, omega=1.0, R=7.0, T=2.0, tau=12.0
    ),
    Scenario.DEGENERATE_RATIO: _preset(
        Scenario.DEGENERATE_RATIO, EllGrid(0.07, 0.07, 1), omega=1e-6, R=7.0, T=2.0, a=7.0, b=9.0
    ),
}


# Configuration matrices


def generate_configurations(matrix: dict) -> List[dict]:
    """
    Expands a configuration matrix into the cartesian product of its parameter lists, minus
    the combinations matched by any ``exclude`` rule.

    ::

        generate_configurations({
            "parameters": {"omega": [0.5, 1.0], "tau": [7.5, 8.0, 8.5]},
            "exclude": [{"omega": 0.5, "tau": 8.5}],
        })  # five configurations
    """
    if not isinstance(matrix, dict):
        raise TypeError(f"matrix must be a dict, got {type(matrix)}")
    if "parameters" not in matrix:
        raise ValueError("matrix must contain a 'parameters' key")

    parameters = matrix["parameters"]
    exclude = matrix.get("exclude", [])
    elements = itertools.product(*parameters.values())
    configs = [dict(zip(parameters.keys(), element)) for element in elements]
    return [
        config
        for config in configs
        if not any(all(config.get(k, _MISSING) == v for k, v in rule.items()) for rule in exclude)
    ]


_MISSING = object()


def _pair_from(config: Mapping[str, float]) -> DetectorPair:
    alice = Rect(0.0, config["T"])
    if "tau" in config:
        bob = Delta(config["tau"], config.get("kappa", 1.0))
    else:
        bob = Rect(config["a"], config["b"])
    return DetectorPair(config["omega"], config["R"], alice, bob, config.get("amp_product", 1.0))


def acceptance_grid() -> List[Tuple[DetectorPair, SpectralDensity]]:
    """
    Configurations on which closed forms and the quadrature oracle must agree: delta kicks in
    the lightband and timelike to it, and rectangular windows in the lightband, at
    ``ell / R`` from ``1e-3`` to ``1e-1``.
    """
    separation = 7.0
    ratios = [1e-3, 1e-2, 1e-1]
    matrices: Iterable[dict] = (
        {
            "parameters": {
                "omega": [0.5, 1.0], "R": [separation], "T": [2.0], "tau": [7.5, 8.5],
                "ell_ratio": ratios,
            },
        },
        {
            "parameters": {
                "omega": [1.0], "R": [separation], "T": [2.0], "tau": [9.5, 10.0],
                "ell_ratio": [5e-2, 1e-1],
            },
        },
        {
            "parameters": {
                "omega": [1.0, 2.0], "R": [separation], "T": [2.0], "a": [7.0, 8.0],
                "b": [8.1, 9.0], "ell_ratio": ratios,
            },
            "exclude": [{"omega": 2.0, "a": 7.0, "b": 8.1}],
        },
    )
    grid = []
    for matrix in matrices:
        for config in generate_configurations(matrix):
            density = SpectralDensity(config.pop("ell_ratio") * separation)
            grid.append((_pair_from(config), density))
    logger.debug("acceptance grid with %d configurations", len(grid))
    return grid
