"""
nlsignal evaluates the leading-order signal between two Unruh-DeWitt detectors coupled to a
non-local massless scalar field, in closed form and by an independent quadrature oracle.
"""

from nlsignal.analysis import (
    ExpInvSq,
    PowerLaw,
    ScalingFit,
    Suppression,
    SuppressionKind,
    SweepPoint,
    classify_suppression,
    fit_exp_inv_sq,
    fit_power_law,
    sweep,
    tau_sweep,
)
from nlsignal.caching import FileSystemOracleCache, MemoryOracleCache, OracleCache, cached
from nlsignal.configurations import (
    SCENARIO_PRESETS,
    EllGrid,
    ExperimentSpec,
    Scenario,
    generate_configurations,
)
from nlsignal.detectors import (
    Delta,
    DetectorPair,
    Geometry,
    Rect,
    classify_geometry,
    extended,
    lightband_delta,
)
from nlsignal.exceptions import (
    ConfigurationError,
    DegenerateGridError,
    DivisionHazard,
    OracleMismatch,
    PrecisionWarning,
    QuadratureNonConvergence,
    SignChangeError,
    SpecValidationError,
    SweepFailure,
)
from nlsignal.field import (
    SpacetimeInterval,
    SpectralDensity,
    interior_from_density,
    nascent_delta_pairing,
    nonlocal_interior,
    rho,
)
from nlsignal.kronrod import EvaluationBudget, QuadratureResult
from nlsignal.parallel import TaskManager, delayed
from nlsignal.quad import (
    extrapolate_constant_density,
    integrate_s2_local,
    integrate_s2_nonlocal,
    integrate_s2_total,
)
from nlsignal.runner import run
from nlsignal.signaling import (
    SignalingBreakdown,
    breakdown,
    degenerate_ratio,
    leading_correction_lightband_delta,
    leading_correction_lightband_extended,
    ratio_nonlocal,
    s2_ell_lightband_delta,
    s2_ell_lightband_extended,
    s2_ell_timelike_delta,
    s2_local_lightband_delta,
    s2_local_lightband_extended,
    signal,
)

__all__ = [
    "ExpInvSq",
    "PowerLaw",
    "ScalingFit",
    "Suppression",
    "SuppressionKind",
    "SweepPoint",
    "classify_suppression",
    "fit_exp_inv_sq",
    "fit_power_law",
    "sweep",
    "tau_sweep",
    "FileSystemOracleCache",
    "MemoryOracleCache",
    "OracleCache",
    "cached",
    "SCENARIO_PRESETS",
    "EllGrid",
    "ExperimentSpec",
    "Scenario",
    "generate_configurations",
    "Delta",
    "DetectorPair",
    "Geometry",
    "Rect",
    "classify_geometry",
    "extended",
    "lightband_delta",
    "ConfigurationError",
    "DegenerateGridError",
    "DivisionHazard",
    "OracleMismatch",
    "PrecisionWarning",
    "QuadratureNonConvergence",
    "SignChangeError",
    "SpecValidationError",
    "SweepFailure",
    "SpacetimeInterval",
    "SpectralDensity",
    "interior_from_density",
    "nascent_delta_pairing",
    "nonlocal_interior",
    "rho",
    "EvaluationBudget",
    "QuadratureResult",
    "TaskManager",
    "delayed",
    "extrapolate_constant_density",
    "integrate_s2_local",
    "integrate_s2_nonlocal",
    "integrate_s2_total",
    "run",
    "SignalingBreakdown",
    "breakdown",
    "degenerate_ratio",
    "leading_correction_lightband_delta",
    "leading_correction_lightband_extended",
    "ratio_nonlocal",
    "s2_ell_lightband_delta",
    "s2_ell_lightband_extended",
    "s2_ell_timelike_delta",
    "s2_local_lightband_delta",
    "s2_local_lightband_extended",
    "signal",
]

__version__ = "0.3.0"
