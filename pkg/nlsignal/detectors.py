"""
Detector configurations: switching profiles, the Alice/Bob pair, and the causal geometry of
Bob's coupling window relative to Alice's.

Alice is the sender and Bob the receiver. Both are at rest, a distance ``separation`` apart,
with a shared energy gap ``omega``. All quantities are dimensional (units with c = 1).
"""
import enum
import math
from dataclasses import dataclass, field
from typing import Tuple, Union

from nlsignal.exceptions import ConfigurationError


@dataclass(frozen=True)
class Delta:
    """Instantaneous kick at time ``at`` with strength ``kick_strength`` (a length)."""

    at: float
    kick_strength: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.at):
            raise ConfigurationError(f"must be finite, got {self.at}", "at")
        if not self.kick_strength > 0:
            raise ConfigurationError(
                f"must be positive, got {self.kick_strength}", "kick_strength"
            )

    @property
    def support(self) -> Tuple[float, float]:
        return (self.at, self.at)


@dataclass(frozen=True)
class Rect:
    """Sudden switching on at ``start`` and off at ``end``."""

    start: float
    end: float

    def __post_init__(self):
        if not (math.isfinite(self.start) and math.isfinite(self.end)):
            raise ConfigurationError("window bounds must be finite", "start/end")
        if not self.start < self.end:
            raise ConfigurationError(
                f"start ({self.start}) must be before end ({self.end})", "start/end"
            )

    @property
    def support(self) -> Tuple[float, float]:
        return (self.start, self.end)

    @property
    def duration(self) -> float:
        return self.end - self.start


SwitchingProfile = Union[Delta, Rect]


class Geometry(enum.Enum):
    """Causal relation of Bob's whole coupling window to Alice's."""

    SPACELIKE = "spacelike"
    LIGHTBAND = "lightband"
    TIMELIKE = "timelike"
    MIXED = "mixed"


@dataclass(frozen=True)
class DetectorPair:  # pylint: disable=too-many-instance-attributes
    """
    Alice's and Bob's detectors.

    ``amp_product`` is the real product of the initial-state amplitudes
    ``alpha_A beta_A alpha_B beta_B``; ``couplings`` are ``(lambda_A, lambda_B)``.
    Bob's window must start after Alice's has closed.
    """

    omega: float
    separation: float
    alice: Rect
    bob: SwitchingProfile
    amp_product: float = 1.0
    couplings: Tuple[float, float] = field(default=(1.0, 1.0))

    def __post_init__(self):
        if not self.separation > 0:
            raise ConfigurationError(f"must be positive, got {self.separation}", "separation")
        if not math.isfinite(self.omega):
            raise ConfigurationError(f"must be finite, got {self.omega}", "omega")
        if not isinstance(self.alice, Rect):
            raise ConfigurationError("Alice must use a Rect switching profile", "alice")
        if not self.bob.support[0] > self.alice.end:
            raise ConfigurationError(
                f"Bob's window {self.bob.support} must start after Alice's "
                f"{self.alice.support} has closed",
                "bob",
            )

    @property
    def kappa(self) -> float:
        """Bob's kick strength; 1 for extended switching."""
        return self.bob.kick_strength if isinstance(self.bob, Delta) else 1.0

    @property
    def geometry(self) -> Geometry:
        return classify_geometry(self)

    def replace(self, **changes) -> "DetectorPair":
        """Returns a copy with the given fields replaced."""
        values = {
            "omega": self.omega,
            "separation": self.separation,
            "alice": self.alice,
            "bob": self.bob,
            "amp_product": self.amp_product,
            "couplings": self.couplings,
        }
        values.update(changes)
        return DetectorPair(**values)


def classify_geometry(pair: DetectorPair) -> Geometry:
    """
    Classifies Bob's window against Alice's lightband ``[start + R, end + R]``.

    A delta-switched Bob sitting exactly on a lightband boundary is ``MIXED``: the lightband
    formulas need ``R < tau < R + T`` strictly.
    """
    first, last = pair.bob.support
    start, end = pair.alice.support
    distance = pair.separation
    if last - start <= distance:
        return Geometry.SPACELIKE
    if first - end > distance:
        return Geometry.TIMELIKE
    inside = first >= start + distance and last <= end + distance
    if isinstance(pair.bob, Delta):
        inside = start + distance < first < end + distance
    return Geometry.LIGHTBAND if inside else Geometry.MIXED


def require_geometry(pair: DetectorPair, expected: Geometry, operation: str) -> None:
    """Raises :class:`ConfigurationError` unless ``pair`` has the expected geometry."""
    actual = classify_geometry(pair)
    if actual is not expected:
        raise ConfigurationError(
            f"{operation} needs a {expected.value} configuration, got {actual.value} "
            f"(R={pair.separation}, Alice {pair.alice.support}, Bob {pair.bob.support})",
            "bob",
        )


def lightband_delta(  # pylint: disable=too-many-arguments
    omega: float,
    separation: float,
    duration: float,
    tau: float,
    kappa: float = 1.0,
    amp_product: float = 1.0,
) -> DetectorPair:
    """Alice on ``[0, T]``, Bob kicked at ``tau``."""
    return DetectorPair(omega, separation, Rect(0.0, duration), Delta(tau, kappa), amp_product)


def extended(  # pylint: disable=too-many-arguments
    omega: float,
    separation: float,
    duration: float,
    start: float,
    end: float,
    amp_product: float = 1.0,
) -> DetectorPair:
    """Alice on ``[0, T]``, Bob on ``[start, end]``."""
    return DetectorPair(omega, separation, Rect(0.0, duration), Rect(start, end), amp_product)
