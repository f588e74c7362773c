"""
Closed-form leading-order signaling ``S2`` between Alice's and Bob's detectors.

``S2`` splits as ``s2_total = (1 + 1/alpha) * s2_local + s2_ell``: the cone-supported part of
the non-local commutator reproduces the local signal with weight ``1 + 1/alpha`` and the
interior kernel contributes ``s2_ell``, which tends to ``-s2_local / alpha`` as ``ell -> 0``.
The normalization is that of the defining integral::

    S2 = 4 amp_product int dt2 chi_B(t2) int dt1 chi_A(t1) cos(W t1) cos(W t2) C(sigma)

with the massless commutator acting as ``delta(sigma) / (2 pi)``.

Every expression below is written so that the factor ``exp(R**2 / 4 ell**2)`` of the textbook
forms never appears on its own: each ``erfc`` is paired with it and rewritten through
``erfcx``, e.g.
``exp(R**2/4l**2 - l**2 W**2) erfc(R/2l + i l W) = exp(-i R W) erfcx(R/2l + i l W)``,
leaving only decaying Gaussians ``exp((R**2 - u**2) / 4 l**2)`` with ``u >= R``. The
derivations are written out in ``docs/closed_forms.rst``.

Closed forms exist for a delta-kicked Bob inside Alice's lightband or timelike to it, and for
a rectangular Bob window inside the lightband. Other configurations go through :mod:`quad`.
"""
import cmath
import logging
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from nlsignal.detectors import Delta, DetectorPair, Geometry, Rect, classify_geometry
from nlsignal.detectors import require_geometry
from nlsignal.exceptions import ConfigurationError, DivisionHazard, PrecisionWarning
from nlsignal.field import SpectralDensity
from nlsignal.specfun import erfcx_complex

logger = logging.getLogger(__name__)

SQRT_PI = math.sqrt(math.pi)
CANCELLATION_THRESHOLD: float = 1e-12
DIVISION_THRESHOLD: float = 1e-12


class ScaledValue(NamedTuple):
    """``mantissa * exp(log_scale)``; keeps exponentially small signals representable."""

    mantissa: float
    log_scale: float

    @property
    def value(self) -> float:
        return self.mantissa * math.exp(self.log_scale)

    @property
    def log_abs(self) -> float:
        if self.mantissa == 0:
            return -math.inf
        return math.log(abs(self.mantissa)) + self.log_scale


@dataclass(frozen=True)
class SignalingBreakdown:
    """
    Local and non-local parts of ``S2`` at one configuration.

    ``log_abs_correction`` is ``log|s2_total - s2_local|`` evaluated from the scaled form, so it
    stays finite where the correction itself underflows (deep in the timelike region).
    """

    s2_local: float
    s2_ell: float
    s2_total: float
    leading_correction: Optional[float]
    log_abs_correction: float

    @property
    def correction(self) -> float:
        return self.s2_total - self.s2_local


def _unit_scale(sd: SpectralDensity) -> float:
    # Gaussian densities with alpha != 1 are rescaled copies of the alpha = 1 kernel:
    # s2_ell(ell, alpha) = s2_ell(sqrt(alpha) ell, 1) / alpha.
    return math.sqrt(sd.alpha) * sd.ell


def _z(u: float, ell: float, omega: float) -> complex:
    return complex(u / (2 * ell), ell * omega)


# Delta-kicked Bob


def _delta_window(pair: DetectorPair, ell: float) -> ScaledValue:
    """
    ``s2_ell`` (alpha = 1) of a delta-kicked Bob, integrating Alice's times ``t1 = tau - u``
    over ``u`` in ``[max(R, tau - end), tau - start]``.
    """
    bob = pair.bob
    assert isinstance(bob, Delta)
    tau, distance, omega = bob.at, pair.separation, pair.omega
    near = max(distance, tau - pair.alice.end)
    far = tau - pair.alice.start

    log_scale = (distance**2 - near**2) / (4 * ell**2)
    first = cmath.exp(1j * omega * (tau - near)) * erfcx_complex(_z(near, ell, omega))
    second = (
        math.exp((near**2 - far**2) / (4 * ell**2))
        * cmath.exp(1j * omega * (tau - far))
        * erfcx_complex(_z(far, ell, omega))
    )
    bracket = (first - second).real
    if abs(bracket) < CANCELLATION_THRESHOLD * max(abs(first), abs(second)):
        warnings.warn(
            f"paired erfcx terms cancel to {abs(bracket):.1e} at tau={tau}, ell={ell}",
            PrecisionWarning,
            stacklevel=3,
        )
    prefactor = -pair.kappa * pair.amp_product * math.cos(omega * tau) / (2 * SQRT_PI * ell)
    return ScaledValue(prefactor * bracket, log_scale)


def s2_local_lightband_delta(pair: DetectorPair) -> float:
    """
    Local signal to a delta-kicked Bob in Alice's lightband,
    ``kappa amp cos(W tau) cos(W (tau - R)) / (pi R)``.
    """
    require_geometry(pair, Geometry.LIGHTBAND, "s2_local_lightband_delta")
    _require_delta(pair)
    tau, distance, omega = pair.bob.at, pair.separation, pair.omega  # type: ignore[union-attr]
    return (
        pair.kappa
        * pair.amp_product
        * math.cos(omega * tau)
        * math.cos(omega * (tau - distance))
        / (math.pi * distance)
    )


def s2_ell_lightband_delta(pair: DetectorPair, sd: SpectralDensity) -> float:
    """Interior-kernel signal to a delta-kicked Bob in Alice's lightband."""
    require_geometry(pair, Geometry.LIGHTBAND, "s2_ell_lightband_delta")
    _require_delta(pair)
    return sd.weight * _delta_window(pair, _unit_scale(sd)).value


def leading_correction_lightband_delta(pair: DetectorPair, sd: SpectralDensity) -> float:
    """
    Order ``ell**2`` term of ``s2_total - s2_local`` for a delta-kicked Bob::

        kappa amp ell**2 / (pi R**3) [R W (sin(W R) + sin(W R - 2 W tau))
                                      + cos(W R) + cos(W R - 2 W tau)]
    """
    require_geometry(pair, Geometry.LIGHTBAND, "leading_correction_lightband_delta")
    _require_delta(pair)
    tau, distance, omega = pair.bob.at, pair.separation, pair.omega  # type: ignore[union-attr]
    phase = omega * distance - 2 * omega * tau
    bracket = (
        distance * omega * (math.sin(omega * distance) + math.sin(phase))
        + math.cos(omega * distance)
        + math.cos(phase)
    )
    return pair.kappa * pair.amp_product * sd.ell**2 / (math.pi * distance**3) * bracket


def s2_ell_timelike_delta(pair: DetectorPair, sd: SpectralDensity) -> float:
    """
    Signal to a delta-kicked Bob purely timelike to Alice (``tau > R + T``). The local signal
    vanishes here, so this is the whole of ``S2``; it is suppressed like
    ``exp(-((tau - T)**2 - R**2) / (4 alpha ell**2))`` and underflows to zero deep in the
    timelike region. Use :func:`timelike_delta_scaled` for its logarithm.
    """
    return timelike_delta_scaled(pair, sd).value


def timelike_delta_scaled(pair: DetectorPair, sd: SpectralDensity) -> ScaledValue:
    """:func:`s2_ell_timelike_delta` as ``mantissa * exp(log_scale)``."""
    require_geometry(pair, Geometry.TIMELIKE, "s2_ell_timelike_delta")
    _require_delta(pair)
    scaled = _delta_window(pair, _unit_scale(sd))
    return ScaledValue(sd.weight * scaled.mantissa, scaled.log_scale)


# Rectangular Bob window


def _cos_product_integral(omega: float, lower: float, upper: float) -> complex:
    """``int_lower^upper cos(W t) exp(i W t) dt``, finite as ``W -> 0``."""
    width = upper - lower
    oscillation = cmath.exp(1j * omega * (lower + upper)) * np.sinc(omega * width / math.pi)
    return width / 2 * (1 + oscillation)


def _imag_erfcx_over_omega(z: complex, ell: float, omega: float) -> float:
    # Im erfcx(x + i ell W) / W, with its W -> 0 limit ell * erfcx'(x).
    if omega == 0:
        x = z.real
        return ell * (2 * x * erfcx_complex(x).real - 2 / SQRT_PI)
    return erfcx_complex(z).imag / omega


def _window_antiderivative(t: float, distance: float, ell: float, omega: float) -> complex:
    """
    Antiderivative in Bob's time of ``cos(W t) exp((R**2 - t**2) / 4 l**2) erfcx(t/2l + i l W)``,
    in scaled form (zero contribution from ``t`` far beyond ``R`` on the scale ``l**2 / R``).
    """
    decay = (distance**2 - t**2) / (4 * ell**2)
    if decay < -745:
        return 0j
    z = _z(t, ell, omega)
    oscillating = cmath.exp(1j * omega * t) * _imag_erfcx_over_omega(z, ell, omega)
    smooth = 2 * ell * cmath.exp(-1j * omega * t) * (z * erfcx_complex(z) - 1 / SQRT_PI)
    return 0.5 * math.exp(decay) * (oscillating + smooth)


def _extended_window(pair: DetectorPair, ell: float) -> float:
    """``s2_ell`` (alpha = 1) of a rectangular Bob window inside Alice's lightband."""
    bob = pair.bob
    assert isinstance(bob, Rect)
    distance, omega = pair.separation, pair.omega
    first, last = bob.start, bob.end

    cone = (
        erfcx_complex(_z(distance, ell, omega))
        * cmath.exp(-1j * omega * distance)
        * _cos_product_integral(omega, first, last)
    ).real
    edges = (
        _window_antiderivative(last, distance, ell, omega)
        - _window_antiderivative(first, distance, ell, omega)
    ).real
    return -pair.amp_product / (2 * SQRT_PI * ell) * (cone - edges)


def s2_local_lightband_extended(pair: DetectorPair) -> float:
    """
    Local signal to a rectangular Bob window ``[a, b]`` inside Alice's lightband::

        amp / (pi R) int_a^b cos(W t) cos(W (t - R)) dt
    """
    require_geometry(pair, Geometry.LIGHTBAND, "s2_local_lightband_extended")
    _require_rect(pair)
    first, last = pair.bob.support
    overlap = (
        cmath.exp(-1j * pair.omega * pair.separation)
        * _cos_product_integral(pair.omega, first, last)
    ).real
    return pair.amp_product * overlap / (math.pi * pair.separation)


def s2_ell_lightband_extended(pair: DetectorPair, sd: SpectralDensity) -> float:
    """Interior-kernel signal to a rectangular Bob window inside Alice's lightband."""
    require_geometry(pair, Geometry.LIGHTBAND, "s2_ell_lightband_extended")
    _require_rect(pair)
    return sd.weight * _extended_window(pair, _unit_scale(sd))


def leading_correction_lightband_extended(pair: DetectorPair, sd: SpectralDensity) -> float:
    """
    Order ``ell**2`` term of ``s2_total - s2_local`` for Bob listening over the whole lightband,
    ``[a, b] = [R, R + T]``::

        amp ell**2 [2 W**2 R T sin(W R) + sin(W (R + 2T)) + W (3R + 2T) cos(W R)
                    + W R cos(W (R + 2T)) - sin(W R)] / (2 pi W R**3)

    which tends to ``2 amp ell**2 (R + T) / (pi R**3)`` for degenerate detectors.
    """
    require_geometry(pair, Geometry.LIGHTBAND, "leading_correction_lightband_extended")
    _require_rect(pair)
    distance, omega = pair.separation, pair.omega
    duration = pair.alice.duration
    first, last = pair.bob.support
    if pair.alice.start != 0 or first != distance or last != distance + duration:
        raise ConfigurationError(
            f"needs Bob's window to be exactly [R, R + T] = [{distance}, {distance + duration}]"
            f" with Alice on [0, T], got {pair.bob.support}",
            "bob",
        )
    prefactor = pair.amp_product * sd.ell**2
    if omega == 0:
        return prefactor * 2 * (distance + duration) / (math.pi * distance**3)
    outer = omega * (distance + 2 * duration)
    bracket = (
        2 * omega**2 * distance * duration * math.sin(omega * distance)
        + math.sin(outer)
        + omega * (3 * distance + 2 * duration) * math.cos(omega * distance)
        + omega * distance * math.cos(outer)
        - math.sin(omega * distance)
    )
    return prefactor * bracket / (2 * math.pi * omega * distance**3)


# Assembled results


def breakdown(pair: DetectorPair, sd: SpectralDensity) -> SignalingBreakdown:
    """
    Evaluates the local and non-local parts of ``S2`` with the closed form matching the
    configuration.

    :raise ConfigurationError: for geometries without a closed form (spacelike configurations,
        windows straddling a lightband boundary, rectangular Bob windows timelike to Alice).
    """
    geometry = classify_geometry(pair)
    if geometry is Geometry.LIGHTBAND:
        if isinstance(pair.bob, Delta):
            local = s2_local_lightband_delta(pair)
            ell_part = s2_ell_lightband_delta(pair, sd)
            leading: Optional[float] = leading_correction_lightband_delta(pair, sd)
        else:
            local = s2_local_lightband_extended(pair)
            ell_part = s2_ell_lightband_extended(pair, sd)
            leading = _optional_extended_leading(pair, sd)
        correction = sd.weight * local + ell_part
        log_abs = math.log(abs(correction)) if correction != 0 else -math.inf
    elif geometry is Geometry.TIMELIKE and isinstance(pair.bob, Delta):
        local, leading = 0.0, None
        scaled = timelike_delta_scaled(pair, sd)
        ell_part = correction = scaled.value
        log_abs = scaled.log_abs
    else:
        raise ConfigurationError(
            f"no closed form for a {geometry.value} configuration with "
            f"{type(pair.bob).__name__} switching; use the quadrature oracle",
            "bob",
        )

    total = local + correction
    logger.debug(
        "breakdown(ell=%s, alpha=%s): local=%.17e ell=%.17e total=%.17e",
        sd.ell, sd.alpha, local, ell_part, total,
    )
    return SignalingBreakdown(local, ell_part, total, leading, log_abs)


def _optional_extended_leading(pair: DetectorPair, sd: SpectralDensity) -> Optional[float]:
    distance, duration = pair.separation, pair.alice.duration
    if pair.bob.support == (distance, distance + duration) and pair.alice.start == 0:
        return leading_correction_lightband_extended(pair, sd)
    return None


def signal(pair: DetectorPair, sd: SpectralDensity) -> float:
    """Signaling term ``S = lambda_A lambda_B S2`` including the couplings."""
    coupling_a, coupling_b = pair.couplings
    return coupling_a * coupling_b * breakdown(pair, sd).s2_total


def ratio_nonlocal(pair: DetectorPair, sd: SpectralDensity) -> float:
    """
    Relative non-local modification ``(s2_total - s2_local) / s2_local`` for a rectangular Bob
    window inside Alice's lightband.

    :raise DivisionHazard: near a zero of the (oscillating) local signal.
    """
    require_geometry(pair, Geometry.LIGHTBAND, "ratio_nonlocal")
    _require_rect(pair)
    local = s2_local_lightband_extended(pair)
    if abs(local) < DIVISION_THRESHOLD:
        raise DivisionHazard(local, DIVISION_THRESHOLD)
    return (sd.weight * local + s2_ell_lightband_extended(pair, sd)) / local


def degenerate_ratio(ell: float, separation: float, duration: float) -> float:
    """
    Leading-order ratio for degenerate detectors (``W = 0``) listening over the whole
    lightband: ``2 (ell/R)**2 (R + T) / T``.
    """
    return 2 * (ell / separation) ** 2 * (separation + duration) / duration


def _require_delta(pair: DetectorPair) -> None:
    if not isinstance(pair.bob, Delta):
        raise ConfigurationError("needs a delta-switched Bob", "bob")


def _require_rect(pair: DetectorPair) -> None:
    if not isinstance(pair.bob, Rect):
        raise ConfigurationError("needs a rectangular Bob window", "bob")
    if pair.alice.start != 0:
        raise ConfigurationError(
            "closed forms for extended switching take Alice on [0, T]; use the quadrature oracle",
            "alice",
        )
