"""
Special functions needed by the signaling closed forms: the complex error-function family and
Bessel functions of the first kind.

``erfcx(z) = exp(z**2) * erfc(z)`` is the primitive every closed form is written in. The
complex error functions are evaluated through the Faddeeva function ``w(z)`` as implemented in
``scipy.special`` (Taylor series near the origin, continued fraction / rational
approximation mid-range, asymptotic expansion for large ``|z|``). These wrappers add argument
validation, the overflow and precision checks the signaling code relies on, and a scalar
``complex`` interface.

All functions are pure and thread-safe.
"""
import logging
import warnings
from typing import Union

import numpy as np
from scipy import special

from nlsignal.exceptions import PrecisionWarning

logger = logging.getLogger(__name__)

ComplexValue = complex
Number = Union[complex, float, int]

# Beyond this modulus erfcx in the left half-plane is dominated by 2*exp(z**2) and the
# subtraction that produces it loses relative accuracy.
LEFT_HALF_PLANE_LIMIT: float = 10.0


def _as_complex(z: Number, name: str) -> complex:
    value = complex(z)
    if not (np.isfinite(value.real) and np.isfinite(value.imag)):
        raise ValueError(f"{name}: argument must be finite, got {value!r}")
    return value


def _checked(result: complex, name: str, z: complex) -> complex:
    result = complex(result)
    if not (np.isfinite(result.real) and np.isfinite(result.imag)):
        raise OverflowError(f"{name}({z!r}) is not representable in double precision")
    return result


def erf_complex(z: Number) -> ComplexValue:
    """
    Error function of a complex argument.

    :param z: finite complex argument.
    :returns: ``erf(z)``.
    :raise OverflowError: when ``|erf(z)|`` exceeds double precision (far along the
        imaginary axis, where ``erf`` grows like ``exp(-z**2)``).
    """
    z = _as_complex(z, "erf_complex")
    return _checked(special.erf(z), "erf_complex", z)


def erfc_complex(z: Number) -> ComplexValue:
    """Complementary error function ``1 - erf(z)`` of a complex argument."""
    z = _as_complex(z, "erfc_complex")
    return _checked(special.erfc(z), "erfc_complex", z)


def erfcx_complex(z: Number) -> ComplexValue:
    """
    Scaled complementary error function ``exp(z**2) * erfc(z)``.

    Accurate everywhere in the right half-plane, where it behaves like ``1/(z*sqrt(pi))`` for
    large ``|z|``. In the left half-plane it grows like ``2*exp(z**2)``; for
    ``|z| > LEFT_HALF_PLANE_LIMIT`` there a :class:`PrecisionWarning` is issued. Callers are
    expected to regroup their expressions so that ``Re(z) >= 0``.

    :param z: finite complex argument.
    :returns: ``erfcx(z)``.
    """
    z = _as_complex(z, "erfcx_complex")
    if z.real < 0 and abs(z) > LEFT_HALF_PLANE_LIMIT:
        warnings.warn(
            f"erfcx({z!r}) evaluated in the left half-plane with |z| > "
            f"{LEFT_HALF_PLANE_LIMIT}; relative accuracy is degraded",
            PrecisionWarning,
            stacklevel=2,
        )
    return _checked(special.erfcx(z), "erfcx_complex", z)


def erfi(z: Number) -> ComplexValue:
    """
    Imaginary error function ``erfi(z) = -i erf(iz)``. Real on the real axis.
    """
    z = _as_complex(z, "erfi")
    return _checked(special.erfi(z), "erfi", z)


def bessel_j0(x: float) -> float:
    """Bessel function of the first kind of order zero."""
    return float(special.j0(_non_negative(x)))


def bessel_j1(x: float) -> float:
    """
    Bessel function of the first kind of order one, ``J1(x) = x/2 - x**3/16 + ...``.

    :param x: non-negative real argument.
    """
    return float(special.j1(_non_negative(x)))


def bessel_j2(x: float) -> float:
    """Bessel function of the first kind of order two."""
    return float(special.jv(2, _non_negative(x)))


def _non_negative(x: float) -> float:
    x = float(x)
    if not np.isfinite(x) or x < 0:
        raise ValueError(f"Bessel argument must be finite and non-negative, got {x!r}")
    return x
