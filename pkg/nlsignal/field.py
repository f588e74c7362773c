"""
Field-theoretic kernels of the non-local massless scalar field.

The commutator of the non-local field splits into a cone-supported part, the massless
commutator with weight ``1 + 1/alpha``, and an interior part supported strictly inside the
lightcone (``sigma < 0``)::

    [phi(x), phi(y)] = (1 + 1/alpha) [phi(x), phi(y)]_0 + interior(sigma) Theta(-sigma)

with ``sigma = -dt**2 + dx**2``. For the Gaussian spectral density
``rho(mu**2) = ell**2 exp(-alpha ell**2 mu**2)`` the interior part integrates in closed form to

    interior(sigma) = -1 / (8 pi alpha**2 ell**2) * exp(sigma / (4 alpha ell**2)),

a nascent delta that converges weakly to ``-delta(sigma) / (2 pi alpha)`` as ``ell -> 0``, which
cancels the extra ``1/alpha`` cone weight. The massless cone part never appears as an object
here; the signaling module integrates it analytically.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable

from nlsignal import specfun
from nlsignal.kronrod import EvaluationBudget, QuadratureResult, integrate_adaptive

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectralDensity:
    """
    Gaussian spectral density ``rho(mu**2) = ell**2 exp(-alpha ell**2 mu**2)``.

    ``ell`` is the non-locality length scale and ``alpha`` an order-one coefficient.
    """

    ell: float
    alpha: float = 1.0

    def __post_init__(self):
        if not (self.ell > 0 and math.isfinite(self.ell)):
            raise ValueError(f"ell must be positive and finite, got {self.ell}")
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be positive and finite, got {self.alpha}")

    @classmethod
    def regulated_constant(cls, ell: float, epsilon: float) -> "SpectralDensity":
        """
        The constant density ``rho = ell**2`` regulated by ``exp(-epsilon mu**2)``, which is
        the Gaussian family with ``alpha = epsilon / ell**2``.
        """
        return cls(ell, epsilon / ell**2)

    @property
    def weight(self) -> float:
        """Total weight ``int rho d(mu**2) = 1/alpha``."""
        return 1.0 / self.alpha

    @property
    def width_sq(self) -> float:
        """Squared width ``alpha ell**2`` of the interior kernel."""
        return self.alpha * self.ell**2

    def with_ell(self, ell: float) -> "SpectralDensity":
        """Returns a density with the same ``alpha`` and a new scale."""
        return SpectralDensity(ell, self.alpha)


@dataclass(frozen=True)
class SpacetimeInterval:
    """Separation between two events; ``sigma < 0`` is timelike, ``sigma > 0`` spacelike."""

    dt: float
    dx: float

    @property
    def sigma(self) -> float:
        return -self.dt**2 + self.dx**2

    @property
    def is_timelike(self) -> bool:
        return self.sigma < 0

    @property
    def is_lightlike(self) -> bool:
        return self.sigma == 0

    @property
    def is_spacelike(self) -> bool:
        return self.sigma > 0


@dataclass(frozen=True)
class CommutatorDecomposition:
    """
    The commutator split into the cone weight multiplying the massless commutator and the
    interior kernel.
    """

    density: SpectralDensity

    @property
    def cone_weight(self) -> float:
        return 1.0 + self.density.weight

    def interior(self, sigma: float) -> float:
        return nonlocal_interior(sigma, self.density)


def rho(mu_sq: float, sd: SpectralDensity) -> float:
    """Spectral density ``ell**2 exp(-alpha ell**2 mu**2)``."""
    if mu_sq < 0:
        raise ValueError(f"mu_sq must be non-negative, got {mu_sq}")
    return sd.ell**2 * math.exp(-sd.width_sq * mu_sq)


def massive_pj_correction(sigma: float, mu: float) -> float:
    """
    Difference between the massive and the massless Pauli-Jordan functions,
    ``-(mu / (4 pi sqrt(-sigma))) J1(mu sqrt(-sigma))`` inside the cone, zero elsewhere.
    """
    if sigma >= 0 or mu == 0:
        return 0.0
    proper_time = math.sqrt(-sigma)
    return -mu / (4 * math.pi * proper_time) * specfun.bessel_j1(mu * proper_time)


def nonlocal_interior(sigma: float, sd: SpectralDensity) -> float:
    """
    Interior part of the non-local commutator, ``int rho(mu**2) massive_pj_correction d(mu**2)``,
    in closed form. Zero for ``sigma >= 0`` (the cone boundary itself is assigned zero).
    """
    if sigma >= 0:
        return 0.0
    width_sq = sd.width_sq
    return -sd.weight / (8 * math.pi * width_sq) * math.exp(sigma / (4 * width_sq))


def interior_from_density(
    sigma: float,
    density: Callable[[float], float],
    rel_tol: float = 1e-10,
    budget: EvaluationBudget = None,
) -> QuadratureResult:
    """
    Interior commutator of an arbitrary spectral density by direct quadrature over ``mu``::

        int_0^inf d(mu**2) rho(mu**2) massive_pj_correction(sigma, mu)

    The Bessel oscillation is integrated panel by panel between its zeros spacing
    ``pi / sqrt(-sigma)``; ``density`` must decay fast enough for the sum to converge.
    """
    if sigma >= 0:
        return QuadratureResult(0.0, 0.0, 0, 0.0)
    budget = budget or EvaluationBudget()
    proper_time = math.sqrt(-sigma)

    def integrand(mu: float) -> float:
        return 2 * mu * density(mu * mu) * massive_pj_correction(sigma, mu)

    period = math.pi / proper_time
    total = QuadratureResult(0.0, 0.0, 0, 0.0)
    lower = 0.0
    negligible = 0
    # Stop after two consecutive panels below the tolerance.
    while negligible < 2:
        panel = integrate_adaptive(integrand, lower, lower + period, rel_tol, budget=budget)
        total = total + panel
        lower += period
        small = abs(panel.value) <= rel_tol * abs(total.value) * 1e-2
        negligible = negligible + 1 if small and lower * proper_time > 10 else 0
    logger.debug("interior_from_density(sigma=%s): %.12e", sigma, total.value)
    return total


def nascent_delta_pairing(
    test_fn: Callable[[float], float],
    sd: SpectralDensity,
    rel_tol: float = 1e-12,
    budget: EvaluationBudget = None,
) -> float:
    """
    Pairs a test function with the interior kernel::

        int_{-inf}^0 test_fn(sigma) nonlocal_interior(sigma) d sigma

    which tends to ``-test_fn(0) / (2 pi alpha)`` as ``ell -> 0``. Integrated in the rescaled
    variable ``u = -sigma / (4 alpha ell**2)`` so the kernel becomes ``exp(-u)`` at every scale.

    :raise QuadratureNonConvergence: if the pairing integral does not converge.
    """
    width_sq = sd.width_sq

    def integrand(u: float) -> float:
        return test_fn(-4 * width_sq * u) * math.exp(-u)

    result = integrate_adaptive(integrand, 0.0, math.inf, rel_tol, abs_tol=1e-15, budget=budget)
    return -sd.weight / (2 * math.pi) * result.value
