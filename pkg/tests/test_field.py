"""
Contains tests for field.py.
"""
import math

import pytest

from nlsignal.field import (
    CommutatorDecomposition,
    SpacetimeInterval,
    SpectralDensity,
    interior_from_density,
    massive_pj_correction,
    nascent_delta_pairing,
    nonlocal_interior,
    rho,
)


class TestSpectralDensity:
    @pytest.mark.parametrize("ell,alpha", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (math.inf, 1.0)])
    def test_invalid(self, ell, alpha):
        with pytest.raises(ValueError):
            SpectralDensity(ell, alpha)

    def test_weight_and_width(self):
        sd = SpectralDensity(0.2, 4.0)
        assert sd.weight == 0.25
        assert sd.width_sq == pytest.approx(0.16)

    def test_regulated_constant_is_gaussian_family(self):
        sd = SpectralDensity.regulated_constant(0.1, 1e-4)
        assert sd.alpha == pytest.approx(1e-2)
        assert sd.width_sq == pytest.approx(1e-4)
        assert rho(3.0, sd) == pytest.approx(0.01 * math.exp(-3e-4))

    def test_with_ell_keeps_alpha(self):
        assert SpectralDensity(0.1, 2.0).with_ell(0.3) == SpectralDensity(0.3, 2.0)

    def test_rho_rejects_negative_mass(self):
        with pytest.raises(ValueError):
            rho(-1.0, SpectralDensity(0.1))


class TestKernels:
    @pytest.mark.parametrize("dt,dx,timelike", [(2.0, 1.0, True), (1.0, 2.0, False)])
    def test_interval(self, dt, dx, timelike):
        interval = SpacetimeInterval(dt, dx)
        assert interval.sigma == -dt**2 + dx**2
        assert interval.is_timelike is timelike
        assert interval.is_spacelike is not timelike
        assert not interval.is_lightlike

    @pytest.mark.parametrize("sigma", [0.0, 1e-9, 4.0])
    def test_no_interior_outside_cone(self, sigma):
        sd = SpectralDensity(0.3)
        assert nonlocal_interior(sigma, sd) == 0.0
        assert massive_pj_correction(sigma, 2.0) == 0.0

    def test_massless_limit_has_no_correction(self):
        assert massive_pj_correction(-1.0, 0.0) == 0.0

    def test_interior_value(self):
        sd = SpectralDensity(0.5)
        assert nonlocal_interior(-1.0, sd) == pytest.approx(
            -1 / (8 * math.pi * 0.25) * math.exp(-1.0), rel=1e-15
        )

    def test_interior_is_rescaled_unit_kernel(self):
        """alpha enters as an overall 1/alpha and a width alpha * ell**2."""
        ell, alpha, sigma = 0.3, 2.5, -0.4
        unit = SpectralDensity(math.sqrt(alpha) * ell)
        assert nonlocal_interior(sigma, SpectralDensity(ell, alpha)) == pytest.approx(
            nonlocal_interior(sigma, unit) / alpha, rel=1e-14
        )

    def test_cone_weight(self):
        assert CommutatorDecomposition(SpectralDensity(0.1, 4.0)).cone_weight == 1.25

    @pytest.mark.parametrize(
        "sigma,ell,alpha", [(-0.3, 0.5, 1.0), (-2.0, 0.4, 1.0), (-0.5, 0.3, 2.0)]
    )
    def test_closed_kernel_matches_density_integral(self, sigma, ell, alpha):
        """The closed interior kernel is the mass integral of the Gaussian density."""
        sd = SpectralDensity(ell, alpha)
        numeric = interior_from_density(sigma, lambda mu_sq: rho(mu_sq, sd))
        assert numeric.value == pytest.approx(nonlocal_interior(sigma, sd), rel=1e-8)

    def test_density_integral_vanishes_outside_cone(self):
        assert interior_from_density(1.0, lambda mu_sq: 1.0).value == 0.0


class TestNascentDelta:
    @pytest.mark.parametrize("ell", [1e-3, 1e-1, 1.0])
    def test_constant_pairs_to_cone_weight(self, ell):
        """The interior kernel carries weight -1/(2 pi alpha), cancelling the extra cone weight."""
        sd = SpectralDensity(ell, 2.0)
        pairing = nascent_delta_pairing(lambda sigma: 1.0, sd)
        decomposition = CommutatorDecomposition(sd)
        assert pairing == pytest.approx(-1 / (4 * math.pi), rel=1e-12)
        cancelled = (decomposition.cone_weight - 1) + 2 * math.pi * pairing
        assert cancelled == pytest.approx(0, abs=1e-12)

    @pytest.mark.parametrize("ell", [1e-3, 0.05, 0.5])
    def test_cosine_pairing(self, ell):
        """int cos(sigma) kernel = -1 / (2 pi (1 + 16 ell**4)) for alpha = 1."""
        sd = SpectralDensity(ell)
        assert nascent_delta_pairing(math.cos, sd) == pytest.approx(
            -1 / (2 * math.pi * (1 + 16 * ell**4)), rel=1e-10
        )

    def test_converges_to_delta(self):
        pairings = [
            nascent_delta_pairing(
                lambda s: math.exp(s) * (2 + math.sin(3 * s)), SpectralDensity(ell)
            )
            for ell in (1e-1, 1e-2, 1e-3)
        ]
        deviations = [abs(p + 2 / (2 * math.pi)) for p in pairings]
        assert deviations[0] > deviations[1] > deviations[2]
        assert deviations[2] < 1e-4
