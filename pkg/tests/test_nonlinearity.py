import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cqgpe import (
    DensityArgs,
    Grid1D,
    InvalidRegionError,
    ModelKind,
    NonlinearModel,
    Wavefunction1D,
    energy_1d,
    matched_g3,
    mean_field_multiplier,
    nonlinear_energy_density,
    np_cubic,
    np_general,
    np_general_cardano,
    np_poly,
    solve_width,
)
from oracles import bisect_width, bracket_multiplier

coupling_floats = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)

# bisection oracle root at (1, 1), shared with test_width
S_AT_1_1 = 1.672487836616587
# bracket multiplier evaluated at the oracle root
NP_AT_1_1 = 2.090609795770734


class TestNpGeneral:
    def test_zero_coupling_is_transverse_ground_energy(self):
        assert np_general(DensityArgs(0.0, 0.0)) == pytest.approx(1.0, abs=1e-14)

    def test_cubic_point(self):
        assert np_general(DensityArgs(1.0, 0.0)) == pytest.approx(2.5 / np.sqrt(2.0), rel=1e-12)

    def test_cubic_quintic_point(self):
        assert np_general(DensityArgs(1.0, 1.0)) == pytest.approx(NP_AT_1_1, rel=1e-9)
        assert bracket_multiplier(S_AT_1_1, 1.0, 1.0) == pytest.approx(NP_AT_1_1, rel=1e-12)

    def test_invalid_region_raises(self):
        with pytest.raises(InvalidRegionError):
            np_general(DensityArgs(-1.5, 0.0))

    @given(coupling_floats, coupling_floats)
    @settings(max_examples=300)
    def test_closed_form_matches_bracket(self, a3, a5):
        args = DensityArgs(a3, a5)
        root = bisect_width(a3, a5)
        if root is None:
            with pytest.raises(InvalidRegionError):
                np_general_cardano(args)
            return
        if root < 1e-3:
            # multiplier diverges as s -> 0+ along the collapse boundary;
            # route comparison is vacuous in that sliver
            return
        assert np_general_cardano(args) == pytest.approx(np_general(args), abs=1e-10, rel=1e-10)

    def test_cubic_reduction(self):
        for a3 in np.linspace(-0.89, 10.0, 61):
            assert abs(np_general(DensityArgs(float(a3), 0.0)) - np_cubic(float(a3))) <= 1e-10

    def test_weak_coupling_reduction_second_order(self):
        errors = []
        for eps in (0.1, 0.05, 0.025, 0.0125):
            args = DensityArgs(eps, eps)
            errors.append(abs(np_general(args) - np_poly(args)))
        for coarse, fine in zip(errors, errors[1:]):
            assert 3.3 <= coarse / fine <= 4.7


class TestNpCubic:
    def test_values(self):
        assert np_cubic(0.0) == 1.0
        assert np_cubic(1.0) == pytest.approx(2.5 / np.sqrt(2.0), rel=1e-14)
        assert np_cubic(3.0) == pytest.approx(2.75, rel=1e-14)

    def test_collapse(self):
        with pytest.raises(InvalidRegionError):
            np_cubic(-1.0)


class TestNpPoly:
    def test_values(self):
        assert np_poly(DensityArgs(0.0, 0.0)) == 1.0
        assert np_poly(DensityArgs(1.0, 1.0)) == 3.0
        assert np_poly(DensityArgs(0.1, 0.1)) == pytest.approx(1.2)


class TestMatchedG3:
    def test_values(self):
        assert matched_g3(1.0, 0.0) == 0.0
        assert matched_g3(1.0, 0.3) == pytest.approx(-0.4)
        assert matched_g3(-0.75, 1.0) == pytest.approx(1.0)

    def test_rejects_negative_density(self):
        with pytest.raises(ValueError):
            matched_g3(1.0, -0.1)


class TestVariationalConsistency:
    @given(coupling_floats.filter(lambda v: v >= 0), coupling_floats.filter(lambda v: v >= 0))
    @settings(max_examples=100)
    def test_width_is_stationary_point_of_energy_density(self, a3, a5):
        # e_nl(s) per unit density: (1/(2s) + s/2) + a3/(2s) + a5/(3s^2)
        def e_nl(s):
            return 0.5 / s + 0.5 * s + 0.5 * a3 / s + a5 / (3.0 * s * s)

        s = solve_width(DensityArgs(a3, a5)).s
        step = 1e-6
        derivative = (e_nl(s + step) - e_nl(s - step)) / (2.0 * step)
        assert abs(derivative) < 1e-6


class TestMultiplierDispatch:
    def test_models_agree_at_zero_coupling(self):
        rho = np.linspace(0.0, 0.5, 11)
        for kind in ModelKind:
            model = NonlinearModel(kind)
            assert np.allclose(mean_field_multiplier(model, rho), 1.0)

    def test_np_vs_npse_cubic_identity(self):
        rho = np.linspace(0.0, 2.0, 41)
        general = mean_field_multiplier(NonlinearModel(ModelKind.NP_GENERAL, g3=0.7), rho)
        cubic = mean_field_multiplier(NonlinearModel(ModelKind.NPSE_CUBIC, g3=0.7), rho)
        assert np.max(np.abs(general - cubic)) <= 1e-10

    def test_npse_requires_zero_quintic(self):
        with pytest.raises(ValueError):
            NonlinearModel(ModelKind.NPSE_CUBIC, g3=1.0, g5=0.5)

    def test_error_reports_location(self):
        model = NonlinearModel(ModelKind.NP_GENERAL, g3=-30.0)
        rho = np.array([0.0, 0.05, 0.2])
        # a3 = -1.5 at the second point is the first invalid location
        with pytest.raises(InvalidRegionError, match="x = 3"):
            mean_field_multiplier(model, rho, positions=np.array([2.0, 3.0, 4.0]))


class TestEnergy1D:
    def grid(self, n=1024, half_width=10.0):
        return Grid1D(half_width, n)

    def unit_gaussian(self, grid):
        return Wavefunction1D(grid, np.pi**-0.25 * np.exp(-0.5 * grid.nodes**2))

    def test_free_gaussian_energy(self):
        grid = self.grid()
        phi = self.unit_gaussian(grid)
        model = NonlinearModel(ModelKind.NP_GENERAL)
        # kinetic 1/4 plus unit transverse offset
        assert energy_1d(phi, model, 0.0) == pytest.approx(1.25, abs=1e-4)

    def test_harmonic_ground_state_energy(self):
        lam = 0.1
        grid = Grid1D(25.0, 2048)
        values = (lam / np.pi) ** 0.25 * np.exp(-0.5 * lam * grid.nodes**2)
        phi = Wavefunction1D(grid, values)
        for kind in ModelKind:
            assert energy_1d(phi, NonlinearModel(kind), lam) == pytest.approx(1.05, abs=1e-4)

    def test_phase_invariance(self):
        grid = self.grid(n=256)
        base = self.unit_gaussian(grid)
        rotated = Wavefunction1D(grid, base.values * np.exp(1.3j))
        model = NonlinearModel(ModelKind.NP_GENERAL, g3=0.8, g5=0.4)
        assert energy_1d(rotated, model, 0.2) == pytest.approx(energy_1d(base, model, 0.2), rel=1e-12)

    def test_polynomial_energy_density_closed_form(self):
        rho = np.linspace(0.0, 1.0, 9)
        model = NonlinearModel(ModelKind.CQ_POLYNOMIAL, g3=2.0, g5=3.0)
        expected = rho + rho**2 + rho**3
        assert np.allclose(nonlinear_energy_density(model, rho), expected)

    def test_nonpolynomial_energy_density_at_origin_matches_poly(self):
        # at zero density every model's energy density vanishes
        for kind in ModelKind:
            model = NonlinearModel(kind, g3=1.0, g5=0.0 if kind is ModelKind.NPSE_CUBIC else 1.0)
            assert nonlinear_energy_density(model, np.zeros(4)) == pytest.approx(0.0)

    def test_invalid_region_raises_with_location(self):
        grid = self.grid(n=256)
        phi = self.unit_gaussian(grid)
        model = NonlinearModel(ModelKind.NP_GENERAL, g3=-10.0)
        with pytest.raises(InvalidRegionError):
            energy_1d(phi, model, 0.0)
