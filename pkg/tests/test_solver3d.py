import numpy as np
import pytest

from cqgpe import (
    CouplingParams,
    Grid1D,
    Grid3D,
    ModelKind,
    NonlinearModel,
    SolverConfig3D,
    TimeMode,
    Wavefunction3D,
    chemical_potential_3d,
    energy_3d,
    gaussian_ansatz_3d,
    ground_state_3d,
    norm_sq,
    normalize,
    project_axial,
    step_3d,
    transverse_width_profile,
)

LAM = 0.1


def small_grid(nx=65, lx=12.0, nt=25, lt=6.0) -> Grid3D:
    return Grid3D(Grid1D(lx, nx), lt, nt)


def axial_gaussian(grid: Grid3D, lam=LAM) -> np.ndarray:
    return np.exp(-0.5 * lam * grid.axial.nodes**2)


@pytest.fixture(scope="module")
def small_ground_state():
    grid = small_grid()
    config = SolverConfig3D(grid=grid, couplings=CouplingParams(1.0, 1.0, LAM), mu_tol=1e-9)
    return config, ground_state_3d(config)


class TestTransverseGaussianQuadrature:
    def test_moment_integrals(self):
        # unit-width transverse Gaussian probe of the nonlinear coefficients:
        # integral of |G|^4 = 1/(2 pi), integral of |G|^6 = 1/(3 pi^2)
        grid = Grid3D(Grid1D(10.0, 65), 8.0, 65)
        t = grid.transverse.nodes
        g = np.exp(-0.5 * (t[:, None] ** 2 + t[None, :] ** 2)) / np.sqrt(np.pi)
        h2 = grid.transverse.spacing**2
        assert np.sum(g**2) * h2 == pytest.approx(1.0, abs=1e-6)
        assert np.sum(g**4) * h2 == pytest.approx(1.0 / (2.0 * np.pi), abs=1e-6)
        assert np.sum(g**6) * h2 == pytest.approx(1.0 / (3.0 * np.pi**2), abs=1e-6)


class TestStep3D:
    def test_real_time_norm_conserved(self):
        grid = small_grid(nx=33, lx=8.0, nt=17)
        config = SolverConfig3D(grid=grid, couplings=CouplingParams(1.0, 0.5, LAM))
        psi = normalize(gaussian_ansatz_3d(grid, 1.0, axial_gaussian(grid)))
        for _ in range(10):
            psi = step_3d(psi, config, TimeMode.REAL)
            assert norm_sq(psi) == pytest.approx(1.0, abs=1e-10)

    def test_imaginary_flow_fixes_transverse_marginal(self):
        # with g = 0 the flow is separable and the transverse factor relaxes
        # to the discrete transverse ground state (gap 2): once settled, the
        # transverse marginal must stop moving
        grid = small_grid(nx=33, lx=8.0)
        config = SolverConfig3D(grid=grid, couplings=CouplingParams(0.0, 0.0, 0.0))
        axial = np.exp(-0.05 * grid.axial.nodes**2)
        psi = normalize(gaussian_ansatz_3d(grid, 1.0, axial))
        for _ in range(2500):
            psi = step_3d(psi, config, TimeMode.IMAGINARY)
        marginal = psi.density().sum(axis=0) * grid.axial.spacing
        for _ in range(10):
            psi = step_3d(psi, config, TimeMode.IMAGINARY)
        settled = psi.density().sum(axis=0) * grid.axial.spacing
        assert np.max(np.abs(settled - marginal)) < 1e-6

    def test_noninteracting_width_is_unity(self):
        # the second moment of the discrete transverse eigenstate carries an
        # h^2/8 bias, so hitting 1e-3 takes a finer spacing than the
        # production default; the strong axial trap just speeds convergence
        grid = Grid3D(Grid1D(8.0, 17), 6.0, 161)
        config = SolverConfig3D(grid=grid, couplings=CouplingParams(0.0, 0.0, 1.0), mu_tol=1e-9)
        result = ground_state_3d(config)
        widths = transverse_width_profile(result.wavefunction)
        core = np.abs(grid.axial.nodes) < 4.0
        assert np.nanmax(np.abs(widths[core] - 1.0)) < 1e-3

    def test_imaginary_energy_monotone(self):
        grid = small_grid(nx=33, lx=8.0, nt=17)
        coup = CouplingParams(1.0, 1.0, LAM)
        config = SolverConfig3D(grid=grid, couplings=coup)
        axial = np.exp(-0.02 * grid.axial.nodes**2)
        psi = normalize(gaussian_ansatz_3d(grid, 1.3, axial))
        energy = energy_3d(psi, coup)
        for _ in range(150):
            psi = step_3d(psi, config, TimeMode.IMAGINARY)
            next_energy = energy_3d(psi, coup)
            assert next_energy <= energy + 1e-12
            energy = next_energy

    def test_threads_do_not_change_results(self):
        grid = small_grid(nx=33, lx=8.0, nt=17)
        config = SolverConfig3D(grid=grid, couplings=CouplingParams(1.0, 1.0, LAM))
        rng = np.random.default_rng(0)
        values = rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)
        psi = normalize(Wavefunction3D(grid, values))
        serial = step_3d(psi, config, TimeMode.IMAGINARY, threads=1)
        threaded = step_3d(psi, config, TimeMode.IMAGINARY, threads=3)
        assert np.array_equal(serial.values, threaded.values)


class TestGroundState3D:
    def test_noninteracting_oracle(self):
        grid = Grid3D(Grid1D(20.0, 161), 6.0, 129)
        config = SolverConfig3D(grid=grid, couplings=CouplingParams(0.0, 0.0, LAM))
        result = ground_state_3d(config)
        assert result.converged
        assert result.mu == pytest.approx(1.0 + LAM / 2.0, abs=1e-3)
        assert norm_sq(result.wavefunction) == pytest.approx(1.0, abs=1e-10)

    def test_interacting_state_is_even(self, small_ground_state):
        _, result = small_ground_state
        values = result.wavefunction.values
        assert np.max(np.abs(values - values[::-1, :, :])) < 1e-8
        assert np.max(np.abs(values - values[:, ::-1, :])) < 1e-8
        assert np.max(np.abs(values - values[:, :, ::-1])) < 1e-8

    def test_interacting_mu_exceeds_energy(self, small_ground_state):
        _, result = small_ground_state
        assert result.mu > result.energy
        assert result.converged

    def test_reported_observables_match_recomputation(self, small_ground_state):
        config, result = small_ground_state
        assert chemical_potential_3d(result.wavefunction, config.couplings) == pytest.approx(result.mu, rel=1e-10)
        assert energy_3d(result.wavefunction, config.couplings) == pytest.approx(result.energy, rel=1e-10)

    def test_width_matches_variational_prediction(self, small_ground_state):
        from cqgpe import solve_width, DensityArgs

        config, result = small_ground_state
        profile = project_axial(result.wavefunction)
        peak = float(np.max(profile.density))
        predicted = solve_width(DensityArgs(config.couplings.g3 * peak, config.couplings.g5 * peak**2)).s
        center = result.wavefunction.grid.axial.points // 2
        measured = transverse_width_profile(result.wavefunction)[center]
        assert measured == pytest.approx(predicted, rel=0.10)


class TestProjection:
    def test_ansatz_projection_recovers_axial_density(self):
        grid = small_grid()
        axial = axial_gaussian(grid)
        axial /= np.sqrt(np.sum(axial**2) * grid.axial.spacing)
        psi = gaussian_ansatz_3d(grid, 1.0, axial)
        profile = project_axial(psi)
        assert np.max(np.abs(profile.density - axial**2)) < 1e-6

    def test_profile_integrates_to_one(self):
        grid = small_grid()
        rng = np.random.default_rng(2)
        psi = normalize(Wavefunction3D(grid, rng.normal(size=grid.shape)))
        profile = project_axial(psi)
        assert np.sum(profile.density) * grid.axial.spacing == pytest.approx(1.0, abs=1e-6)

    def test_width_of_exact_ansatz(self):
        grid = small_grid()
        psi = gaussian_ansatz_3d(grid, 1.0, axial_gaussian(grid))
        widths = transverse_width_profile(psi)
        finite = ~np.isnan(widths)
        assert np.max(np.abs(widths[finite] - 1.0)) < 1e-6

    def test_width_floor_masks_empty_slices(self):
        grid = small_grid()
        axial = np.zeros(grid.axial.points)
        axial[grid.axial.points // 2] = 1.0
        psi = normalize(gaussian_ansatz_3d(grid, 1.0, axial))
        widths = transverse_width_profile(psi)
        assert np.isnan(widths[0])
        assert not np.isnan(widths[grid.axial.points // 2])
