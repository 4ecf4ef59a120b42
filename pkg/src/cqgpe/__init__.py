"""Cigar-trap cubic-quintic Gross-Pitaevskii solvers.

Transverse-width algebra, effective 1D nonpolynomial and polynomial models,
split-step Crank-Nicolson propagation in 1D and 3D (ADI), and cross-model
comparison utilities.
"""

from .grids import (
    CouplingParams,
    Grid1D,
    Grid3D,
    Wavefunction1D,
    Wavefunction3D,
    axial_potential,
    norm_sq,
    normalize,
)
from .width import (
    DensityArgs,
    InvalidRegionError,
    WidthSolution,
    WidthStatus,
    WidthTable,
    classify_region,
    cubic_residual,
    solve_width,
    solve_width_arrays,
    weak_width,
    width_map,
)
from .nonlinearity import (
    ModelKind,
    NonlinearModel,
    energy_1d,
    matched_g3,
    mean_field_multiplier,
    nonlinear_energy_density,
    np_cubic,
    np_general,
    np_general_cardano,
    np_poly,
)
from .solver1d import (
    DivergenceError,
    GroundStateResult,
    SolverConfig1D,
    TimeMode,
    chemical_potential_1d,
    ground_state_1d,
    harmonic_gaussian,
    step_1d,
)
from .solver3d import (
    AxialProfile,
    GroundStateResult3D,
    SolverConfig3D,
    chemical_potential_3d,
    energy_3d,
    gaussian_ansatz_3d,
    ground_state_3d,
    project_axial,
    step_3d,
    transverse_width_profile,
)
from .comparison import (
    ComparisonReport,
    ConvergenceError,
    MatchScanResult,
    compare_models,
    l2_rel,
    linf_rel,
    match_scan,
)
from .config import ConfigError, RunConfig, load_config

__version__ = "0.1.0"
