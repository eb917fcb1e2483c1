"""Mean-field dynamics of a Bose-Einstein condensate on a tilted 1D lattice.

Simulates the lattice nonlinear Schroedinger dynamics in the static and
gauge (driven) frames, computes quasimomentum carpets and chaos
diagnostics, provides the frozen-phase and Gauss-sum analytic references,
and solves the linear and cubic discrete diffusion models that describe
the subdiffusive regime.
"""

__version__ = "0.1.0"

from .core import (
    Frame,
    FrameError,
    LatticeState,
    ModelParams,
    ThomasFermiSpec,
    gaussian_init,
    single_site_init,
    solve_thomas_fermi,
    thomas_fermi_init,
    to_frame,
    uniform_init,
)
from .propagate import (
    IntegratorConfig,
    StepSizeUnderflowError,
    TangentState,
    derivative_gauge,
    derivative_static,
    momentum_derivative,
    propagate,
    propagate_momentum,
    propagate_with_tangent,
    random_tangent,
    tangent_derivative,
)
from .observables import (
    ObservableSeries,
    SeriesRecorder,
    bloch_spectrum,
    carpet_grid,
    dispersion,
    energy,
    fluctuation,
    quasimomenta,
    trailing_average_profile,
)
from .analytics import (
    CoherenceResult,
    FitResult,
    RevivalStructure,
    carpet_fidelity,
    coherence_score,
    coherence_time,
    fit_power_law,
    fractional_revival_overlaps,
    frozen_phase_state,
    gauss_sum_spectrum,
    lyapunov_series,
    revival_structure,
    revival_time,
    uniform_closed_form,
)
from .diffusion import (
    DiffusionParams,
    DiffusionProfile,
    DiffusionSeries,
    ScalingResult,
    diffusion_coefficient,
    linear_step,
    nonlinear_step,
    run_linear,
    run_nonlinear,
    scaling_check,
    support_radius,
)
from .scenarios import (
    BoundaryGuard,
    BoundaryGuardError,
    ConservationError,
    RunResult,
    ScenarioConfig,
    builtin_names,
    builtin_scenario,
    load_config,
    load_sweep,
    run_scenario,
    run_sweep,
    subdiffusion_config,
)
