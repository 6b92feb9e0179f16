"""Discrete-time quantum walks on a line with phase defects.

Closed-form scattering and bound states for a single defect, transfer-matrix
composition for many defects, and a brute-force lattice simulator used as an
independent check on all of them.
"""

from .errors import (
    BandEdgeError,
    BoundaryContaminationError,
    ConfigError,
    DegenerateModeError,
    DirectionError,
    InsufficientStepsError,
    NonRealDispersionError,
    OutOfBandError,
    QWalkError,
    ResonanceError,
    SingularMatrixError,
    SingularPointError,
    SupportOverflowError,
    WindowTooSmallError,
)
from .wavecore import (
    Coin,
    PlaneWaveMode,
    group_velocity,
    plane_wave_mode,
    quasi_energy,
    quasi_momenta,
    spinor,
)
from .scattering import (
    Defect,
    Direction,
    ScatteringAmplitudes,
    critical_phase,
    matching_residual,
    reflection_amplitude,
    scatter_single,
    transmission_amplitude,
    zero_reflectance_momentum,
    zero_reflectance_phase,
)
from .bound import (
    BoundStateBranch,
    bound_branches,
    bound_decay_factors,
    bound_existence_windows,
    bound_state_energy,
    bound_state_profile,
    transition_sweep,
)
from .transfer import (
    DefectStack,
    amplitudes_from_matrix,
    Spectrum,
    ZeroSearch,
    find_reflectance_zeros,
    lambda_matrix,
    lambda_matrix_printed,
    min_reflectance,
    reflectance_spectrum,
    stack_matrix,
    stack_scatter,
)
from .lattice import (
    ExperimentResult,
    LatticeState,
    WavePacketSpec,
    eigencheck,
    evolve_step,
    make_packet,
    scatter_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "BandEdgeError",
    "BoundStateBranch",
    "BoundaryContaminationError",
    "Coin",
    "ConfigError",
    "Defect",
    "DefectStack",
    "DegenerateModeError",
    "Direction",
    "DirectionError",
    "ExperimentResult",
    "InsufficientStepsError",
    "LatticeState",
    "NonRealDispersionError",
    "OutOfBandError",
    "PlaneWaveMode",
    "QWalkError",
    "ResonanceError",
    "ScatteringAmplitudes",
    "SingularMatrixError",
    "SingularPointError",
    "Spectrum",
    "SupportOverflowError",
    "WavePacketSpec",
    "WindowTooSmallError",
    "ZeroSearch",
    "amplitudes_from_matrix",
    "bound_branches",
    "bound_decay_factors",
    "bound_existence_windows",
    "bound_state_energy",
    "bound_state_profile",
    "critical_phase",
    "eigencheck",
    "evolve_step",
    "find_reflectance_zeros",
    "group_velocity",
    "lambda_matrix",
    "lambda_matrix_printed",
    "make_packet",
    "matching_residual",
    "min_reflectance",
    "plane_wave_mode",
    "quasi_energy",
    "quasi_momenta",
    "reflectance_spectrum",
    "reflection_amplitude",
    "scatter_experiment",
    "scatter_single",
    "spinor",
    "stack_matrix",
    "stack_scatter",
    "transition_sweep",
    "transmission_amplitude",
    "zero_reflectance_momentum",
    "zero_reflectance_phase",
    "__version__",
]
