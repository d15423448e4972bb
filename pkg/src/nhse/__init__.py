"""Electric-field control of the non-Hermitian skin effect.

A numpy/scipy toolkit for a 1-D chain with non-reciprocal hopping under dc
and ac electric fields: exact infinite-lattice propagators, brute-force
finite-chain integration, spectral winding diagnostics, localization phase
classification, and an equivalent LC-circuit synthesis.
"""

__version__ = "0.1.0"

from .bessel import BesselZeroTable, bessel_j, bessel_zero, solve_x_star
from .circuit import (
    CircuitNetlist,
    circuit_eigenproblem,
    export_netlist,
    parse_netlist,
    synthesize,
    transient_check,
)
from .errors import (
    ConfigError,
    DomainError,
    EvolutionOverflowError,
    NearResonanceWarning,
    NumericalError,
    StepSizeError,
    SynthesisError,
    UnsupportedConfigurationError,
)
from .evolve import EvolutionResult, center_of_mass, integrate, safe_window
from .lattice import (
    OPEN,
    BoundaryCondition,
    DriveField,
    LatticeParams,
    build_hamiltonian,
    field_at,
    twisted,
)
from .phase import (
    PhasePoint,
    Verdict,
    classify,
    is_finite_size_skin,
    oscillation_range,
    scan_phase_diagram,
)
from .propagator import (
    DriveFunctionals,
    InitialState,
    drive_functionals,
    eta,
    evolve_amplitudes,
    rho_ratio_longtime,
    rho_single_site,
    time_averaged_ratio,
    upper_bound_rho,
    uv,
    uv_quadrature,
)
from .spectral import (
    SpectralResult,
    critical_field,
    obc_spectrum,
    skin_mode_count,
    winding_number,
)

__all__ = [
    "__version__",
    "BesselZeroTable",
    "BoundaryCondition",
    "CircuitNetlist",
    "ConfigError",
    "DomainError",
    "DriveField",
    "DriveFunctionals",
    "EvolutionOverflowError",
    "EvolutionResult",
    "InitialState",
    "LatticeParams",
    "NearResonanceWarning",
    "NumericalError",
    "OPEN",
    "PhasePoint",
    "SpectralResult",
    "StepSizeError",
    "SynthesisError",
    "UnsupportedConfigurationError",
    "Verdict",
    "bessel_j",
    "bessel_zero",
    "build_hamiltonian",
    "center_of_mass",
    "circuit_eigenproblem",
    "classify",
    "critical_field",
    "drive_functionals",
    "eta",
    "evolve_amplitudes",
    "export_netlist",
    "field_at",
    "integrate",
    "is_finite_size_skin",
    "obc_spectrum",
    "oscillation_range",
    "parse_netlist",
    "rho_ratio_longtime",
    "rho_single_site",
    "safe_window",
    "scan_phase_diagram",
    "skin_mode_count",
    "solve_x_star",
    "synthesize",
    "time_averaged_ratio",
    "transient_check",
    "twisted",
    "upper_bound_rho",
    "uv",
    "uv_quadrature",
    "winding_number",
]
