"""Rate-constrained power minimization games on Gaussian parallel
interference channels.

Library layout:

* :mod:`gnepower.model` -- problem instances, SINR/rate formulas
* :mod:`gnepower.waterfill` -- rate-constrained single-user waterfilling
* :mod:`gnepower.conditions` -- existence/uniqueness certificates and bounds
* :mod:`gnepower.solvers` -- sequential/simultaneous iterative waterfilling
* :mod:`gnepower.netgen` -- multicell Rayleigh channel generation
* :mod:`gnepower.experiments` -- seeded sweeps and convergence comparisons
* :mod:`gnepower.plots` -- optional figure rendering (CLI report path)
* :mod:`gnepower.cli` -- the ``gnepower`` command
"""

__version__ = "0.1.0"

from .model import LN2, Scenario, interference_profile, normalized_noise, rate, rate_bits, sinr, total_power
from .waterfill import water_level_bisection, water_level_exact, waterfill_op
from .conditions import (
    CertificateError,
    DiagnosticsReport,
    check_existence,
    check_existence_diagonal_dominance,
    check_existence_worst_case,
    check_uniqueness,
    check_uniqueness_strict,
    contraction_factors,
    diagnose,
    is_p_matrix_exhaustive,
    is_p_matrix_z,
    is_z_matrix,
    spectral_radius,
)
from .solvers import (
    IterationTrace,
    KktReport,
    NotPMatrixError,
    SolverOptions,
    sequential_iwfa,
    simultaneous_iwfa,
    solve_single_subchannel,
    verify_gne,
    verify_kkt,
)
from .netgen import NetworkGeometry, hex_network, rayleigh_gains, scenario_from_geometry
from .experiments import (
    ConvergenceResult,
    SweepConfig,
    condition_probability_sweep,
    convergence_experiment,
    default_proximity_grid,
)

__all__ = [
    "__version__",
    "LN2",
    "Scenario",
    "interference_profile",
    "normalized_noise",
    "rate",
    "rate_bits",
    "sinr",
    "total_power",
    "water_level_bisection",
    "water_level_exact",
    "waterfill_op",
    "CertificateError",
    "DiagnosticsReport",
    "check_existence",
    "check_existence_diagonal_dominance",
    "check_existence_worst_case",
    "check_uniqueness",
    "check_uniqueness_strict",
    "contraction_factors",
    "diagnose",
    "is_p_matrix_exhaustive",
    "is_p_matrix_z",
    "is_z_matrix",
    "spectral_radius",
    "IterationTrace",
    "KktReport",
    "NotPMatrixError",
    "SolverOptions",
    "sequential_iwfa",
    "simultaneous_iwfa",
    "solve_single_subchannel",
    "verify_gne",
    "verify_kkt",
    "NetworkGeometry",
    "hex_network",
    "rayleigh_gains",
    "scenario_from_geometry",
    "ConvergenceResult",
    "SweepConfig",
    "condition_probability_sweep",
    "convergence_experiment",
    "default_proximity_grid",
]
