"""Driven two-level system in an ohmic bath: retrieval vs dephasing."""

from .core import (CONSTANTS, BathParams, CothMode, DriveParams,
                   PauliDecomposition, PhysicalConstants, compose_pauli,
                   decompose_pauli, expm_su2, gamma_from_field, pauli_basis)
from .errors import (ConfigError, DenominatorSingular, InsufficientDecay,
                     InvariantBreach, NonHermitianInput, NumericalError,
                     QuadratureFailure, SeriesInvalid, SpinflopError,
                     StepTooLarge, ZeroDrive)
from .rabi import (RetrievalPeriod, SpinState, TdseResult, evolve_tdse,
                   retrieval_period, transition_probability)
from .propagator import (ACoefficients, ConsistencyReport,
                         DisentanglingFunctions, a1_series, a_coeffs_exact,
                         branch_wrap_flags, consistency_report, disentangle,
                         heisenberg_sz_oracle, propagator_matrix)
from .kernels import (DEFAULT_QUADRATURE, QuadratureSettings, coth_stable,
                      dissipation_kernel, kernel_table, noise_kernel,
                      noise_kernel_grid, quad_semi_infinite, spectral_density)
from .decoherence import (A1Mode, DecoherenceResult, GFunctions,
                          SuperopCoefficients, dfactor_closed_high_t,
                          dfactor_higher_order, dfactor_quadrature,
                          dfactor_series_t, dfactor_table, g_functions,
                          g_series, superop_coefficients, thermal_argument)
from .dynamics import (TermToggles, Trajectory, dephasing_closed_trajectory,
                       evolve_dephasing_closed, evolve_master,
                       extract_decay_rate)
from .analysis import (FIGURE1_HEADER, RatioPoint, crossing_point,
                       default_k_over_lambda_grid, figure1_rows, ratio_closed,
                       ratio_prefactor, sweep_figure1)
from .cli import load_config, run

__version__ = "0.1.0"

__all__ = [
    "CONSTANTS", "BathParams", "CothMode", "DriveParams", "PauliDecomposition",
    "PhysicalConstants", "compose_pauli", "decompose_pauli", "expm_su2",
    "gamma_from_field", "pauli_basis",
    "ConfigError", "DenominatorSingular", "InsufficientDecay",
    "InvariantBreach", "NonHermitianInput", "NumericalError",
    "QuadratureFailure", "SeriesInvalid", "SpinflopError", "StepTooLarge",
    "ZeroDrive",
    "RetrievalPeriod", "SpinState", "TdseResult", "evolve_tdse",
    "retrieval_period", "transition_probability",
    "ACoefficients", "ConsistencyReport", "DisentanglingFunctions",
    "a1_series", "a_coeffs_exact", "branch_wrap_flags", "consistency_report",
    "disentangle", "heisenberg_sz_oracle", "propagator_matrix",
    "DEFAULT_QUADRATURE", "QuadratureSettings", "coth_stable",
    "dissipation_kernel", "kernel_table", "noise_kernel", "noise_kernel_grid",
    "quad_semi_infinite", "spectral_density",
    "A1Mode", "DecoherenceResult", "GFunctions", "SuperopCoefficients",
    "dfactor_closed_high_t", "dfactor_higher_order", "dfactor_quadrature",
    "dfactor_series_t", "dfactor_table", "g_functions", "g_series",
    "superop_coefficients", "thermal_argument",
    "TermToggles", "Trajectory", "dephasing_closed_trajectory",
    "evolve_dephasing_closed", "evolve_master", "extract_decay_rate",
    "FIGURE1_HEADER", "RatioPoint", "crossing_point",
    "default_k_over_lambda_grid", "figure1_rows", "ratio_closed",
    "ratio_prefactor", "sweep_figure1",
    "load_config", "run",
    "__version__",
]
