"""Thermal-state entropy and free-energy bounds."""

from .errors import (
    DimensionMismatchError,
    IntegrationError,
    NonHermitianError,
    NumericalConsistencyError,
    NumericalDegeneracyError,
    NumericalError,
    SpectralError,
    ThermoboundError,
    TruncationError,
    ValidationError,
)
from .spectral import HermitianOperator, SpectralDecomposition, boltzmann_weight, eigendecompose, mean_value
from .thermal import (
    BoundsResult,
    GrandThermalSpec,
    ThermalSpec,
    ThermalState,
    delta_s_bounds,
    delta_s_exact,
    gibbs_potential,
    gibbs_state,
    grand_delta_s_bounds,
    grand_entropy_gap,
    grand_gibbs_state,
    grand_log_z_ratio_bounds,
    helmholtz_bounds,
    kinetic_potential_bounds,
    log_z_ratio_bounds,
    relative_entropy,
    von_neumann_entropy,
)
from .profiles import FrequencyProfile
from .ode import ClassicalSolution, solve_classical
from ._kernels import BACKEND

__version__ = "0.1.0"
