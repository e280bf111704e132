"""Per-event contextual valuations on top of finite-dimensional quantum mechanics."""

from ._config import Tolerances, config_context, get_config, set_config
from .algebra import (
    IDENTITY_2,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    Context,
    SpectralDecomposition,
    commutator,
    is_commuting_family,
    joint_diagonalize,
    operator_norm,
    spectral_decompose,
)
from .states import (
    AverageEstimate,
    PhysicalState,
    QuantumState,
    are_equivalent,
    evaluate,
    monte_carlo_average,
    quantum_average,
    sample_physical_state,
)

__version__ = "0.1.0"
