"""Dispersive shifts of a weakly-anharmonic atom coupled to a resonator,
split into normal-mode splitting and vacuum-fluctuation contributions.

Three independent routes compute the same decomposition: exact
diagonalization in a truncated Fock space (``spectrum``), a symplectic
normal-mode transform with first-order Kerr expansion (``normalmodes``) and
closed-form approximations (``analytic``).
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AmbiguousLabelError,
    ConfigurationError,
    InstabilityError,
    LambShiftError,
    NumericFailureError,
    ResonanceError,
)
from .hilbert import FockConfig, SystemParams  # noqa: E402
from .spectrum import Route, ShiftSet, converge, numeric_shifts  # noqa: E402
from .normalmodes import normal_mode_shifts, symplectic_transform  # noqa: E402
from .analytic import beyond_rwa_shifts, rwa_shifts, vacuum_fraction  # noqa: E402
from .routes import compute_shifts  # noqa: E402

__all__ = [
    "AmbiguousLabelError",
    "ConfigurationError",
    "FockConfig",
    "InstabilityError",
    "LambShiftError",
    "NumericFailureError",
    "ResonanceError",
    "Route",
    "ShiftSet",
    "SystemParams",
    "beyond_rwa_shifts",
    "compute_shifts",
    "converge",
    "normal_mode_shifts",
    "numeric_shifts",
    "rwa_shifts",
    "symplectic_transform",
    "vacuum_fraction",
]
