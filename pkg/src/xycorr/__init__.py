"""Exact two-spin physics of the anisotropic XY chain and quantum correlation measures."""

from .errors import (
    CapacityError,
    DomainError,
    InvalidStateError,
    QuadratureError,
    ShapeError,
    SymmetryError,
    UsageError,
    XYCorrError,
)
from .xy import (
    CorrelatorSet,
    XYParams,
    correlators,
    dispersion,
    factorization_field,
    g_function,
    single_spin_state,
    transverse_magnetization,
    two_spin_state,
)

__version__ = "0.1.0"
