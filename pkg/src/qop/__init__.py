"""Domain-aware numerics for unbounded operators of one-dimensional quantum mechanics."""

from .constants import DEFAULT, Constants
from .errors import (
    ConfigError,
    DomainViolation,
    InputError,
    NotSelfAdjointError,
    NumericalError,
    PreconditionError,
    QopError,
    StructuralError,
    UnsupportedCase,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT",
    "Constants",
    "ConfigError",
    "DomainViolation",
    "InputError",
    "NotSelfAdjointError",
    "NumericalError",
    "PreconditionError",
    "QopError",
    "StructuralError",
    "UnsupportedCase",
]
