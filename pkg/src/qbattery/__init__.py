"""Exact and analytic charging dynamics of multi-central-spin quantum batteries."""
from .dicke import (
    ExcitationSector,
    InitialState,
    ModelParams,
    b_coeff,
    build_sector,
)
from .errors import ConvergenceError, DomainError
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ConvergenceError",
    "DomainError",
    "ExcitationSector",
    "InitialState",
    "ModelParams",
    "b_coeff",
    "build_sector",
]
