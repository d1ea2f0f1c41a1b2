"""Finite volume schemes whose numerical diffusion matches a chosen physical viscosity."""
from .core import Grid, InadmissibleStateError, ModelError, SolverError, StateField, make_grid
from .euler import EulerModel
from .swlin import SwLinModel, SwLinParams

__all__ = [
    "EulerModel", "Grid", "InadmissibleStateError", "ModelError", "SolverError",
    "StateField", "SwLinModel", "SwLinParams", "make_grid",
]
__version__ = "0.1.0"
