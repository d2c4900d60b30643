"""Equilibrium, bifurcation and phase-portrait analysis of a Leslie-Gower
predator-prey model with a weak Allee effect."""
from .errors import (DomainError, ManifoldSectionError, NumericalError, PreconditionError,
                     ScopeWarning, StiffnessError, ValidationError)
from .model import DimensionalParams, ModelParams, State

__version__ = "0.1.0"

__all__ = [
    "DimensionalParams", "DomainError", "ManifoldSectionError", "ModelParams", "NumericalError",
    "PreconditionError", "ScopeWarning", "State", "StiffnessError", "ValidationError",
]
