"""Equilibrium and transport dynamics of an age-structured capital stock."""

from .config import RunConfig, build, load_config
from .equilibrium import EquilibriumSolution, solve_equilibrium
from .model import (
    ConstrainedLinQuad,
    LinPower,
    LinQuad,
    Linear,
    Log,
    ModelParams,
    Power,
    PurePower,
    Quadratic,
)
from .numerics import AgeGrid

__all__ = [
    "AgeGrid",
    "ConstrainedLinQuad",
    "EquilibriumSolution",
    "LinPower",
    "LinQuad",
    "Linear",
    "Log",
    "ModelParams",
    "Power",
    "PurePower",
    "Quadratic",
    "RunConfig",
    "build",
    "load_config",
    "solve_equilibrium",
]
