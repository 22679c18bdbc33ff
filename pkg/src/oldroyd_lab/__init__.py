"""Pseudo-spectral simulator and frequency-analysis toolkit for compressible
viscoelastic flow without stress diffusion, on periodic boxes in 2D/3D."""

from .grid import (
    Grid,
    GridMismatchError,
    ScalarField,
    SymTensorField,
    VectorField,
    build_grid,
)
from .params import DEFAULT_PARAMS, DerivedConstants, PhysParams
from .states import (
    CauchyState,
    EffectiveState,
    PrimitiveState,
    TorusState,
    VacuumError,
    map_states,
)
from .models import good_unknowns, rhs_cauchy, rhs_effective, rhs_primitive, rhs_torus
from .lp import BesovNormSpec, DyadicBlockSet, besov_norm, build_blocks

__all__ = [
    "Grid",
    "GridMismatchError",
    "ScalarField",
    "VectorField",
    "SymTensorField",
    "build_grid",
    "PhysParams",
    "DerivedConstants",
    "DEFAULT_PARAMS",
    "PrimitiveState",
    "CauchyState",
    "TorusState",
    "EffectiveState",
    "VacuumError",
    "map_states",
    "rhs_primitive",
    "rhs_cauchy",
    "rhs_torus",
    "rhs_effective",
    "good_unknowns",
    "DyadicBlockSet",
    "BesovNormSpec",
    "build_blocks",
    "besov_norm",
]

__version__ = "0.1.0"
