"""Hermite spectral-Galerkin solver for the diffusive-viscous wave equation on R and R^2."""

__version__ = "0.1.0"

from .diagnostics import ErrorReport, fit_rate, h1_error, l2_error, linf_error
from .dvwe import (
    AlongAxis,
    AssemblyError,
    Constant,
    DvweProblem,
    General,
    GeneralSource,
    SemiDiscreteSystem,
    SeparableSource,
    assemble,
    energy,
    initial_state,
    load_vector,
)
from .field import SpectralField, evaluate, evaluate_grid, from_grid, project, to_grid
from .hermite import (
    BasisSpec,
    QuadratureError,
    QuadratureRule,
    from_reference,
    gauss_hermite,
    hermite_fun_deriv_coeffs,
    hermite_fun_eval,
    hermite_poly_eval,
    to_reference,
)
from .operators import (
    GeneralOperator2D,
    Operator1D,
    SeparableOperator,
    apply,
    apply_general_2d,
    compose_2d,
    mass_matrix,
    stiffness_matrix,
    weighted_mass,
    weighted_stiffness,
)
from .ssprk3 import DivergenceError, EnergyRecorder, StateVector, integrate, step

__all__ = [
    "AlongAxis",
    "AssemblyError",
    "BasisSpec",
    "Constant",
    "DivergenceError",
    "DvweProblem",
    "EnergyRecorder",
    "ErrorReport",
    "General",
    "GeneralOperator2D",
    "GeneralSource",
    "Operator1D",
    "QuadratureError",
    "QuadratureRule",
    "SemiDiscreteSystem",
    "SeparableOperator",
    "SeparableSource",
    "SpectralField",
    "StateVector",
    "apply",
    "apply_general_2d",
    "assemble",
    "compose_2d",
    "energy",
    "evaluate",
    "evaluate_grid",
    "fit_rate",
    "from_grid",
    "from_reference",
    "gauss_hermite",
    "h1_error",
    "hermite_fun_deriv_coeffs",
    "hermite_fun_eval",
    "hermite_poly_eval",
    "initial_state",
    "integrate",
    "l2_error",
    "linf_error",
    "load_vector",
    "mass_matrix",
    "project",
    "step",
    "stiffness_matrix",
    "to_grid",
    "to_reference",
    "weighted_mass",
    "weighted_stiffness",
]
