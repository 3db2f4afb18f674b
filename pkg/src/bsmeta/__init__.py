"""Steady states, metastability and the inviscid limit of a
convection-reaction-diffusion equation with nonlinear diffusion,

    u_t = eps*(h(u)*u_x)_x - f(u)_x + f'(u)   on (0, ell),

with homogeneous Dirichlet boundary conditions.

Subpackages:
    model       function pairs (h, f), structural checks, stationary operator
    steady      shooting construction of the stationary states
    parabolic   implicit finite-difference evolution, metastability timing
    hyperbolic  Godunov solver for the eps = 0 limit and its asymptotics
    experiments scripted reproduction of the numerical test suite
    cli         command line entry point
"""

from bsmeta.model import (
    GridFunction,
    ModelFunctions,
    ProblemSpec,
    alpha_bar,
    apply_L,
    existence_threshold,
    validate_assumptions,
)

__all__ = [
    "GridFunction",
    "ModelFunctions",
    "ProblemSpec",
    "alpha_bar",
    "apply_L",
    "existence_threshold",
    "validate_assumptions",
]
