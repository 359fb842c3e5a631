"""Perturbation analysis of the posted-price auction ODE near its singular point."""

from .leading_order import CubicRoots, FirstIntegral, conserved_quantity, first_integral, solve_leading_cubic
from .perturbation import ApproxSolution, compose_solution, correction_coefficient_r, correction_coefficients
from .pipeline import OrderEquations, PerturbationSplit, derive_order_equations, split_perturbation
from .validation import IntegrationConfig, ModelParams, SweepRecord, compare, convergence_order, sweep

__all__ = [
    "ApproxSolution",
    "CubicRoots",
    "FirstIntegral",
    "IntegrationConfig",
    "ModelParams",
    "OrderEquations",
    "PerturbationSplit",
    "SweepRecord",
    "compare",
    "compose_solution",
    "conserved_quantity",
    "convergence_order",
    "correction_coefficient_r",
    "correction_coefficients",
    "derive_order_equations",
    "first_integral",
    "solve_leading_cubic",
    "split_perturbation",
    "sweep",
]
