"""Optimal package upgrades: CUDF universes to pseudo-Boolean to weighted MaxSAT."""

from .model import (
    CudfError,
    CriteriaVector,
    PackageId,
    Profile,
    Request,
    Universe,
    evaluate_criteria,
    initial_profile,
    parse_solution,
    parse_universe,
    render_solution,
    render_universe,
    validate_profile,
)
from .oracle import brute_force
from .pipeline import AGGREGATE, LEX, InvalidSolution, Solution, solve

__version__ = "0.1.0"

__all__ = [
    "CudfError",
    "CriteriaVector",
    "PackageId",
    "Profile",
    "Request",
    "Universe",
    "evaluate_criteria",
    "initial_profile",
    "parse_solution",
    "parse_universe",
    "render_solution",
    "render_universe",
    "validate_profile",
    "brute_force",
    "solve",
    "Solution",
    "InvalidSolution",
    "LEX",
    "AGGREGATE",
]
