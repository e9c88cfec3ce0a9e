"""Likedness centrality, neighbor desirability and the BA ensemble experiment."""

from likecent.errors import (
    ConvergenceError,
    DegenerateGraphError,
    DomainError,
    ExperimentError,
    LikecentError,
    NumericalError,
    ParameterError,
    ParseError,
    ValidationError,
)
from likecent.graph import BAParams, Graph, generate_ba, is_connected, validate

__version__ = "0.1.0"

__all__ = [
    "BAParams",
    "ConvergenceError",
    "DegenerateGraphError",
    "DomainError",
    "ExperimentError",
    "Graph",
    "LikecentError",
    "NumericalError",
    "ParameterError",
    "ParseError",
    "ValidationError",
    "generate_ba",
    "is_connected",
    "validate",
]
