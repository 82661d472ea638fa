"""Optimal transport under a bounded modulus of continuity, in exact arithmetic."""
from .errors import ContractError, DomainError, OscError, ParseError, RefusalError, ValidationError
from .mapbuild import build_map, monotone_map, verify_map
from .measure import AtomicMeasure, DensityMeasure, Domain, Interval, pushforward
from .osceval import osc_map, osc_plan
from .piecewise import PiecewiseMap
from .solver import Instance, SolveResult, oracle_solve, solve
from .stepcalc import Direction, StepFn, conjugate_closure, down_transform, up_transform

__all__ = [
    "AtomicMeasure", "ContractError", "DensityMeasure", "Direction", "Domain", "DomainError",
    "Instance", "Interval", "OscError", "ParseError", "PiecewiseMap", "RefusalError", "SolveResult",
    "StepFn", "ValidationError", "build_map", "conjugate_closure", "down_transform", "monotone_map",
    "osc_map", "osc_plan", "oracle_solve", "pushforward", "solve", "up_transform", "verify_map",
]
