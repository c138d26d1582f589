"""Minimum-cost deceptive sensor alteration planning."""

from .alteration import INF, CostFunction, Multiset, SensorAlteration, total_cost
from .automata import FiniteAutomaton, regex_to_dfa
from .ilp import build_model, check_assignment, export_lp, model_stats, parse_lp, solve
from .verifier import DeceptionInstance, PlanResult, brute_force_plan, is_deceptive
from .world import WorldGraph, is_certifying

__all__ = [
    "INF",
    "CostFunction",
    "DeceptionInstance",
    "FiniteAutomaton",
    "Multiset",
    "PlanResult",
    "SensorAlteration",
    "WorldGraph",
    "brute_force_plan",
    "build_model",
    "check_assignment",
    "export_lp",
    "is_certifying",
    "is_deceptive",
    "model_stats",
    "parse_lp",
    "regex_to_dfa",
    "solve",
    "total_cost",
]
