"""Exact-arithmetic Painlevé test for autonomous polynomial ODE systems."""

from .balance import Balance, generic_balances, closed_form_balances
from .exactnum import QuadElem, exact_str, sqrt_in_field
from .odeparse import Custom, Expanding, ParseError, PolySystem, Steady, builtin, parse_system
from .painleve import (BranchReport, Rationality, Status, SystemReport, Verdict, VerdictKind,
                       analyze_branch, analyze_system, classify)
from .series import PuiseuxSeries, evaluate, materialize, radius_estimate
from .validate import conserved_check, integrate, series_vs_integration

__all__ = [
    "Balance", "generic_balances", "closed_form_balances",
    "QuadElem", "exact_str", "sqrt_in_field",
    "Custom", "Expanding", "ParseError", "PolySystem", "Steady", "builtin", "parse_system",
    "BranchReport", "Rationality", "Status", "SystemReport", "Verdict", "VerdictKind",
    "analyze_branch", "analyze_system", "classify",
    "PuiseuxSeries", "evaluate", "materialize", "radius_estimate",
    "conserved_check", "integrate", "series_vs_integration",
]
