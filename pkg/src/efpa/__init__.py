"""Envy-free partial allocations of indivisible goods under efficiency thresholds."""

from .core import (
    Allocation,
    Answer,
    BudgetExceeded,
    Instance,
    Measure,
    Query,
    SolverResult,
    SolveStats,
    UsageError,
    UtilityClass,
    bundle_utility,
    classify_utilities,
    is_envy_free,
    measure_value,
    verify,
)
from .oracle import OracleBudget, oracle_solve
from .solvers import AlgorithmChoice, solve

__version__ = "0.1.0"
