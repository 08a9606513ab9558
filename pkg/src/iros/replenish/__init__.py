"""Supplier-group replenishment planning.

Groups SKUs by supplier, assembles lot-sizing instances from forecasts
and priorities, solves them exactly as mixed-integer programs, audits
edited plans, and benchmarks against a periods-of-supply baseline.
"""

from .baseline import baseline_periods_of_supply, compare_policies, summarize_orders
from .build import InstanceOptions, build_instance, group_skus
from .feasibility import check_feasibility, minimal_containers, simulate_orders
from .solver import effective_boundary, solve
from .types import (
    CostBreakdown,
    FeasibilityReport,
    OrderLine,
    OrderSummary,
    OrderSummaryEntry,
    PlanMode,
    PolicyComparison,
    ReplenishmentInstance,
    ReplenishmentPlan,
    SkuGroup,
    SolverOptions,
    SolverStatus,
    Violation,
)

__all__ = [
    "CostBreakdown",
    "FeasibilityReport",
    "InstanceOptions",
    "OrderLine",
    "OrderSummary",
    "OrderSummaryEntry",
    "PlanMode",
    "PolicyComparison",
    "ReplenishmentInstance",
    "ReplenishmentPlan",
    "SkuGroup",
    "SolverOptions",
    "SolverStatus",
    "Violation",
    "baseline_periods_of_supply",
    "build_instance",
    "check_feasibility",
    "compare_policies",
    "effective_boundary",
    "group_skus",
    "minimal_containers",
    "simulate_orders",
    "solve",
    "summarize_orders",
]
