"""Periods-of-supply baseline policy and policy comparison."""

from __future__ import annotations

from ..demand import round_half_up
from ..errors import ConfigError
from .feasibility import minimal_containers
from .solver import effective_boundary, solve
from .types import (
    CostBreakdown,
    OrderLine,
    OrderSummary,
    OrderSummaryEntry,
    PlanMode,
    PolicyComparison,
    ReplenishmentInstance,
    ReplenishmentPlan,
    SolverOptions,
    SolverStatus,
)

__all__ = ["baseline_periods_of_supply", "compare_policies", "summarize_orders"]


def baseline_periods_of_supply(inst: ReplenishmentInstance, periods: int) -> ReplenishmentPlan:
    """Myopic reorder-when-short policy covering `periods` of demand.

    Whenever the projected stock at the end of the lead time goes
    negative, an order is placed for the next `periods` of demand net
    of the projected position, raised to the MOQ. Containers hold each
    period's combined order with no fill-rate requirement.
    """
    if periods < 1:
        raise ConfigError(f"periods must be >= 1, got {periods}")
    if inst.mode is not PlanMode.OPERATIONAL:
        raise ConfigError("the baseline policy needs an operational instance")
    s, h = inst.size, inst.horizon
    lead = inst.lead_time
    start, demand = effective_boundary(inst)

    orders = [[0] * h for _ in range(s)]
    incoming = [list(row) for row in inst.arrivals]
    inventory = [[0] * h for _ in range(s)]
    shortages = [[0] * h for _ in range(s)]
    for i in range(s):
        level = start[i]
        for t in range(h):
            if t + lead < h:
                projected = level
                for tau in range(t, t + lead + 1):
                    projected += incoming[i][tau] - demand[i][tau]
                if projected < 0:
                    position = projected + demand[i][t + lead]
                    window = demand[i][t + lead:min(t + lead + periods, h)]
                    quantity = max(inst.moq[i], sum(window) - position)
                    orders[i][t] = quantity
                    incoming[i][t + lead] += quantity
            available = level + incoming[i][t]
            missing = max(0, demand[i][t] - available)
            level = available - demand[i][t] + missing
            inventory[i][t] = level
            shortages[i][t] = missing

    containers = [
        minimal_containers(inst, [orders[i][t] for i in range(s)]) for t in range(h)
    ]
    hold_coeff = [round_half_up(inst.holding_rate * c) for c in inst.unit_cost]
    purchase = sum(inst.unit_cost[i] * sum(orders[i]) for i in range(s))
    holding = sum(hold_coeff[i] * sum(inventory[i]) for i in range(s))
    container = inst.container_cost * sum(containers)
    shortage = sum(inst.shortage_penalty[i] * sum(shortages[i]) for i in range(s))
    breakdown = CostBreakdown(purchase, holding, container, shortage)
    return ReplenishmentPlan(
        orders=tuple(tuple(row) for row in orders),
        order_flags=tuple(tuple(v > 0 for v in row) for row in orders),
        containers=tuple(containers),
        inventory=tuple(tuple(row) for row in inventory),
        shortages=tuple(tuple(row) for row in shortages),
        start_inventory=tuple(start),
        objective=breakdown.total,
        cost_breakdown=breakdown,
        solver_status=SolverStatus.HEURISTIC,
    )


def _mean_inventory(plan: ReplenishmentPlan) -> float:
    cells = [v for row in plan.inventory for v in row]
    return sum(cells) / len(cells) if cells else 0.0


def _pct_decrease(base: float, opt: float) -> float:
    if base == 0:
        return 0.0
    return (base - opt) / base * 100.0


def compare_policies(
    inst: ReplenishmentInstance,
    period_options,
    opts: SolverOptions | None = None,
) -> list[PolicyComparison]:
    optimized = solve(inst, opts)
    out = []
    for periods in period_options:
        base = baseline_periods_of_supply(inst, periods)
        out.append(
            PolicyComparison(
                baseline_cost=base.objective,
                optimized_cost=optimized.objective,
                cost_savings_pct=_pct_decrease(base.objective, optimized.objective),
                mean_inventory_baseline=_mean_inventory(base),
                mean_inventory_optimized=_mean_inventory(optimized),
                inventory_decrease_pct=_pct_decrease(
                    _mean_inventory(base), _mean_inventory(optimized)
                ),
                periods_of_supply=periods,
            )
        )
    return out


def summarize_orders(
    plan: ReplenishmentPlan,
    inst: ReplenishmentInstance,
    review_period: int = 1,
) -> OrderSummary:
    entries = []
    for t in range(inst.horizon):
        n = plan.containers[t]
        if n <= 0:
            continue
        lines = tuple(
            OrderLine(
                sku_id=inst.group.sku_ids[i],
                units=plan.orders[i][t],
                line_cost=inst.unit_cost[i] * plan.orders[i][t],
            )
            for i in range(inst.size)
            if plan.orders[i][t] > 0
        )
        volume = sum(
            inst.unit_volume[i] * plan.orders[i][t] for i in range(inst.size)
        )
        mass = sum(inst.unit_mass[i] * plan.orders[i][t] for i in range(inst.size))
        entries.append(
            OrderSummaryEntry(
                period=t,
                lines=lines,
                containers=n,
                volume_util_pct=round(volume / (inst.volume_cap * n) * 100.0, 1),
                mass_util_pct=round(mass / (inst.mass_cap * n) * 100.0, 1),
                total_cost=sum(line.line_cost for line in lines)
                + inst.container_cost * n,
                urgent=t < review_period,
            )
        )
    return OrderSummary(entries=tuple(entries))
