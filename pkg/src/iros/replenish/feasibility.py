"""Standalone plan checker used for edited orders and solver audits.

Deliberately shares no assembly code with the solver: it re-derives
container counts, simulates inventory with greedy shortage absorption,
and reports every broken rule with its slack. Greedy absorption serves
each period as fully as stock allows, which yields the minimum total
shortage attainable for the given orders, so the service-level check
is exact.
"""

from __future__ import annotations

import math

from ..errors import ConfigError
from .types import (
    FeasibilityReport,
    PlanMode,
    ReplenishmentInstance,
    Violation,
)

__all__ = ["check_feasibility", "minimal_containers", "simulate_orders"]

_EPS = 1e-9


def minimal_containers(inst: ReplenishmentInstance, quantities) -> int:
    """Fewest containers covering one period's volume and mass load."""
    volume = sum(inst.unit_volume[i] * quantities[i] for i in range(inst.size))
    mass = sum(inst.unit_mass[i] * quantities[i] for i in range(inst.size))
    if volume <= _EPS and mass <= _EPS and not any(quantities):
        return 0
    return max(
        1,
        math.ceil(volume / inst.volume_cap - _EPS),
        math.ceil(mass / inst.mass_cap - _EPS),
    )


def _cyclic_start(demand_row, arrivals_row) -> int | None:
    """Steady-state starting stock for one SKU, or None when none exists.

    Iterates the one-cycle map I -> end inventory (greedy absorption)
    from empty stock. The map is monotone and becomes constant once any
    period clamps to zero, so a fixed point appears within a few passes
    unless arrivals exceed demand every cycle.
    """
    level = 0
    for _ in range(8):
        start = level
        for arr, d in zip(arrivals_row, demand_row):
            level = max(0, level + arr - d)
        if level == start:
            return start
    return None


def simulate_orders(inst: ReplenishmentInstance, orders):
    """Per-SKU inventory and greedy shortages for fixed order quantities.

    Returns (inventory, shortages, start_inventory, cyclic_ok).
    """
    s, h = inst.size, inst.horizon
    lead = inst.lead_time
    cyclic = inst.mode is PlanMode.EQUILIBRIUM

    arrivals = []
    for i in range(s):
        row = []
        for t in range(h):
            if cyclic:
                row.append(orders[i][(t - lead) % h])
            else:
                incoming = inst.arrivals[i][t]
                if t >= lead:
                    incoming += orders[i][t - lead]
                row.append(incoming)
        arrivals.append(row)

    demand = [list(r) for r in inst.demand]
    start = []
    if cyclic:
        cyclic_ok = True
        for i in range(s):
            fixed = _cyclic_start(demand[i], arrivals[i])
            if fixed is None:
                cyclic_ok = False
                fixed = 0
            start.append(fixed)
    else:
        cyclic_ok = True
        for i in range(s):
            net = inst.init_inventory[i] - inst.init_backorders[i]
            start.append(max(0, net))
            if net < 0:
                demand[i][0] += -net

    inventory, shortages = [], []
    for i in range(s):
        level = start[i]
        inv_row, short_row = [], []
        for t in range(h):
            available = level + arrivals[i][t]
            missing = max(0, demand[i][t] - available)
            level = available - demand[i][t] + missing
            inv_row.append(level)
            short_row.append(missing)
        inventory.append(inv_row)
        shortages.append(short_row)
    return inventory, shortages, start, cyclic_ok


def check_feasibility(inst: ReplenishmentInstance, orders) -> FeasibilityReport:
    rows = [list(r) for r in orders]
    if len(rows) != inst.size or any(len(r) != inst.horizon for r in rows):
        raise ConfigError(
            f"orders must be {inst.size} x {inst.horizon}"
        )
    for row in rows:
        for v in row:
            if v < 0 or int(v) != v:
                raise ConfigError(f"order quantities must be nonnegative integers, got {v}")
    rows = [[int(v) for v in r] for r in rows]

    violations: list[Violation] = []
    for i, sku_id in enumerate(inst.group.sku_ids):
        for t in range(inst.horizon):
            q = rows[i][t]
            if 0 < q < inst.moq[i]:
                violations.append(
                    Violation("moq", t, sku_id, float(inst.moq[i] - q))
                )

    for t in range(inst.horizon):
        quantities = [rows[i][t] for i in range(inst.size)]
        n = minimal_containers(inst, quantities)
        if n == 0:
            continue
        volume = sum(inst.unit_volume[i] * quantities[i] for i in range(inst.size))
        required = inst.min_fill * inst.volume_cap * n
        if volume < required - _EPS:
            violations.append(Violation("container_fill", t, None, required - volume))

    _, shortages, _, cyclic_ok = simulate_orders(inst, rows)
    if not cyclic_ok:
        violations.append(Violation("cyclic_balance", None, None, 0.0))
    demand_eff = [list(r) for r in inst.demand]
    if inst.mode is PlanMode.OPERATIONAL:
        for i in range(inst.size):
            net = inst.init_inventory[i] - inst.init_backorders[i]
            if net < 0:
                demand_eff[i][0] += -net
    for i, sku_id in enumerate(inst.group.sku_ids):
        total_short = sum(shortages[i])
        allowed = (1.0 - inst.service_level[i]) * sum(demand_eff[i])
        if total_short > allowed + _EPS:
            violations.append(
                Violation("service_level", None, sku_id, total_short - allowed)
            )

    return FeasibilityReport(feasible=not violations, violations=tuple(violations))
