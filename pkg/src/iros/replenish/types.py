"""Data shapes shared by the replenishment planner.

All money figures are integer minor units throughout: unit costs,
penalties, container cost, and every plan objective or breakdown term.
Demand, orders, inventory, and shortages are integer unit counts. The
only floats are physical quantities (volume, mass), rates, and
fractions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ConfigError

__all__ = [
    "PlanMode",
    "SolverStatus",
    "SolverOptions",
    "SkuGroup",
    "ReplenishmentInstance",
    "CostBreakdown",
    "ReplenishmentPlan",
    "Violation",
    "FeasibilityReport",
    "PolicyComparison",
    "OrderLine",
    "OrderSummaryEntry",
    "OrderSummary",
]

from enum import Enum


class PlanMode(str, Enum):
    EQUILIBRIUM = "equilibrium"
    OPERATIONAL = "operational"


class SolverStatus(str, Enum):
    OPTIMAL = "optimal"
    GAP_LIMIT = "gap_limit"
    INFEASIBLE = "infeasible"
    HEURISTIC = "heuristic"


@dataclass(frozen=True)
class SolverOptions:
    gap: float = 1e-6
    time_limit: float | None = None
    objective: str = "cost"
    # per (sku, period) minimum order quantities, e.g. user edits that a
    # re-solve must respect; shape is checked against the instance in solve()
    order_floors: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self) -> None:
        if self.gap < 0:
            raise ConfigError(f"gap must be >= 0, got {self.gap}")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ConfigError(f"time_limit must be > 0, got {self.time_limit}")
        if self.objective not in ("cost", "profit"):
            raise ConfigError(f"objective must be cost or profit, got {self.objective!r}")
        if self.order_floors is not None:
            for row in self.order_floors:
                for v in row:
                    if v < 0 or int(v) != v:
                        raise ConfigError(f"order floor {v} must be a nonnegative integer")


@dataclass(frozen=True)
class SkuGroup:
    group_id: str
    supplier_id: str
    sku_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.sku_ids:
            raise ConfigError(f"group {self.group_id} has no members")
        if len(set(self.sku_ids)) != len(self.sku_ids):
            raise ConfigError(f"group {self.group_id} repeats a SKU")


@dataclass(frozen=True)
class ReplenishmentInstance:
    group: SkuGroup
    horizon: int
    demand: tuple[tuple[int, ...], ...]
    unit_cost: tuple[int, ...]
    unit_price: tuple[int, ...]
    holding_rate: float
    container_cost: int
    unit_volume: tuple[float, ...]
    unit_mass: tuple[float, ...]
    volume_cap: float
    mass_cap: float
    moq: tuple[int, ...]
    lead_time: int
    init_inventory: tuple[int, ...]
    init_backorders: tuple[int, ...]
    arrivals: tuple[tuple[int, ...], ...]
    service_level: tuple[float, ...]
    shortage_penalty: tuple[int, ...]
    mode: PlanMode
    min_fill: float

    def __post_init__(self) -> None:
        n = len(self.group.sku_ids)
        if self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon}")
        if not 0 <= self.lead_time < self.horizon:
            raise ConfigError(
                f"lead time {self.lead_time} must sit inside horizon {self.horizon}"
            )
        if not 0.0 <= self.min_fill <= 1.0:
            raise ConfigError(f"min_fill {self.min_fill} outside [0, 1]")
        if self.holding_rate < 0:
            raise ConfigError(f"holding_rate {self.holding_rate} must be >= 0")
        if self.volume_cap <= 0 or self.mass_cap <= 0:
            raise ConfigError("container caps must be > 0")
        per_sku = {
            "demand": self.demand,
            "unit_cost": self.unit_cost,
            "unit_price": self.unit_price,
            "unit_volume": self.unit_volume,
            "unit_mass": self.unit_mass,
            "moq": self.moq,
            "init_inventory": self.init_inventory,
            "init_backorders": self.init_backorders,
            "arrivals": self.arrivals,
            "service_level": self.service_level,
            "shortage_penalty": self.shortage_penalty,
        }
        for name, seq in per_sku.items():
            if len(seq) != n:
                raise ConfigError(f"{name} has {len(seq)} entries for {n} SKUs")
        for rows, name in ((self.demand, "demand"), (self.arrivals, "arrivals")):
            for row in rows:
                if len(row) != self.horizon:
                    raise ConfigError(f"{name} row length {len(row)} != horizon")
                if any(v < 0 for v in row):
                    raise ConfigError(f"{name} must be >= 0")
        for s in self.service_level:
            if not 0.0 < s <= 1.0:
                raise ConfigError(f"service level {s} outside (0, 1]")
        for name in ("unit_cost", "unit_price", "moq", "init_inventory",
                     "init_backorders", "shortage_penalty"):
            if any(v < 0 for v in per_sku[name]):
                raise ConfigError(f"{name} must be >= 0")
        if any(v < 0 for v in self.unit_volume) or any(v < 0 for v in self.unit_mass):
            raise ConfigError("unit volume and mass must be >= 0")
        if self.container_cost < 0:
            raise ConfigError("container_cost must be >= 0")

    @property
    def size(self) -> int:
        return len(self.group.sku_ids)

    def sku_index(self, sku_id: str) -> int:
        return self.group.sku_ids.index(sku_id)


@dataclass(frozen=True)
class CostBreakdown:
    purchase: int
    holding: int
    container: int
    shortage: int

    @property
    def total(self) -> int:
        return self.purchase + self.holding + self.container + self.shortage


@dataclass(frozen=True)
class ReplenishmentPlan:
    orders: tuple[tuple[int, ...], ...]
    order_flags: tuple[tuple[bool, ...], ...]
    containers: tuple[int, ...]
    inventory: tuple[tuple[int, ...], ...]
    shortages: tuple[tuple[int, ...], ...]
    start_inventory: tuple[int, ...]
    objective: int
    cost_breakdown: CostBreakdown
    solver_status: SolverStatus
    revenue: int = 0
    lp_bound: float = float("nan")

    def __post_init__(self) -> None:
        if self.cost_breakdown.total - self.revenue != self.objective:
            raise ConfigError("cost breakdown does not reconcile with objective")


@dataclass(frozen=True)
class Violation:
    kind: str
    period: int | None
    sku_id: str | None
    slack: float


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    violations: tuple[Violation, ...]

    def __post_init__(self) -> None:
        if self.feasible != (not self.violations):
            raise ConfigError("feasible flag contradicts violation list")


@dataclass(frozen=True)
class PolicyComparison:
    baseline_cost: int
    optimized_cost: int
    cost_savings_pct: float
    mean_inventory_baseline: float
    mean_inventory_optimized: float
    inventory_decrease_pct: float
    periods_of_supply: int


@dataclass(frozen=True)
class OrderLine:
    sku_id: str
    units: int
    line_cost: int


@dataclass(frozen=True)
class OrderSummaryEntry:
    period: int
    lines: tuple[OrderLine, ...]
    containers: int
    volume_util_pct: float
    mass_util_pct: float
    total_cost: int
    urgent: bool


@dataclass(frozen=True)
class OrderSummary:
    entries: tuple[OrderSummaryEntry, ...] = field(default=())

    @property
    def total_cost(self) -> int:
        return sum(e.total_cost for e in self.entries)
