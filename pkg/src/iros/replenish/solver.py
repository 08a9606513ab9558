"""Lot-sizing MILP assembly and solution.

One solve covers one supplier group over the full horizon. Decision
variables are per-SKU order quantities and order flags, per-SKU
shortages, per-SKU end-of-period inventory, and per-period container
counts; equilibrium mode adds a free starting inventory tied to the
horizon end. The mixed-integer program is handed to the HiGHS engine
bundled with scipy; the continuous relaxation is solved alongside it
so every plan carries a proven lower bound. The incumbent is then
re-evaluated in exact integer arithmetic, which is what the reported
objective and cost breakdown contain.

Cost coefficients (all integer minor units):
    purchase   unit_cost per ordered unit
    holding    round(holding_rate * unit_cost) per unit held per period
    container  container_cost per container
    shortage   shortage_penalty per unfilled unit

Profit mode keeps the same constraints and adds foregone revenue to
each shortage unit, reporting objective = costs - revenue.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, linprog, milp

from ..demand import round_half_up
from ..errors import ConfigError, Infeasible, TimeLimitNoIncumbent
from .types import (
    CostBreakdown,
    PlanMode,
    ReplenishmentInstance,
    ReplenishmentPlan,
    SolverOptions,
    SolverStatus,
)

__all__ = ["solve", "effective_boundary"]


def effective_boundary(inst: ReplenishmentInstance):
    """Netted starting inventory and demand with residual backorders folded in."""
    if inst.mode is PlanMode.EQUILIBRIUM:
        return (0,) * inst.size, tuple(tuple(row) for row in inst.demand)
    start = []
    demand = [list(row) for row in inst.demand]
    for i in range(inst.size):
        net = inst.init_inventory[i] - inst.init_backorders[i]
        start.append(max(0, net))
        if net < 0:
            demand[i][0] += -net
    return tuple(start), tuple(tuple(row) for row in demand)


class _Layout:
    """Flat variable indexing for the MILP column space."""

    def __init__(self, inst: ReplenishmentInstance):
        s, h = inst.size, inst.horizon
        self.size, self.horizon = s, h
        self.q0 = 0
        self.y0 = s * h
        self.u0 = 2 * s * h
        self.i0 = 3 * s * h
        self.n0 = 4 * s * h
        self.cyclic = inst.mode is PlanMode.EQUILIBRIUM
        self.s0 = self.n0 + h if self.cyclic else None
        self.total = self.n0 + h + (s if self.cyclic else 0)

    def q(self, i, t):
        return self.q0 + i * self.horizon + t

    def y(self, i, t):
        return self.y0 + i * self.horizon + t

    def u(self, i, t):
        return self.u0 + i * self.horizon + t

    def inv(self, i, t):
        return self.i0 + i * self.horizon + t

    def n(self, t):
        return self.n0 + t

    def istart(self, i):
        return self.s0 + i


def _assemble(inst: ReplenishmentInstance, opts: SolverOptions):
    s, h = inst.size, inst.horizon
    lay = _Layout(inst)
    start, demand = effective_boundary(inst)
    floors = opts.order_floors
    if floors is not None:
        if len(floors) != s or any(len(row) != h for row in floors):
            raise ConfigError(f"order_floors must be {s} x {h}")
    big_q = [sum(demand[i]) + inst.moq[i] for i in range(s)]
    if floors is not None:
        # a floored order may exceed remaining demand; widen the big-M so
        # the linking constraints stay feasible
        big_q = [max(big_q[i], *floors[i], 0) for i in range(s)]
    big_i = [
        start[i] + sum(inst.arrivals[i]) + sum(demand[i])
        + h * inst.moq[i] + big_q[i]
        for i in range(s)
    ]
    hold_coeff = [round_half_up(inst.holding_rate * c) for c in inst.unit_cost]

    cost = np.zeros(lay.total)
    for i in range(s):
        for t in range(h):
            cost[lay.q(i, t)] = inst.unit_cost[i]
            cost[lay.inv(i, t)] = hold_coeff[i]
            cost[lay.u(i, t)] = inst.shortage_penalty[i]
            if opts.objective == "profit":
                cost[lay.u(i, t)] += inst.unit_price[i]
    for t in range(h):
        cost[lay.n(t)] = inst.container_cost

    lower = np.zeros(lay.total)
    upper = np.empty(lay.total)
    integrality = np.zeros(lay.total)
    n_cap = max(
        1,
        math.ceil(sum(inst.unit_volume[i] * big_q[i] for i in range(s))
                  / inst.volume_cap),
        math.ceil(sum(inst.unit_mass[i] * big_q[i] for i in range(s))
                  / inst.mass_cap),
    )
    for i in range(s):
        for t in range(h):
            upper[lay.q(i, t)] = big_q[i]
            upper[lay.y(i, t)] = 1.0
            upper[lay.u(i, t)] = demand[i][t]
            upper[lay.inv(i, t)] = big_i[i]
            integrality[lay.q(i, t)] = 1
            integrality[lay.y(i, t)] = 1
            integrality[lay.u(i, t)] = 1
            if floors is not None and floors[i][t] > 0:
                lower[lay.q(i, t)] = floors[i][t]
    for t in range(h):
        upper[lay.n(t)] = n_cap
        integrality[lay.n(t)] = 1
    if lay.cyclic:
        for i in range(s):
            upper[lay.istart(i)] = big_i[i]
            integrality[lay.istart(i)] = 1

    rows_eq, rhs_eq = [], []
    lead = inst.lead_time
    for i in range(s):
        for t in range(h):
            row = np.zeros(lay.total)
            row[lay.inv(i, t)] = 1.0
            row[lay.u(i, t)] = -1.0
            rhs = -demand[i][t]
            if lay.cyclic:
                row[lay.q(i, (t - lead) % h)] -= 1.0
                if t == 0:
                    row[lay.istart(i)] = -1.0
                else:
                    row[lay.inv(i, t - 1)] = -1.0
            else:
                if t - lead >= 0:
                    row[lay.q(i, t - lead)] -= 1.0
                rhs += inst.arrivals[i][t]
                if t == 0:
                    rhs += start[i]
                else:
                    row[lay.inv(i, t - 1)] = -1.0
            rows_eq.append(row)
            rhs_eq.append(rhs)
        if lay.cyclic:
            row = np.zeros(lay.total)
            row[lay.inv(i, h - 1)] = 1.0
            row[lay.istart(i)] = -1.0
            rows_eq.append(row)
            rhs_eq.append(0.0)

    rows_ub, rhs_ub = [], []
    for i in range(s):
        for t in range(h):
            row = np.zeros(lay.total)
            row[lay.y(i, t)] = inst.moq[i]
            row[lay.q(i, t)] = -1.0
            rows_ub.append(row)
            rhs_ub.append(0.0)
            row = np.zeros(lay.total)
            row[lay.q(i, t)] = 1.0
            row[lay.y(i, t)] = -big_q[i]
            rows_ub.append(row)
            rhs_ub.append(0.0)
    for t in range(h):
        vol = np.zeros(lay.total)
        mass = np.zeros(lay.total)
        fill = np.zeros(lay.total)
        for i in range(s):
            vol[lay.q(i, t)] = inst.unit_volume[i]
            mass[lay.q(i, t)] = inst.unit_mass[i]
            fill[lay.q(i, t)] = -inst.unit_volume[i]
        vol[lay.n(t)] = -inst.volume_cap
        mass[lay.n(t)] = -inst.mass_cap
        fill[lay.n(t)] = inst.min_fill * inst.volume_cap
        rows_ub.extend([vol, mass, fill])
        rhs_ub.extend([0.0, 0.0, 0.0])
    for i in range(s):
        row = np.zeros(lay.total)
        for t in range(h):
            row[lay.u(i, t)] = 1.0
        rows_ub.append(row)
        rhs_ub.append((1.0 - inst.service_level[i]) * sum(demand[i]))

    return (
        lay, start, demand, cost,
        np.vstack(rows_eq), np.asarray(rhs_eq),
        np.vstack(rows_ub), np.asarray(rhs_ub),
        lower, upper, integrality,
    )


def _extract(inst, lay, start, demand, x):
    s, h = inst.size, inst.horizon
    q = [[int(round(x[lay.q(i, t)])) for t in range(h)] for i in range(s)]
    u = [[int(round(x[lay.u(i, t)])) for t in range(h)] for i in range(s)]
    n = [int(round(x[lay.n(t)])) for t in range(h)]
    if lay.cyclic:
        istart = [int(round(x[lay.istart(i)])) for i in range(s)]
    else:
        istart = list(start)
    inv = []
    lead = inst.lead_time
    for i in range(s):
        level = istart[i]
        row = []
        for t in range(h):
            if lay.cyclic:
                arrived = q[i][(t - lead) % h]
            else:
                arrived = inst.arrivals[i][t] + (q[i][t - lead] if t >= lead else 0)
            level = level + arrived - demand[i][t] + u[i][t]
            assert level >= 0, "balance produced negative inventory"
            row.append(level)
        inv.append(row)
        if lay.cyclic:
            assert row[-1] == istart[i], "cyclic boundary broken"
    return q, u, n, inv, istart


def _account(inst: ReplenishmentInstance, opts, q, u, n, inv, demand):
    hold_coeff = [round_half_up(inst.holding_rate * c) for c in inst.unit_cost]
    purchase = sum(
        inst.unit_cost[i] * q[i][t]
        for i in range(inst.size) for t in range(inst.horizon)
    )
    holding = sum(
        hold_coeff[i] * inv[i][t]
        for i in range(inst.size) for t in range(inst.horizon)
    )
    container = inst.container_cost * sum(n)
    shortage = sum(
        inst.shortage_penalty[i] * u[i][t]
        for i in range(inst.size) for t in range(inst.horizon)
    )
    revenue = 0
    if opts.objective == "profit":
        revenue = sum(
            inst.unit_price[i] * (demand[i][t] - u[i][t])
            for i in range(inst.size) for t in range(inst.horizon)
        )
    breakdown = CostBreakdown(purchase, holding, container, shortage)
    return breakdown, breakdown.total - revenue, revenue


def solve(inst: ReplenishmentInstance, opts: SolverOptions | None = None) -> ReplenishmentPlan:
    opts = opts or SolverOptions()
    (lay, start, demand, cost, a_eq, b_eq, a_ub, b_ub,
     lower, upper, integrality) = _assemble(inst, opts)

    constraints = [
        LinearConstraint(a_eq, b_eq, b_eq),
        LinearConstraint(a_ub, -np.inf, b_ub),
    ]
    relaxation = linprog(
        cost,
        A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
        bounds=np.column_stack([lower, upper]),
        method="highs",
    )
    if relaxation.status == 2:
        raise Infeasible("continuous relaxation is infeasible")

    options = {"mip_rel_gap": opts.gap, "presolve": True, "disp": False}
    if opts.time_limit is not None:
        options["time_limit"] = opts.time_limit
    result = milp(
        cost,
        constraints=constraints,
        bounds=Bounds(lower, upper),
        integrality=integrality,
        options=options,
    )
    if result.status == 2:
        raise Infeasible(result.message)
    if result.x is None:
        if result.status == 1:
            raise TimeLimitNoIncumbent(result.message)
        raise ConfigError(f"solver failed: {result.message}")
    status = SolverStatus.OPTIMAL if result.status == 0 else SolverStatus.GAP_LIMIT

    q, u, n, inv, istart = _extract(inst, lay, start, demand, result.x)
    breakdown, objective, revenue = _account(inst, opts, q, u, n, inv, demand)

    # the relaxation bound must never exceed the integer objective
    lp_bound = float(relaxation.fun)
    price_const = 0
    if opts.objective == "profit":
        price_const = sum(
            inst.unit_price[i] * demand[i][t]
            for i in range(inst.size) for t in range(inst.horizon)
        )
    assert lp_bound <= objective + price_const + 1e-6 * max(
        1.0, abs(objective + price_const)
    ), "relaxation bound above integer objective"

    flags = tuple(tuple(v > 0 for v in row) for row in q)
    return ReplenishmentPlan(
        orders=tuple(tuple(row) for row in q),
        order_flags=flags,
        containers=tuple(n),
        inventory=tuple(tuple(row) for row in inv),
        shortages=tuple(tuple(row) for row in u),
        start_inventory=tuple(istart),
        objective=objective,
        cost_breakdown=breakdown,
        solver_status=status,
        revenue=revenue,
        lp_bound=lp_bound - price_const,
    )
