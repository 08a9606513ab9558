import pytest

from iros.errors import ConfigError, Infeasible
from iros.replenish import (
    PlanMode,
    ReplenishmentInstance,
    SkuGroup,
    SolverOptions,
    check_feasibility,
    minimal_containers,
    simulate_orders,
    solve,
)

from test_replenish_solver import make_inst, random_instance


# --- container counting ------------------------------------------------------

def test_no_orders_need_no_containers():
    inst = make_inst([[5, 5]], vol_cap=10.0, mass_cap=10.0)
    assert minimal_containers(inst, [0]) == 0


def test_volume_driven_container_count():
    inst = make_inst([[5, 5]], vol=2.0, mass=1.0, vol_cap=10.0, mass_cap=100.0)
    assert minimal_containers(inst, [7]) == 2


def test_mass_driven_container_count():
    inst = make_inst([[5, 5]], vol=1.0, mass=5.0, vol_cap=100.0, mass_cap=12.0)
    assert minimal_containers(inst, [5]) == 3


def test_exact_capacity_fits_one_container():
    inst = make_inst([[5, 5]], vol=2.0, mass=2.0, vol_cap=10.0, mass_cap=10.0)
    assert minimal_containers(inst, [5]) == 1


def test_tiny_order_still_ships_a_container():
    inst = make_inst([[5, 5]], vol=0.001, mass=0.001, vol_cap=10.0, mass_cap=10.0)
    assert minimal_containers(inst, [1]) == 1


# --- order simulation ---------------------------------------------------------

def test_operational_simulation_traces_inventory_by_hand():
    inst = make_inst([[3, 1, 2]], i0=2, arrivals=[[0, 2, 0]], lead=1, service=0.5)
    inventory, shortages, start, cyclic_ok = simulate_orders(inst, [[1, 0, 4]])
    assert start == [2]
    assert inventory == [[0, 2, 0]]
    assert shortages == [[1, 0, 0]]
    assert cyclic_ok is True


def test_backorders_fold_into_first_period_demand():
    inst = make_inst([[2, 2]], i0=1, b0=4)
    inventory, shortages, start, _ = simulate_orders(inst, [[5, 2]])
    assert start == [0]
    assert inventory == [[0, 0]]
    assert shortages == [[0, 0]]


def test_equilibrium_simulation_finds_the_cyclic_start():
    inst = make_inst([[3, 1]], lead=1, mode=PlanMode.EQUILIBRIUM)
    inventory, shortages, start, cyclic_ok = simulate_orders(inst, [[1, 3]])
    assert cyclic_ok is True
    assert start == [0]
    assert inventory == [[0, 0]]
    assert shortages == [[0, 0]]
    assert inventory[0][-1] == start[0]


def test_equilibrium_oversupply_has_no_steady_state():
    inst = make_inst([[3, 1]], lead=1, mode=PlanMode.EQUILIBRIUM, service=0.5)
    *_, cyclic_ok = simulate_orders(inst, [[3, 3]])
    assert cyclic_ok is False


# --- feasibility checking -----------------------------------------------------

def test_solver_output_always_passes_the_checker():
    checked = 0
    for seed in range(50):
        inst = random_instance(seed)
        try:
            plan = solve(inst, SolverOptions(gap=0.0))
        except Infeasible:
            continue
        report = check_feasibility(inst, plan.orders)
        assert report.feasible, (seed, report.violations)
        checked += 1
    # the fill rule makes many random instances infeasible; 20 of 50 solve
    assert checked == 20


def test_order_below_moq_is_flagged():
    # loose service level so the early shortage itself is not a violation
    inst = make_inst([[10, 10]], moq=5, service=0.5)
    report = check_feasibility(inst, [[3, 17]])
    assert not report.feasible
    kinds = [v.kind for v in report.violations]
    assert kinds == ["moq"]
    violation = report.violations[0]
    assert violation.period == 0
    assert violation.sku_id == "S0"
    assert violation.slack == 2.0


def test_splitting_a_consolidated_order_breaks_the_fill_rule():
    inst = make_inst([[5, 5]], vol_cap=10.0, min_fill=0.9)
    plan = solve(inst)
    assert check_feasibility(inst, plan.orders).feasible
    report = check_feasibility(inst, [[5, 5]])
    kinds = [v.kind for v in report.violations]
    assert kinds == ["container_fill", "container_fill"]
    assert report.violations[0].slack == pytest.approx(4.0)


def test_dropping_orders_breaks_the_service_floor():
    inst = make_inst([[4, 0]])
    report = check_feasibility(inst, [[0, 0]])
    assert [v.kind for v in report.violations] == ["service_level"]
    violation = report.violations[0]
    assert violation.sku_id == "S0"
    assert violation.slack == pytest.approx(4.0)


def test_partial_shortage_within_allowance_is_fine():
    inst = make_inst([[4, 0]], service=0.5)
    report = check_feasibility(inst, [[2, 0]])
    assert report.feasible


def test_equilibrium_oversupply_is_flagged_as_cyclic_imbalance():
    inst = make_inst([[3, 1]], lead=1, mode=PlanMode.EQUILIBRIUM, service=0.5)
    report = check_feasibility(inst, [[3, 3]])
    assert "cyclic_balance" in [v.kind for v in report.violations]


def test_edits_can_violate_several_rules_at_once():
    inst = make_inst([[10, 10]], moq=5, vol_cap=30.0, min_fill=0.9)
    report = check_feasibility(inst, [[3, 0]])
    kinds = sorted(v.kind for v in report.violations)
    assert kinds == ["container_fill", "moq", "service_level"]


def test_checker_rejects_malformed_order_grids():
    inst = make_inst([[10, 10]])
    with pytest.raises(ConfigError):
        check_feasibility(inst, [[10, 10], [0, 0]])
    with pytest.raises(ConfigError):
        check_feasibility(inst, [[10]])
    with pytest.raises(ConfigError):
        check_feasibility(inst, [[-1, 10]])
    with pytest.raises(ConfigError):
        check_feasibility(inst, [[1.5, 10]])


def test_whole_valued_floats_are_accepted():
    inst = make_inst([[10, 10]])
    assert check_feasibility(inst, [[10.0, 10.0]]).feasible


# --- instance validation -------------------------------------------------------

def test_instance_rejects_bad_shapes_and_ranges():
    good = dict(
        group=SkuGroup("g", "g", ("S0",)),
        horizon=2,
        demand=((1, 1),),
        unit_cost=(10,),
        unit_price=(15,),
        holding_rate=0.02,
        container_cost=0,
        unit_volume=(1.0,),
        unit_mass=(1.0,),
        volume_cap=10.0,
        mass_cap=10.0,
        moq=(1,),
        lead_time=0,
        init_inventory=(0,),
        init_backorders=(0,),
        arrivals=((0, 0),),
        service_level=(1.0,),
        shortage_penalty=(40,),
        mode=PlanMode.OPERATIONAL,
        min_fill=0.0,
    )
    ReplenishmentInstance(**good)
    bad_cases = [
        dict(horizon=0),
        dict(lead_time=2),
        dict(demand=((1,),)),
        dict(demand=((1, -1),)),
        dict(unit_cost=(10, 20)),
        dict(service_level=(0.0,)),
        dict(service_level=(1.2,)),
        dict(min_fill=1.5),
        dict(moq=(-1,)),
        dict(volume_cap=0.0),
        dict(holding_rate=-0.1),
    ]
    for overrides in bad_cases:
        with pytest.raises(ConfigError):
            ReplenishmentInstance(**{**good, **overrides})


def test_sku_groups_must_be_nonempty_and_unique():
    with pytest.raises(ConfigError):
        SkuGroup("g", "g", ())
    with pytest.raises(ConfigError):
        SkuGroup("g", "g", ("A", "A"))


def test_solver_options_are_validated():
    with pytest.raises(ConfigError):
        SolverOptions(gap=-0.1)
    with pytest.raises(ConfigError):
        SolverOptions(time_limit=0.0)
    with pytest.raises(ConfigError):
        SolverOptions(objective="margin")
