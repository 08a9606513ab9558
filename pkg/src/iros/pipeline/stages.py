"""Pipeline stages, each a pure function over run-directory artifacts.

A stage reads the artifacts earlier stages wrote, computes, writes its own
files, and returns the relative paths it produced. It never mutates
earlier artifacts, so a run directory is append-only and any prefix of
the stage order is a valid partial run.
"""

from __future__ import annotations

import shutil
from pathlib import Path

import numpy as np

from ..anomaly import Detector, DetectorConfig, detect, dominant_period
from ..cluster import KChoice, PriorityMap, choose_k, kmeans, pca_fit, pca_project, prioritize
from ..core import Dataset, load_dataset, snapshot
from ..demand import (
    AggregationLevel,
    DemandSeries,
    ExceptionResolution,
    ResolutionAction,
    apply_resolutions,
    consolidate,
)
from ..errors import (
    ConfigError,
    DegenerateMatrix,
    DegenerateSeries,
    EmptyHistory,
    HistoryTooShort,
    Infeasible,
    TooFew,
    TooShort,
)
from ..features import FEATURE_NAMES, extract_features, scale_matrix
from ..forecast import (
    EnsembleSpec,
    ForecastModelSpec,
    apply_signals,
    make_forecast,
    rolling_origin_cv,
    shortlist_by_cluster,
)
from ..replenish import (
    CostBreakdown,
    InstanceOptions,
    PlanMode,
    ReplenishmentInstance,
    ReplenishmentPlan,
    SkuGroup,
    SolverOptions,
    SolverStatus,
    build_instance,
    group_skus,
    solve,
    summarize_orders,
)
from .artifacts import (
    read_csv,
    read_json,
    read_resolutions,
    read_series,
    read_signals,
    spec_from_obj,
    spec_to_obj,
    write_csv,
    write_json,
    write_series,
)
from .config import PipelineConfig

# run_all executes these in order; CLI subcommands map onto prefixes
STAGE_ORDER = (
    "ingest",
    "consolidate",
    "exceptions",
    "prioritize",
    "features",
    "cluster",
    "shortlist",
    "tune",
    "forecast",
    "group",
    "plan",
    "summarize",
)


def _spec(family: str, **params) -> ForecastModelSpec:
    return ForecastModelSpec.make(family, **params)


def default_roster(period: int) -> list[ForecastModelSpec]:
    """Candidate models offered to every cluster shortlist."""
    roster = [
        _spec("naive_last"),
        _spec("mean"),
        _spec("ses"),
        _spec("holt"),
        _spec("damped_holt"),
        _spec("theta"),
        _spec("croston", alpha=0.1),
        _spec("croston_opt"),
        _spec("sba", alpha=0.1),
        _spec("tsb", alpha=0.1, beta=0.1),
    ]
    if period > 1:
        roster += [
            _spec("naive_seasonal", period=period),
            _spec("naive2", period=period),
            _spec("ets_grid", period=period),
        ]
    return roster


def report_roster(period: int) -> list[ForecastModelSpec]:
    """Fast fixed roster for fleet-wide model comparison reports."""
    roster = [
        _spec("naive_last"),
        _spec("ses"),
        _spec("holt"),
        _spec("damped_holt"),
        _spec("theta"),
        _spec("croston", alpha=0.1),
        _spec("sba", alpha=0.1),
        _spec("tsb", alpha=0.1, beta=0.1),
    ]
    if period > 1:
        roster += [_spec("naive_seasonal", period=period), _spec("naive2", period=period)]
    return roster


# --- stage implementations ---------------------------------------------------

def stage_ingest(cfg: PipelineConfig, run: Path) -> list[str]:
    """Copy source data into the run and rewrite it in canonical form."""
    dataset_dir = run / "dataset"
    dataset_dir.mkdir(parents=True, exist_ok=True)
    for name, src in cfg.data_paths().items():
        if name == "signals.csv":
            shutil.copyfile(src, run / "signals.csv")
            continue
        if not Path(src).is_file():
            raise ConfigError(f"data file not found: {src}")
        shutil.copyfile(src, dataset_dir / name)
    ds = load_dataset(dataset_dir)
    snapshot(ds, dataset_dir)  # normalize ordering and number rendering
    out = [f"dataset/{n}" for n in ("skus.csv", "suppliers.csv", "orders.csv", "demand.csv")]
    if cfg.signals_path is not None:
        out.append("signals.csv")
    return out


def _load(run: Path) -> Dataset:
    return load_dataset(run / "dataset")


def stage_consolidate(cfg: PipelineConfig, run: Path) -> list[str]:
    ds = _load(run)
    series = []
    skipped = []
    for sku_id in sorted(ds.skus):
        try:
            series.append(consolidate(ds, sku_id, cfg.aggregation_level, cfg.include_quotes))
        except EmptyHistory:
            skipped.append(sku_id)
    write_series(run / "series.csv", series)
    write_json(run / "consolidate_notes.json", {"skipped": skipped})
    return ["series.csv", "consolidate_notes.json"]


def _pick_detector(cfg: PipelineConfig, values) -> Detector:
    if cfg.detector != "auto":
        return Detector(cfg.detector)
    return Detector.SEASONAL if dominant_period(values) else Detector.AR


def stage_exceptions(cfg: PipelineConfig, run: Path) -> list[str]:
    series = read_series(run / "series.csv", cfg.aggregation_level)
    # step runs leave user decisions here; they apply before detection so a
    # reduced bucket is not re-flagged
    res_path = run / "resolutions_effective.csv"
    user_rs = read_resolutions(res_path) if res_path.is_file() else []
    covered = {(r.sku_id, r.bucket_index) for r in user_rs}
    rows = []
    resolutions: list[ExceptionResolution] = []
    adjusted = []
    unscored = []
    for sku_id in sorted(series):
        s = series[sku_id]
        own = [r for r in user_rs if r.sku_id == sku_id]
        if own:
            s = apply_resolutions(s, own)
        try:
            report = detect(s, _pick_detector(cfg, s.values), DetectorConfig())
            scores, flags = report.scores, report.flags
        except (TooShort, DegenerateSeries):
            scores, flags = (0.0,) * len(s.values), (False,) * len(s.values)
            unscored.append(sku_id)
        for i, (score, flag) in enumerate(zip(scores, flags)):
            rows.append([sku_id, i, float(score), bool(flag)])
        if cfg.exception_policy == "auto_reduce":
            # a bucket someone already ruled on is not reduced again
            resolutions.extend(
                ExceptionResolution(sku_id, i, ResolutionAction.REDUCE_FRACTION,
                                    cfg.reduce_fraction)
                for i, flag in enumerate(flags)
                if flag and (sku_id, i) not in covered
            )
            adjusted.append(apply_resolutions(s, [r for r in resolutions
                                                  if r.sku_id == sku_id]))
        else:
            adjusted.append(s)
    write_csv(run / "exceptions.csv", ["sku_id", "bucket_index", "score", "flagged"], rows)
    write_series(run / "demand_adjusted.csv", adjusted)
    write_json(run / "exception_notes.json", {
        "policy": cfg.exception_policy,
        "auto_resolved": [[r.sku_id, r.bucket_index] for r in resolutions],
        "unscored": unscored,
    })
    return ["exceptions.csv", "demand_adjusted.csv", "exception_notes.json"]


def stage_prioritize(cfg: PipelineConfig, run: Path) -> list[str]:
    ds = _load(run)
    pm = prioritize(ds, k=cfg.priority_k, service_levels=cfg.service_levels,
                    seed=cfg.seed("priority"))
    rows = [
        [sku_id, pm.assignments[sku_id], pm.service_levels[pm.assignments[sku_id]]]
        for sku_id in sorted(pm.assignments)
    ]
    write_csv(run / "priority.csv", ["sku_id", "cluster_label", "service_level"], rows)
    return ["priority.csv"]


def stage_features(cfg: PipelineConfig, run: Path) -> list[str]:
    adjusted = read_series(run / "demand_adjusted.csv", cfg.aggregation_level)
    rows = []
    skipped = []
    for sku_id in sorted(adjusted):
        try:
            fv = extract_features(adjusted[sku_id].values, cfg.seasonal_period,
                                  sku_id=sku_id)
        except TooShort:
            skipped.append(sku_id)
            continue
        rows.append([sku_id, *fv.values()])
    write_csv(run / "features.csv", ["sku_id", *FEATURE_NAMES], rows)
    write_json(run / "feature_notes.json", {"skipped": skipped})
    return ["features.csv", "feature_notes.json"]


def _feature_rows(run: Path) -> tuple[list[str], np.ndarray]:
    raw = read_csv(run / "features.csv", ["sku_id", *FEATURE_NAMES])
    sku_ids = [row["sku_id"] for row in raw]
    X = np.array([[float(row[name]) for name in FEATURE_NAMES] for row in raw])
    return sku_ids, X


def stage_cluster(cfg: PipelineConfig, run: Path) -> list[str]:
    sku_ids, X = _feature_rows(run)
    if not sku_ids:
        write_csv(run / "series_clusters.csv", ["sku_id", "cluster"], [])
        return ["series_clusters.csv"]
    scaled = scale_matrix(X)
    try:
        model = pca_fit(scaled)
        projected = pca_project(model, scaled)
    except DegenerateMatrix:
        projected = scaled
    n = len(sku_ids)
    if cfg.cluster_k:
        k = min(cfg.cluster_k, n)
    elif n < 4:
        k = 1
    else:
        k = choose_k(projected, KChoice.INERTIA_ELBOW,
                     list(range(2, min(6, n - 1) + 1)), seed=cfg.seed("cluster"))
    asg = kmeans(projected, k, seed=cfg.seed("cluster"))
    rows = sorted(zip(sku_ids, asg.labels), key=lambda r: r[0])
    write_csv(run / "series_clusters.csv", ["sku_id", "cluster"],
              [[sku, int(lab)] for sku, lab in rows])
    return ["series_clusters.csv"]


def _cluster_map(run: Path) -> dict[str, int]:
    return {
        row["sku_id"]: int(row["cluster"])
        for row in read_csv(run / "series_clusters.csv", ["sku_id", "cluster"])
    }


_FALLBACK_SHORTLIST = [_spec("ses"), _spec("naive_last")]


def stage_shortlist(cfg: PipelineConfig, run: Path) -> list[str]:
    adjusted = read_series(run / "demand_adjusted.csv", cfg.aggregation_level)
    clusters = _cluster_map(run)
    members: dict[int, list[DemandSeries]] = {}
    for sku_id, cluster in sorted(clusters.items()):
        members.setdefault(cluster, []).append(adjusted[sku_id])
    roster = default_roster(cfg.seasonal_period)
    out = {}
    for cluster in sorted(members):
        group = members[cluster]
        try:
            sl = shortlist_by_cluster(
                group, roster, sample_size=min(cfg.shortlist_sample, len(group)),
                seed=cfg.seed("shortlist"), folds=cfg.cv_folds,
            )
        except (TooFew, HistoryTooShort):
            sl = _FALLBACK_SHORTLIST
        out[str(cluster)] = [spec_to_obj(s) for s in sl]
    # SKUs whose history was too short for features use a fixed shortlist
    out["fallback"] = [spec_to_obj(s) for s in _FALLBACK_SHORTLIST]
    write_json(run / "shortlist.json", out)
    return ["shortlist.json"]


def _subset_candidates(shortlist) -> list[ForecastModelSpec | EnsembleSpec]:
    """All nonempty subsets, singles plus mean ensembles (ensemble search space)."""
    out: list[ForecastModelSpec | EnsembleSpec] = []
    n = len(shortlist)
    for mask in range(1, 2 ** n):
        subset = tuple(shortlist[i] for i in range(n) if mask >> i & 1)
        out.append(subset[0] if len(subset) == 1 else EnsembleSpec(subset))
    return out


def stage_tune(cfg: PipelineConfig, run: Path) -> list[str]:
    adjusted = read_series(run / "demand_adjusted.csv", cfg.aggregation_level)
    clusters = _cluster_map(run)
    shortlists = {key: [spec_from_obj(o) for o in objs]
                  for key, objs in read_json(run / "shortlist.json").items()}
    models = {}
    cv_rows = []
    for sku_id in sorted(adjusted):
        s = adjusted[sku_id]
        cluster = clusters.get(sku_id)
        shortlist = shortlists[str(cluster)] if cluster is not None else shortlists["fallback"]
        if not any(s.values):
            models[sku_id] = {"model": spec_to_obj(_spec("naive_last")),
                              "cv_mase": None, "cluster": cluster}
            continue
        try:
            report = rolling_origin_cv(s, _subset_candidates(shortlist),
                                       folds=cfg.cv_folds, horizon_per_fold=1)
            chosen = report.best()
            score = report.median(chosen)
        except (HistoryTooShort, TooFew):
            chosen, score = _spec("ses"), None
        models[sku_id] = {"model": spec_to_obj(chosen),
                          "cv_mase": score, "cluster": cluster}
        if score is not None:
            for spec, folds in report.scores:
                cv_rows.append([sku_id, spec.describe(), float(np.median(folds))])
    write_json(run / "models.json", models)
    write_csv(run / "cv_scores.csv", ["sku_id", "model", "median_mase"], cv_rows)
    return ["models.json", "cv_scores.csv"]


def stage_forecast(cfg: PipelineConfig, run: Path, overrides=None) -> list[str]:
    """Point forecasts per SKU; overrides carry prior-run forecasts for SKUs
    whose deviations are still awaiting a manual decision."""
    ds = _load(run)
    adjusted = read_series(run / "demand_adjusted.csv", cfg.aggregation_level)
    models = read_json(run / "models.json")
    signals = []
    if (run / "signals.csv").is_file():
        signals = read_signals(run / "signals.csv")
    rows = []
    meta = {}
    plan_start = ds.as_of.toordinal() + 1
    for sku_id in sorted(ds.skus):
        if overrides and sku_id in overrides:
            points, desc, sigma, model_obj = overrides[sku_id]
            clamped = False
            for t, value in enumerate(points):
                rows.append([sku_id, t, float(value), desc, clamped])
            meta[sku_id] = {"model": model_obj, "sigma": sigma,
                            "plan_start_ordinal": plan_start, "horizon": cfg.horizon}
            continue
        if sku_id in models and sku_id in adjusted:
            spec = spec_from_obj(models[sku_id]["model"])
            result = make_forecast(spec, adjusted[sku_id], cfg.horizon, sku_id=sku_id)
            own = [sig for sig in signals if sig.sku_id == sku_id]
            if own:
                result = apply_signals(result, own)
            points, desc = result.point, result.model.describe()
            clamped, sigma = result.clamped, result.insample_sigma
        else:
            # no demand history at all: plan for zero
            points, desc, clamped, sigma = (0.0,) * cfg.horizon, "naive_last", False, 0.0
        for t, value in enumerate(points):
            rows.append([sku_id, t, float(value), desc, clamped])
        meta[sku_id] = {"model": models.get(sku_id, {}).get("model"),
                        "sigma": sigma, "plan_start_ordinal": plan_start,
                        "horizon": cfg.horizon}
    write_csv(run / "forecast.csv",
              ["sku_id", "bucket_index", "value", "model", "clamped"], rows)
    write_json(run / "forecast_meta.json", meta)
    return ["forecast.csv", "forecast_meta.json"]


def stage_group(cfg: PipelineConfig, run: Path) -> list[str]:
    ds = _load(run)
    groups = group_skus(ds)
    write_json(run / "groups.json", [
        {"group_id": g.group_id, "supplier_id": g.supplier_id, "sku_ids": list(g.sku_ids)}
        for g in groups
    ])
    return ["groups.json"]


def load_priority(run: Path) -> PriorityMap:
    assignments = {}
    service = {}
    for row in read_csv(run / "priority.csv", ["sku_id", "cluster_label", "service_level"]):
        assignments[row["sku_id"]] = row["cluster_label"]
        service[row["cluster_label"]] = float(row["service_level"])
    return PriorityMap(assignments=assignments, service_levels=service,
                       cluster_means={}, criteria_names=())


def load_forecast_points(run: Path) -> dict[str, tuple[float, ...]]:
    by_sku: dict[str, list[tuple[int, float]]] = {}
    for row in read_csv(run / "forecast.csv",
                        ["sku_id", "bucket_index", "value", "model", "clamped"]):
        by_sku.setdefault(row["sku_id"], []).append(
            (int(row["bucket_index"]), float(row["value"]))
        )
    return {sku: tuple(v for _, v in sorted(points)) for sku, points in by_sku.items()}


def instance_options(cfg: PipelineConfig) -> InstanceOptions:
    return InstanceOptions(
        horizon=cfg.horizon,
        holding_rate=cfg.holding_rate,
        min_fill=cfg.min_fill,
        shortage_multiplier=cfg.shortage_multiplier,
        level=cfg.aggregation_level,
    )


def instance_to_obj(inst: ReplenishmentInstance) -> dict:
    return {
        "group_id": inst.group.group_id,
        "supplier_id": inst.group.supplier_id,
        "sku_ids": list(inst.group.sku_ids),
        "horizon": inst.horizon,
        "demand": [list(r) for r in inst.demand],
        "unit_cost": list(inst.unit_cost),
        "unit_price": list(inst.unit_price),
        "holding_rate": inst.holding_rate,
        "container_cost": inst.container_cost,
        "unit_volume": list(inst.unit_volume),
        "unit_mass": list(inst.unit_mass),
        "volume_cap": inst.volume_cap,
        "mass_cap": inst.mass_cap,
        "moq": list(inst.moq),
        "lead_time": inst.lead_time,
        "init_inventory": list(inst.init_inventory),
        "init_backorders": list(inst.init_backorders),
        "arrivals": [list(r) for r in inst.arrivals],
        "service_level": list(inst.service_level),
        "shortage_penalty": list(inst.shortage_penalty),
        "mode": inst.mode.value,
        "min_fill": inst.min_fill,
    }


def instance_from_obj(obj: dict) -> ReplenishmentInstance:
    return ReplenishmentInstance(
        group=SkuGroup(obj["group_id"], obj["supplier_id"], tuple(obj["sku_ids"])),
        horizon=obj["horizon"],
        demand=tuple(tuple(r) for r in obj["demand"]),
        unit_cost=tuple(obj["unit_cost"]),
        unit_price=tuple(obj["unit_price"]),
        holding_rate=obj["holding_rate"],
        container_cost=obj["container_cost"],
        unit_volume=tuple(obj["unit_volume"]),
        unit_mass=tuple(obj["unit_mass"]),
        volume_cap=obj["volume_cap"],
        mass_cap=obj["mass_cap"],
        moq=tuple(obj["moq"]),
        lead_time=obj["lead_time"],
        init_inventory=tuple(obj["init_inventory"]),
        init_backorders=tuple(obj["init_backorders"]),
        arrivals=tuple(tuple(r) for r in obj["arrivals"]),
        service_level=tuple(obj["service_level"]),
        shortage_penalty=tuple(obj["shortage_penalty"]),
        mode=PlanMode(obj["mode"]),
        min_fill=obj["min_fill"],
    )


def plan_to_obj(group_id: str, plan: ReplenishmentPlan, sku_ids) -> dict:
    orders = []
    shortages = []
    inventory = []
    for i, sku_id in enumerate(sku_ids):
        for t in range(len(plan.containers)):
            if plan.orders[i][t] > 0:
                orders.append({"sku_id": sku_id, "period": t,
                               "quantity": plan.orders[i][t],
                               "flagged": plan.order_flags[i][t]})
            if plan.shortages[i][t] > 0:
                shortages.append({"sku_id": sku_id, "period": t,
                                  "quantity": plan.shortages[i][t]})
            inventory.append({"sku_id": sku_id, "period": t,
                              "level": plan.inventory[i][t]})
    bd = plan.cost_breakdown
    return {
        "group_id": group_id,
        "status": plan.solver_status.value,
        "objective_minor_units": plan.objective,
        "revenue_minor_units": plan.revenue,
        "lp_bound": None if np.isnan(plan.lp_bound) else plan.lp_bound,
        "cost_breakdown": {"purchase": bd.purchase, "holding": bd.holding,
                           "container": bd.container, "shortage": bd.shortage,
                           "total": bd.total},
        "orders": orders,
        "containers": [
            {"period": t, "count": plan.containers[t]}
            for t in range(len(plan.containers)) if plan.containers[t] > 0
        ],
        "inventory": inventory,
        "shortages": shortages,
        "start_inventory": list(plan.start_inventory),
    }


def plan_from_obj(obj: dict, inst: ReplenishmentInstance) -> ReplenishmentPlan:
    n, h = inst.size, inst.horizon
    index = {sku: i for i, sku in enumerate(inst.group.sku_ids)}
    orders = [[0] * h for _ in range(n)]
    flags = [[False] * h for _ in range(n)]
    for entry in obj["orders"]:
        orders[index[entry["sku_id"]]][entry["period"]] = entry["quantity"]
        flags[index[entry["sku_id"]]][entry["period"]] = entry["flagged"]
    inventory = [[0] * h for _ in range(n)]
    for entry in obj["inventory"]:
        inventory[index[entry["sku_id"]]][entry["period"]] = entry["level"]
    shortages = [[0] * h for _ in range(n)]
    for entry in obj["shortages"]:
        shortages[index[entry["sku_id"]]][entry["period"]] = entry["quantity"]
    containers = [0] * h
    for entry in obj["containers"]:
        containers[entry["period"]] = entry["count"]
    bd = obj["cost_breakdown"]
    return ReplenishmentPlan(
        orders=tuple(tuple(r) for r in orders),
        order_flags=tuple(tuple(r) for r in flags),
        containers=tuple(containers),
        inventory=tuple(tuple(r) for r in inventory),
        shortages=tuple(tuple(r) for r in shortages),
        start_inventory=tuple(obj["start_inventory"]),
        objective=obj["objective_minor_units"],
        cost_breakdown=CostBreakdown(purchase=bd["purchase"], holding=bd["holding"],
                                     container=bd["container"], shortage=bd["shortage"]),
        solver_status=SolverStatus(obj["status"]),
        revenue=obj["revenue_minor_units"],
        lp_bound=float("nan") if obj["lp_bound"] is None else obj["lp_bound"],
    )


def stage_plan(cfg: PipelineConfig, run: Path) -> list[str]:
    ds = _load(run)
    priority = load_priority(run)
    forecasts = load_forecast_points(run)
    groups = [SkuGroup(g["group_id"], g["supplier_id"], tuple(g["sku_ids"]))
              for g in read_json(run / "groups.json")]
    options = instance_options(cfg)
    solver = SolverOptions(gap=cfg.gap, time_limit=cfg.time_limit,
                           objective=cfg.objective)
    instances = []
    plans = []
    for group in groups:
        inst = build_instance(group, forecasts, priority, ds,
                              mode=PlanMode(cfg.plan_mode), options=options)
        instances.append(instance_to_obj(inst))
        try:
            plan = solve(inst, solver)
        except Infeasible as exc:
            plans.append({"group_id": group.group_id, "status": "infeasible",
                          "detail": str(exc)})
            continue
        plans.append(plan_to_obj(group.group_id, plan, group.sku_ids))
    write_json(run / "instances.json", instances)
    write_json(run / "plan.json", plans)
    return ["instances.json", "plan.json"]


def stage_summarize(cfg: PipelineConfig, run: Path) -> list[str]:
    instances = {obj["group_id"]: instance_from_obj(obj)
                 for obj in read_json(run / "instances.json")}
    groups_out = []
    fleet_total = 0
    objective_total = 0
    for obj in read_json(run / "plan.json"):
        group_id = obj["group_id"]
        if obj["status"] == "infeasible":
            groups_out.append({"group_id": group_id, "status": "infeasible",
                               "entries": [], "total_cost": 0})
            continue
        inst = instances[group_id]
        plan = plan_from_obj(obj, inst)
        summary = summarize_orders(plan, inst, review_period=cfg.order_frequency)
        entries = [
            {
                "period": e.period,
                "urgent": e.urgent,
                "containers": e.containers,
                "volume_util_pct": e.volume_util_pct,
                "mass_util_pct": e.mass_util_pct,
                "total_cost": e.total_cost,
                "lines": [{"sku_id": line.sku_id, "units": line.units,
                           "line_cost": line.line_cost} for line in e.lines],
            }
            for e in summary.entries
        ]
        groups_out.append({"group_id": group_id, "status": obj["status"],
                           "entries": entries, "total_cost": summary.total_cost})
        fleet_total += summary.total_cost
        objective_total += obj["objective_minor_units"]
    write_json(run / "summary.json", {
        "groups": groups_out,
        "fleet_order_cost": fleet_total,
        "fleet_objective": objective_total,
    })
    return ["summary.json"]


STAGES = {
    "ingest": stage_ingest,
    "consolidate": stage_consolidate,
    "exceptions": stage_exceptions,
    "prioritize": stage_prioritize,
    "features": stage_features,
    "cluster": stage_cluster,
    "shortlist": stage_shortlist,
    "tune": stage_tune,
    "forecast": stage_forecast,
    "group": stage_group,
    "plan": stage_plan,
    "summarize": stage_summarize,
}
