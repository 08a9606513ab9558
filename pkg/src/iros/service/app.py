"""HTTP API for reviewing, editing, validating, and confirming plans.

The service sits on top of the latest completed run: read endpoints
serve its artifacts unchanged, session mutations live in files next to
them, and confirmations append to the source orders.csv so the next
ingest sees them. All request handling is synchronous; a store-wide
lock serializes mutations, which is plenty for a single-operator tool.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..core import OrderRecord, OrderStatus, load_dataset, upsert_records
from ..demand import AggregationLevel, bucket_date, bucket_index
from ..errors import Infeasible, IrosError
from ..pipeline.artifacts import read_csv, read_json, read_series, spec_from_obj
from ..pipeline.config import PipelineConfig
from ..pipeline.runner import latest_completed
from ..pipeline.stages import instance_from_obj, load_forecast_points, plan_to_obj
from ..replenish import SolverOptions, check_feasibility, solve
from ..replenish.feasibility import minimal_containers
from .sessions import PlanSession, SessionStore

_ACTIONS = ("keep", "reduce_fraction", "replace")


class ApiError(Exception):
    """Maps directly onto the wire format {code, message, details}."""

    def __init__(self, status: int, code: str, message: str, details: dict | None = None):
        self.status = status
        self.code = code
        self.message = message
        self.details = details or {}
        super().__init__(message)


class RunView:
    """Read-mostly view over one completed run's artifacts."""

    def __init__(self, cfg: PipelineConfig, run: Path):
        self.cfg = cfg
        self.run = run
        self.level: AggregationLevel = cfg.aggregation_level
        self.store = SessionStore(run)
        self.plans = {o["group_id"]: o for o in read_json(run / "plan.json")}
        self.instances = {o["group_id"]: instance_from_obj(o)
                          for o in read_json(run / "instances.json")}
        self.groups = {g["group_id"]: g for g in read_json(run / "groups.json")}
        self.meta = read_json(run / "forecast_meta.json")
        self.series = read_series(run / "series.csv", self.level)
        self.points = load_forecast_points(run)
        self._flags: dict[str, list[bool]] | None = None

    def flags(self) -> dict[str, list[bool]]:
        if self._flags is None:
            out: dict[str, list[bool]] = {}
            for row in read_csv(self.run / "exceptions.csv",
                                ["sku_id", "bucket_index", "score", "flagged"]):
                out.setdefault(row["sku_id"], []).append(row["flagged"] == "true")
            self._flags = out
        return self._flags

    def require_group(self, group_id: str) -> None:
        if group_id not in self.plans:
            raise ApiError(404, "UnknownGroup", f"no plan group {group_id!r}",
                           {"group_id": group_id, "known": sorted(self.plans)})

    def require_optimal(self, group_id: str) -> None:
        self.require_group(group_id)
        if self.plans[group_id]["status"] != "optimal":
            raise ApiError(409, "PlanInfeasible",
                           f"group {group_id} has no feasible suggested plan",
                           {"group_id": group_id})

    def session(self, group_id: str) -> PlanSession:
        self.require_optimal(group_id)
        return self.store.get_or_create(group_id)

    def period_dates(self, group_id: str) -> list[dt.date]:
        inst = self.instances[group_id]
        sku = next(s for s in inst.group.sku_ids if s in self.series and s in self.meta)
        series = self.series[sku]
        start = dt.date.fromordinal(self.meta[sku]["plan_start_ordinal"])
        idx0 = bucket_index(start, series.start, self.level)
        return [bucket_date(series.start, self.level, idx0 + t, anchor=series.start)
                for t in range(inst.horizon + inst.lead_time + 1)]


def effective_quantities(view: RunView, session: PlanSession, group_id: str):
    """(base, current, urgent) quantity maps keyed by (sku_id, period)."""
    plan_obj = session.plan_override or view.plans[group_id]
    base: dict[tuple[str, int], int] = {}
    urgent: dict[tuple[str, int], bool] = {}
    for o in plan_obj["orders"]:
        base[(o["sku_id"], o["period"])] = o["quantity"]
        urgent[(o["sku_id"], o["period"])] = bool(o.get("flagged"))
    current = dict(base)
    for e in session.live_edits():
        key = (e["sku_id"], e["period"])
        if e["quantity"] > 0:
            current[key] = e["quantity"]
        else:
            current.pop(key, None)
    return base, current, urgent


def order_matrix(view: RunView, group_id: str,
                 quantities: dict[tuple[str, int], int]) -> list[list[int]]:
    inst = view.instances[group_id]
    return [[quantities.get((sku, t), 0) for t in range(inst.horizon)]
            for sku in inst.group.sku_ids]


def _report_obj(view: RunView, group_id: str, report) -> dict:
    inst = view.instances[group_id]
    moq = dict(zip(inst.group.sku_ids, inst.moq))
    violations = []
    for v in report.violations:
        if v.kind == "moq":
            msg = (f"{v.sku_id}: period {v.period} order is {v.slack:g} "
                   f"below the MOQ of {moq[v.sku_id]}")
        elif v.kind == "container_fill":
            msg = (f"period {v.period}: loaded volume is {v.slack:g} short of "
                   f"the {inst.min_fill:.0%} minimum container fill")
        elif v.kind == "service_level":
            msg = (f"{v.sku_id}: shortages exceed the service-level allowance "
                   f"by {v.slack:g} units")
        else:
            msg = "orders admit no steady-state inventory cycle"
        violations.append({
            "kind": v.kind,
            "sku_id": v.sku_id,
            "period": v.period,
            "slack": v.slack,
            "message": msg,
        })
    return {"feasible": report.feasible, "violations": violations}


def plan_view(view: RunView, session: PlanSession, group_id: str) -> dict:
    inst = view.instances[group_id]
    plan_obj = session.plan_override or view.plans[group_id]
    base, current, urgent = effective_quantities(view, session, group_id)
    unit_cost = dict(zip(inst.group.sku_ids, inst.unit_cost))
    unit_volume = dict(zip(inst.group.sku_ids, inst.unit_volume))
    unit_mass = dict(zip(inst.group.sku_ids, inst.unit_mass))
    moq = dict(zip(inst.group.sku_ids, inst.moq))
    dates = view.period_dates(group_id)
    edited_keys = {(e["sku_id"], e["period"]) for e in session.live_edits()}

    orders = []
    for sku, t in sorted(set(base) | set(current)):
        qty = current.get((sku, t), 0)
        orders.append({
            "sku_id": sku,
            "period": t,
            "date": dates[t].isoformat(),
            "quantity": qty,
            "base_quantity": base.get((sku, t), 0),
            "edited": (sku, t) in edited_keys,
            "urgent": urgent.get((sku, t), False),
            "moq": moq[sku],
            "unit_cost_minor_units": unit_cost[sku],
            "volume_util_pct": 100.0 * qty * unit_volume[sku] / inst.volume_cap,
            "mass_util_pct": 100.0 * qty * unit_mass[sku] / inst.mass_cap,
        })

    containers = []
    for t in range(inst.horizon):
        quantities = [current.get((sku, t), 0) for sku in inst.group.sku_ids]
        n = minimal_containers(inst, quantities)
        if n:
            containers.append({"period": t, "date": dates[t].isoformat(), "count": n})

    def _totals(qmap):
        return {
            "units": sum(qmap.values()),
            "order_cost_minor_units": sum(q * unit_cost[sku]
                                          for (sku, _), q in qmap.items()),
        }

    return {
        "session": {
            "session_id": session.session_id,
            "group_id": session.group_id,
            "run_id": session.run_id,
            "state": session.state,
            "revision": session.revision,
            "edits": session.edits,
            "last_report": session.last_report,
        },
        "plan": {
            "group_id": group_id,
            "supplier_id": view.groups[group_id]["supplier_id"],
            "status": plan_obj["status"],
            "reoptimized": session.plan_override is not None,
            "horizon": inst.horizon,
            "lead_time": inst.lead_time,
            "objective_minor_units": plan_obj["objective_minor_units"],
            "cost_breakdown": plan_obj["cost_breakdown"],
            "container_volume_cap": inst.volume_cap,
            "container_mass_cap": inst.mass_cap,
            "orders": orders,
            "containers": containers,
            "totals": _totals(current),
            "base_totals": _totals(base),
        },
    }


def _append_orders(path: Path, records: list[OrderRecord]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for r in records:
        writer.writerow([r.order_id, r.sku_id, str(r.quantity),
                         r.placed_date.isoformat(), r.arrival_date.isoformat(),
                         r.status.value])
    text = path.read_text(encoding="utf-8")
    if text and not text.endswith("\n"):
        text += "\n"
    path.write_text(text + buf.getvalue(), encoding="utf-8", newline="")


def _check_revision(session: PlanSession, payload: dict, required: bool) -> None:
    if "revision" not in payload:
        if required:
            raise ApiError(400, "MissingRevision",
                           "request must carry the session revision",
                           {"revision": session.revision})
        return
    given = payload["revision"]
    if given != session.revision:
        raise ApiError(409, "StaleRevision",
                       f"revision {given} is stale; session is at {session.revision}",
                       {"given": given, "current": session.revision})


def _guard_not_confirmed(session: PlanSession) -> None:
    if session.state == "confirmed":
        raise ApiError(409, "SessionConfirmed",
                       "confirmed sessions are immutable",
                       {"group_id": session.group_id})


def create_app(cfg: PipelineConfig, runs_root: Path) -> FastAPI:
    app = FastAPI(title="iros plan review", docs_url=None, redoc_url=None)
    runs_root = Path(runs_root)
    views: dict[str, RunView] = {}

    def current_view() -> RunView:
        run = latest_completed(runs_root)
        if run is None:
            raise ApiError(404, "NoCompletedRun",
                           f"no completed run under {runs_root}",
                           {"runs_root": str(runs_root)})
        if run.name not in views:
            views[run.name] = RunView(cfg, run)
        return views[run.name]

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return JSONResponse({"code": exc.code, "message": exc.message,
                             "details": exc.details}, status_code=exc.status)

    @app.exception_handler(RequestValidationError)
    async def _bad_body(request: Request, exc: RequestValidationError):
        return JSONResponse({"code": "BadRequest", "message": "malformed request body",
                             "details": {"errors": exc.errors()[:5]}}, status_code=400)

    # --- plans -----------------------------------------------------------

    @app.get("/api/plans")
    def list_plans():
        view = current_view()
        plans = []
        for group_id in sorted(view.plans):
            obj = view.plans[group_id]
            if obj["status"] != "optimal":
                plans.append({"group_id": group_id,
                              "supplier_id": view.groups[group_id]["supplier_id"],
                              "status": obj["status"], "state": None,
                              "revision": None, "orders": 0, "units": 0,
                              "order_cost_minor_units": 0})
                continue
            session = view.store.get_or_create(group_id)
            _, current, _ = effective_quantities(view, session, group_id)
            inst = view.instances[group_id]
            unit_cost = dict(zip(inst.group.sku_ids, inst.unit_cost))
            plans.append({
                "group_id": group_id,
                "supplier_id": view.groups[group_id]["supplier_id"],
                "status": obj["status"],
                "state": session.state,
                "revision": session.revision,
                "orders": len(current),
                "units": sum(current.values()),
                "order_cost_minor_units": sum(q * unit_cost[sku]
                                              for (sku, _), q in current.items()),
            })
        return {"run_id": view.run.name, "plans": plans}

    @app.get("/api/plans/{group_id}")
    def get_plan(group_id: str):
        view = current_view()
        session = view.session(group_id)
        return plan_view(view, session, group_id)

    @app.patch("/api/plans/{group_id}/orders")
    def patch_orders(group_id: str, payload: dict):
        view = current_view()
        with view.store.lock:
            session = view.session(group_id)
            _guard_not_confirmed(session)
            _check_revision(session, payload, required=True)
            edits = payload.get("orders")
            if not isinstance(edits, list) or not edits:
                raise ApiError(400, "BadQuantity", "orders must be a non-empty list",
                               {"orders": edits})
            inst = view.instances[group_id]
            for e in edits:
                if not isinstance(e, dict):
                    raise ApiError(400, "BadQuantity", "each edit must be an object", {})
                sku, period, qty = e.get("sku_id"), e.get("period"), e.get("quantity")
                if sku not in inst.group.sku_ids:
                    raise ApiError(400, "BadQuantity", f"unknown SKU {sku!r} in group",
                                   {"sku_id": sku})
                if not isinstance(period, int) or not 0 <= period < inst.horizon:
                    raise ApiError(400, "BadQuantity",
                                   f"period must be in [0, {inst.horizon}), got {period!r}",
                                   {"period": period})
                if not isinstance(qty, int) or isinstance(qty, bool) or qty < 0:
                    raise ApiError(400, "BadQuantity",
                                   f"quantity must be a nonnegative integer, got {qty!r}",
                                   {"quantity": qty})
            for e in edits:
                session.edits.append({
                    "sku_id": e["sku_id"], "period": e["period"],
                    "quantity": e["quantity"], "note": str(e.get("note", "")),
                })
            session.advance("edited")
            view.store.save(session)
            return plan_view(view, session, group_id)

    @app.post("/api/plans/{group_id}/validate")
    def validate_plan(group_id: str, payload: dict | None = None):
        view = current_view()
        with view.store.lock:
            session = view.session(group_id)
            _guard_not_confirmed(session)
            _check_revision(session, payload or {}, required=False)
            inst = view.instances[group_id]
            _, current, _ = effective_quantities(view, session, group_id)
            report = check_feasibility(inst, order_matrix(view, group_id, current))
            session.last_report = _report_obj(view, group_id, report)
            session.advance("validated_ok" if report.feasible else "validated_infeasible")
            view.store.save(session)
            return {"state": session.state, "revision": session.revision,
                    **session.last_report}

    @app.post("/api/plans/{group_id}/confirm")
    def confirm_plan(group_id: str, payload: dict | None = None):
        view = current_view()
        with view.store.lock:
            session = view.session(group_id)
            if session.state == "confirmed":
                raise ApiError(409, "SessionConfirmed", "session already confirmed",
                               {"group_id": group_id})
            if session.state == "validated_infeasible":
                raise ApiError(409, "Infeasible",
                               "current edits failed validation; fix them first",
                               {"report": session.last_report})
            if session.state != "validated_ok":
                raise ApiError(409, "NotValidated",
                               "confirm requires a validated_ok session",
                               {"state": session.state})
            _check_revision(session, payload or {}, required=False)

            inst = view.instances[group_id]
            _, current, _ = effective_quantities(view, session, group_id)
            dates = view.period_dates(group_id)
            records = []
            for (sku, t), qty in sorted(current.items()):
                if qty <= 0:
                    continue
                records.append(OrderRecord(
                    order_id=f"cnf-{view.run.name}-{group_id}-{sku}-t{t}",
                    sku_id=sku,
                    quantity=qty,
                    placed_date=dates[t],
                    arrival_date=dates[t + inst.lead_time],
                    status=OrderStatus.CONFIRMED,
                ))
            try:
                # referential cross-check against the run's dataset snapshot
                upsert_records(load_dataset(view.run / "dataset"), records)
            except IrosError as exc:
                raise ApiError(409, "ConfirmRejected", str(exc), {}) from exc
            _append_orders(cfg.orders_path, records)

            session.advance("confirmed")
            session.confirmed_order_ids = [r.order_id for r in records]
            view.store.save(session)
            return {
                "group_id": group_id,
                "state": session.state,
                "revision": session.revision,
                "order_ids": session.confirmed_order_ids,
                "orders_csv": str(cfg.orders_path),
            }

    @app.post("/api/plans/{group_id}/reoptimize")
    def reoptimize_plan(group_id: str, payload: dict | None = None):
        view = current_view()
        with view.store.lock:
            session = view.session(group_id)
            _guard_not_confirmed(session)
            _check_revision(session, payload or {}, required=False)
            inst = view.instances[group_id]
            floors = [[0] * inst.horizon for _ in inst.group.sku_ids]
            index = {sku: i for i, sku in enumerate(inst.group.sku_ids)}
            for e in session.live_edits():
                floors[index[e["sku_id"]]][e["period"]] = e["quantity"]
            opts = SolverOptions(gap=cfg.gap, time_limit=cfg.time_limit,
                                 objective=cfg.objective,
                                 order_floors=tuple(tuple(r) for r in floors))
            try:
                plan = solve(inst, opts)
            except Infeasible as exc:
                raise ApiError(409, "Infeasible",
                               f"no feasible plan honors the edited quantities: {exc}",
                               {}) from exc
            session.plan_override = plan_to_obj(group_id, plan, inst.group.sku_ids)
            session.absorbed = len(session.edits)
            session.last_report = None
            session.advance("edited")
            view.store.save(session)
            return plan_view(view, session, group_id)

    # --- exceptions ------------------------------------------------------

    def _pending(view: RunView) -> list[dict]:
        path = view.run / "pending_exceptions.json"
        return read_json(path)["exceptions"] if path.is_file() else []

    def _resolved(view: RunView) -> dict[str, dict]:
        path = view.run / "exceptions_resolved.json"
        if not path.is_file():
            return {}
        return {r["id"]: r for r in read_json(path)["resolutions"]}

    @app.get("/api/exceptions")
    def list_exceptions():
        view = current_view()
        resolved = _resolved(view)
        items = []
        for entry in _pending(view):
            item = dict(entry)
            if entry["id"] in resolved:
                item["status"] = "resolved"
                item["resolved_action"] = resolved[entry["id"]]["action"]
            items.append(item)
        return {"run_id": view.run.name, "exceptions": items}

    @app.post("/api/exceptions/{exc_id}/resolve")
    def resolve_exception(exc_id: str, payload: dict):
        view = current_view()
        with view.store.lock:
            entry = next((e for e in _pending(view) if e["id"] == exc_id), None)
            if entry is None:
                raise ApiError(404, "UnknownException", f"no pending exception {exc_id!r}",
                               {"id": exc_id})
            resolved = _resolved(view)
            if exc_id in resolved:
                raise ApiError(409, "AlreadyResolved",
                               f"{exc_id} was already resolved as "
                               f"{resolved[exc_id]['action']}",
                               {"id": exc_id, "action": resolved[exc_id]["action"]})
            action = payload.get("action")
            if action not in _ACTIONS:
                raise ApiError(400, "BadAction",
                               f"action must be one of {_ACTIONS}, got {action!r}",
                               {"action": action})
            param = payload.get("param")
            if action == "reduce_fraction":
                if not isinstance(param, (int, float)) or not 0.0 < float(param) <= 1.0:
                    raise ApiError(400, "BadParam",
                                   f"reduce_fraction needs a fraction in (0, 1], got {param!r}",
                                   {"param": param})
                param = float(param)
            elif action == "replace":
                if not isinstance(param, int) or isinstance(param, bool) or param < 0:
                    raise ApiError(400, "BadParam",
                                   f"replace needs a nonnegative integer, got {param!r}",
                                   {"param": param})
            else:
                param = None
            record = {
                "id": exc_id,
                "sku_id": entry["sku_id"],
                "date": entry["date"],
                "action": action,
                "param": param,
                "note": str(payload.get("note", "")),
            }
            path = view.run / "exceptions_resolved.json"
            rows = list(resolved.values())
            rows.append(record)
            path.write_text(
                json.dumps({"resolutions": rows}, sort_keys=True, indent=1) + "\n",
                encoding="utf-8")
            return {"status": "resolved", **record}

    # --- forecasts -------------------------------------------------------

    @app.get("/api/skus/{sku_id}/forecast")
    def sku_forecast(sku_id: str):
        view = current_view()
        series = view.series.get(sku_id)
        if series is None:
            raise ApiError(404, "UnknownSku", f"no demand series for {sku_id!r}",
                           {"sku_id": sku_id})
        flags = view.flags().get(sku_id, [])
        flags = list(flags) + [False] * (len(series.values) - len(flags))
        history = {
            "dates": [d.isoformat() for d in series.bucket_dates()],
            "values": list(series.values),
            "flags": flags[:len(series.values)],
        }
        forecast = {"dates": [], "values": []}
        model = None
        sigma = None
        meta = view.meta.get(sku_id)
        points = view.points.get(sku_id, ())
        if meta is not None and points:
            start = dt.date.fromordinal(meta["plan_start_ordinal"])
            idx0 = bucket_index(start, series.start, view.level)
            forecast["dates"] = [
                bucket_date(series.start, view.level, idx0 + k,
                            anchor=series.start).isoformat()
                for k in range(len(points))
            ]
            forecast["values"] = [float(p) for p in points]
            sigma = meta.get("sigma")
            spec = meta.get("model")
            model = spec if isinstance(spec, str) else spec_from_obj(spec).describe()
        return {"sku_id": sku_id, "level": view.level.value, "history": history,
                "forecast": forecast, "model": model, "sigma": sigma}

    ui_dir = Path(__file__).parent / "ui"
    if ui_dir.is_dir():
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
