"""Tests for the plan review HTTP service."""

import datetime as dt
import json
import math
from pathlib import Path

import jsonschema
import pytest
from fastapi.testclient import TestClient
from hypothesis import given, settings
from hypothesis import strategies as st

from iros.demand import bucket_index
from iros.pipeline import load_config, run_all, step
from iros.pipeline.artifacts import read_json, read_series
from iros.pipeline.runner import latest_completed
from iros.service import create_app

from test_pipeline_run import build_root
from test_pipeline_step import week_events

_SCHEMA_DIR = Path(__file__).resolve().parents[1] / "docs" / "api"


def check_schema(payload, name: str) -> None:
    schema = json.loads((_SCHEMA_DIR / name).read_text(encoding="utf-8"))
    jsonschema.validate(payload, schema)


@pytest.fixture(scope="module")
def plans_env(tmp_path_factory):
    path = tmp_path_factory.mktemp("service-plans")
    cfg, root = build_root(path)
    run_all(cfg, root)
    client = TestClient(create_app(cfg, root))
    return client, cfg, root


@pytest.fixture(scope="module")
def queue_env(tmp_path_factory):
    """A root whose latest run carries one pending demand exception."""
    path = tmp_path_factory.mktemp("service-queue")
    cfg, root = build_root(path, seed=23)
    base = run_all(cfg, root)
    prior = root / base.run_id
    sku = sorted(read_json(prior / "models.json"))[2]
    step(cfg, root, week_events(prior, cfg, path / "spike.csv", spikes={sku}))
    client = TestClient(create_app(cfg, root))
    return client, cfg, root, sku


def fresh_session(client, root, group_id: str):
    """Drop any persisted session so the group starts from suggested."""
    run = latest_completed(root)
    (run / "sessions" / f"{group_id}.json").unlink(missing_ok=True)
    return client.get(f"/api/plans/{group_id}").json()


def pick_editable(client, root):
    """A (group, order) pair whose SKU has a MOQ high enough to undercut."""
    for summary in client.get("/api/plans").json()["plans"]:
        if summary["status"] != "optimal":
            continue
        full = fresh_session(client, root, summary["group_id"])
        for order in full["plan"]["orders"]:
            if order["moq"] >= 2 and order["quantity"] >= order["moq"]:
                return summary["group_id"], order
    raise AssertionError("fixture has no order with a usable MOQ")


def test_plan_summaries_contract(plans_env):
    client, cfg, root = plans_env
    run = latest_completed(root)
    for p in run.glob("sessions/*.json"):
        p.unlink()
    body = client.get("/api/plans").json()
    check_schema(body, "plan_summaries.schema.json")
    assert body["run_id"] == run.name
    assert body["plans"]
    for summary in body["plans"]:
        assert summary["status"] == "optimal"
        assert summary["state"] == "suggested"
        assert summary["orders"] >= 1


def test_full_session_contract_and_totals(plans_env):
    client, cfg, root = plans_env
    group = client.get("/api/plans").json()["plans"][0]["group_id"]
    body = fresh_session(client, root, group)
    check_schema(body, "plan_session.schema.json")

    plan = body["plan"]
    assert plan["totals"] == plan["base_totals"]
    units = sum(o["quantity"] for o in plan["orders"])
    cost = sum(o["quantity"] * o["unit_cost_minor_units"] for o in plan["orders"])
    assert plan["totals"]["units"] == units
    assert plan["totals"]["order_cost_minor_units"] == cost
    for o in plan["orders"]:
        assert o["volume_util_pct"] >= 0.0
        assert not o["edited"]


def test_unknown_group_is_machine_readable(plans_env):
    client, cfg, root = plans_env
    resp = client.get("/api/plans/warehouse-mars")
    assert resp.status_code == 404
    body = resp.json()
    check_schema(body, "error.schema.json")
    assert body["code"] == "UnknownGroup"


def test_edit_validate_confirm_loop(plans_env):
    client, cfg, root = plans_env
    group, order = pick_editable(client, root)
    key = {"sku_id": order["sku_id"], "period": order["period"]}

    # undercut the MOQ: recorded as an edit, no validation yet
    resp = client.patch(f"/api/plans/{group}/orders", json={
        "revision": 0,
        "orders": [{**key, "quantity": order["moq"] - 1, "note": "trim"}],
    })
    assert resp.status_code == 200
    body = resp.json()
    check_schema(body, "plan_session.schema.json")
    assert body["session"]["state"] == "edited"
    assert len(body["session"]["edits"]) == 1
    edited = [o for o in body["plan"]["orders"]
              if (o["sku_id"], o["period"]) == (key["sku_id"], key["period"])]
    assert edited[0]["edited"] and edited[0]["quantity"] == order["moq"] - 1

    resp = client.post(f"/api/plans/{group}/validate")
    assert resp.status_code == 200
    report = resp.json()
    check_schema(report, "feasibility_report.schema.json")
    assert report["state"] == "validated_infeasible"
    moq_violations = [v for v in report["violations"] if v["kind"] == "moq"]
    assert moq_violations
    v = moq_violations[0]
    assert v["sku_id"] == key["sku_id"] and v["period"] == key["period"]
    assert f"MOQ of {order['moq']}" in v["message"]

    resp = client.post(f"/api/plans/{group}/confirm")
    assert resp.status_code == 409
    assert resp.json()["code"] == "Infeasible"

    # restore the suggested quantity and go through the happy path
    resp = client.patch(f"/api/plans/{group}/orders", json={
        "revision": 2, "orders": [{**key, "quantity": order["quantity"]}]})
    assert resp.status_code == 200
    resp = client.post(f"/api/plans/{group}/validate")
    assert resp.json()["state"] == "validated_ok"

    before = cfg.orders_path.read_text(encoding="utf-8").splitlines()
    resp = client.post(f"/api/plans/{group}/confirm")
    assert resp.status_code == 200
    conf = resp.json()
    check_schema(conf, "confirmation.schema.json")
    after = cfg.orders_path.read_text(encoding="utf-8").splitlines()

    n_orders = len(client.get(f"/api/plans/{group}").json()["plan"]["orders"])
    assert len(after) - len(before) == len(conf["order_ids"]) == n_orders
    for line in after[len(before):]:
        assert line.endswith(",confirmed")
        assert line.split(",")[0] in conf["order_ids"]

    # confirmed sessions are frozen
    resp = client.patch(f"/api/plans/{group}/orders", json={
        "revision": conf["revision"], "orders": [{**key, "quantity": 7}]})
    assert resp.status_code == 409 and resp.json()["code"] == "SessionConfirmed"
    resp = client.post(f"/api/plans/{group}/confirm")
    assert resp.status_code == 409 and resp.json()["code"] == "SessionConfirmed"
    resp = client.post(f"/api/plans/{group}/validate")
    assert resp.status_code == 409 and resp.json()["code"] == "SessionConfirmed"


def test_validation_is_pure(plans_env):
    client, cfg, root = plans_env
    group, order = pick_editable(client, root)
    client.patch(f"/api/plans/{group}/orders", json={
        "revision": 0,
        "orders": [{"sku_id": order["sku_id"], "period": order["period"],
                    "quantity": order["moq"] - 1}],
    })
    first = client.post(f"/api/plans/{group}/validate").json()
    second = client.post(f"/api/plans/{group}/validate").json()
    assert first["feasible"] == second["feasible"]
    assert first["violations"] == second["violations"]
    assert second["revision"] == first["revision"] + 1


def test_revision_guard(plans_env):
    client, cfg, root = plans_env
    group, order = pick_editable(client, root)
    key = {"sku_id": order["sku_id"], "period": order["period"]}

    resp = client.patch(f"/api/plans/{group}/orders",
                        json={"orders": [{**key, "quantity": 5}]})
    assert resp.status_code == 400 and resp.json()["code"] == "MissingRevision"

    resp = client.patch(f"/api/plans/{group}/orders",
                        json={"revision": 41, "orders": [{**key, "quantity": 5}]})
    assert resp.status_code == 409 and resp.json()["code"] == "StaleRevision"

    resp = client.post(f"/api/plans/{group}/validate", json={"revision": 41})
    assert resp.status_code == 409 and resp.json()["code"] == "StaleRevision"


def test_bad_edit_payloads(plans_env):
    client, cfg, root = plans_env
    group, order = pick_editable(client, root)

    def attempt(entry):
        return client.patch(f"/api/plans/{group}/orders",
                            json={"revision": 0, "orders": [entry]})

    sku, period = order["sku_id"], order["period"]
    for entry in [
        {"sku_id": sku, "period": period, "quantity": -3},
        {"sku_id": sku, "period": period, "quantity": 2.5},
        {"sku_id": sku, "period": period, "quantity": "12"},
        {"sku_id": "GHOST", "period": period, "quantity": 5},
        {"sku_id": sku, "period": 99, "quantity": 5},
    ]:
        resp = attempt(entry)
        assert resp.status_code == 400, entry
        assert resp.json()["code"] == "BadQuantity", entry

    # rejected edits leave no trace
    state = client.get(f"/api/plans/{group}").json()["session"]
    assert state["state"] == "suggested" and state["edits"] == []


def test_reoptimize_respects_edited_floors(plans_env):
    client, cfg, root = plans_env
    group, order = pick_editable(client, root)
    key = (order["sku_id"], order["period"])
    floor = order["quantity"] + 25

    client.patch(f"/api/plans/{group}/orders", json={
        "revision": 0,
        "orders": [{"sku_id": key[0], "period": key[1], "quantity": floor}]})
    resp = client.post(f"/api/plans/{group}/reoptimize")
    assert resp.status_code == 200
    body = resp.json()
    check_schema(body, "plan_session.schema.json")
    assert body["plan"]["reoptimized"] is True
    assert body["session"]["state"] == "edited"
    got = [o for o in body["plan"]["orders"] if (o["sku_id"], o["period"]) == key]
    assert got[0]["quantity"] >= floor
    # the re-solved plan absorbs the edits, so validation passes as-is
    assert client.post(f"/api/plans/{group}/validate").json()["state"] == "validated_ok"


def test_sessions_survive_restart(plans_env):
    client, cfg, root = plans_env
    group, order = pick_editable(client, root)
    client.patch(f"/api/plans/{group}/orders", json={
        "revision": 0,
        "orders": [{"sku_id": order["sku_id"], "period": order["period"],
                    "quantity": order["quantity"] + 1}]})
    reborn = TestClient(create_app(cfg, root))
    body = reborn.get(f"/api/plans/{group}").json()
    assert body["session"]["state"] == "edited"
    assert body["session"]["revision"] == 1
    assert len(body["session"]["edits"]) == 1


def test_forecast_endpoint_contract(queue_env):
    client, cfg, root, sku = queue_env
    resp = client.get(f"/api/skus/{sku}/forecast")
    assert resp.status_code == 200
    body = resp.json()
    check_schema(body, "forecast.schema.json")
    h = body["history"]
    assert len(h["dates"]) == len(h["values"]) == len(h["flags"])
    assert len(body["forecast"]["dates"]) == len(body["forecast"]["values"]) > 0
    assert body["model"]

    assert client.get("/api/skus/GHOST/forecast").status_code == 404


def test_exception_queue_resolution_feeds_the_next_step(queue_env, tmp_path):
    client, cfg, root, sku = queue_env
    body = client.get("/api/exceptions").json()
    check_schema(body, "exceptions.schema.json")
    pending = [e for e in body["exceptions"] if e["status"] == "pending"]
    assert len(pending) == 1
    entry = pending[0]
    assert entry["sku_id"] == sku and entry["score"] > 3.0

    resp = client.post("/api/exceptions/ghost-id/resolve",
                       json={"action": "keep"})
    assert resp.status_code == 404 and resp.json()["code"] == "UnknownException"

    resp = client.post(f"/api/exceptions/{entry['id']}/resolve",
                       json={"action": "shrug"})
    assert resp.status_code == 400 and resp.json()["code"] == "BadAction"
    resp = client.post(f"/api/exceptions/{entry['id']}/resolve",
                       json={"action": "reduce_fraction", "param": 7})
    assert resp.status_code == 400 and resp.json()["code"] == "BadParam"

    resp = client.post(f"/api/exceptions/{entry['id']}/resolve",
                       json={"action": "reduce_fraction", "param": 0.85,
                             "note": "one-off promo"})
    assert resp.status_code == 200
    check_schema(resp.json(), "resolution.schema.json")

    resp = client.post(f"/api/exceptions/{entry['id']}/resolve",
                       json={"action": "keep"})
    assert resp.status_code == 409 and resp.json()["code"] == "AlreadyResolved"

    listed = client.get("/api/exceptions").json()["exceptions"]
    assert [e for e in listed if e["id"] == entry["id"]][0]["status"] == "resolved"

    # the recorded resolution is consumed by the next pipeline step
    run = latest_completed(root)
    assert (run / "exceptions_resolved.json").is_file()
    nxt = step(cfg, root, week_events(run, cfg, tmp_path / "next.csv"))
    nrun = root / nxt.run_id
    assert read_json(nrun / "pending_exceptions.json")["exceptions"] == []
    raw = read_series(nrun / "series.csv", cfg.aggregation_level)[sku]
    adj = read_series(nrun / "demand_adjusted.csv", cfg.aggregation_level)[sku]
    idx = bucket_index(dt.date.fromisoformat(entry["date"]), raw.start,
                       cfg.aggregation_level)
    assert adj.values[idx] == math.floor(0.85 * raw.values[idx] + 0.5)


_OPS = ("patch_base", "patch_low", "patch_bad", "patch_stale", "validate", "confirm")


@settings(max_examples=25, deadline=None)
@given(ops=st.lists(st.sampled_from(_OPS), max_size=12))
def test_state_machine_closed_under_random_requests(plans_env, ops):
    """Any request sequence lands in a declared state with the right code."""
    client, cfg, root = plans_env
    group, order = pick_editable(client, root)
    key = {"sku_id": order["sku_id"], "period": order["period"]}
    base_qty = order["quantity"]
    n_orders = len(client.get(f"/api/plans/{group}").json()["plan"]["orders"])

    def lines():
        return len(cfg.orders_path.read_text(encoding="utf-8").splitlines())

    state, revision, last_qty = "suggested", 0, None
    for op in ops:
        rows_before = lines()
        if op.startswith("patch"):
            qty = {"patch_base": base_qty, "patch_low": order["moq"] - 1,
                   "patch_bad": -4, "patch_stale": base_qty}[op]
            rev = revision + 7 if op == "patch_stale" else revision
            resp = client.patch(f"/api/plans/{group}/orders", json={
                "revision": rev, "orders": [{**key, "quantity": qty}]})
            if state == "confirmed":
                assert resp.status_code == 409
                assert resp.json()["code"] == "SessionConfirmed"
            elif op == "patch_stale":
                assert resp.status_code == 409
                assert resp.json()["code"] == "StaleRevision"
            elif op == "patch_bad":
                assert resp.status_code == 400
                assert resp.json()["code"] == "BadQuantity"
            else:
                assert resp.status_code == 200
                state, revision, last_qty = "edited", revision + 1, qty
        elif op == "validate":
            resp = client.post(f"/api/plans/{group}/validate")
            if state == "confirmed":
                assert resp.status_code == 409
                assert resp.json()["code"] == "SessionConfirmed"
            else:
                assert resp.status_code == 200
                feasible = last_qty is None or last_qty == base_qty
                assert resp.json()["feasible"] is feasible
                state = "validated_ok" if feasible else "validated_infeasible"
                revision += 1
        else:
            resp = client.post(f"/api/plans/{group}/confirm")
            if state == "confirmed":
                assert resp.status_code == 409
                assert resp.json()["code"] == "SessionConfirmed"
            elif state == "validated_ok":
                assert resp.status_code == 200
                state, revision = "confirmed", revision + 1
                assert lines() - rows_before == n_orders
            elif state == "validated_infeasible":
                assert resp.status_code == 409
                assert resp.json()["code"] == "Infeasible"
            else:
                assert resp.status_code == 409
                assert resp.json()["code"] == "NotValidated"
        if not (op == "confirm" and resp.status_code == 200):
            assert lines() == rows_before
        seen = client.get(f"/api/plans/{group}").json()["session"]
        assert seen["state"] == state and seen["revision"] == revision


def test_no_completed_run_is_a_404(tmp_path):
    cfg, root = build_root(tmp_path, n_skus=6)
    client = TestClient(create_app(cfg, root))
    resp = client.get("/api/plans")
    assert resp.status_code == 404
    body = resp.json()
    check_schema(body, "error.schema.json")
    assert body["code"] == "NoCompletedRun"
