"""Run-directory artifact IO.

Every writer here is deterministic: fixed column orders, sorted rows,
``\\n`` line endings, shortest-roundtrip float rendering, and sorted JSON
keys, so identical inputs produce byte-identical files and digests.
"""

from __future__ import annotations

import csv
import datetime as dt
import hashlib
import io
import json
from pathlib import Path

from ..core import DemandEvent, EventKind
from ..demand import AggregationLevel, DemandSeries, ExceptionResolution, ResolutionAction
from ..errors import BadValue, ConfigError, IoFailure, MissingColumn
from ..forecast import DemandSignal, EnsembleSpec, ForecastModelSpec


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def write_json(path: Path, obj) -> None:
    write_text(path, json.dumps(obj, sort_keys=True, indent=1) + "\n")


def read_json(path: Path):
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc


def write_csv(path: Path, columns: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_render(v) for v in row])
    write_text(path, buf.getvalue())


def _render(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def read_csv(path: Path, columns: list[str]) -> list[dict[str, str]]:
    try:
        with open(path, encoding="utf-8", newline="") as handle:
            reader = csv.DictReader(handle)
            header = reader.fieldnames or []
            missing = [c for c in columns if c not in header]
            if missing:
                raise MissingColumn(f"{path}: missing columns {missing}")
            return list(reader)
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc


# --- demand series ---------------------------------------------------------

_SERIES_COLUMNS = ["sku_id", "bucket_index", "date", "value"]


def write_series(path: Path, series: list[DemandSeries]) -> None:
    rows = []
    for s in sorted(series, key=lambda s: s.sku_id):
        for i, (day, value) in enumerate(zip(s.bucket_dates(), s.values)):
            rows.append([s.sku_id, i, day.isoformat(), value])
    write_csv(path, _SERIES_COLUMNS, rows)


def read_series(path: Path, level: AggregationLevel) -> dict[str, DemandSeries]:
    grouped: dict[str, list[tuple[int, dt.date, int]]] = {}
    for row in read_csv(path, _SERIES_COLUMNS):
        grouped.setdefault(row["sku_id"], []).append(
            (int(row["bucket_index"]), dt.date.fromisoformat(row["date"]), int(row["value"]))
        )
    out = {}
    for sku_id, rows in grouped.items():
        rows.sort()
        if [i for i, _, _ in rows] != list(range(len(rows))):
            raise BadValue(None, "bucket_index", f"{sku_id}: bucket indexes not contiguous")
        out[sku_id] = DemandSeries(
            sku_id=sku_id, level=level, start=rows[0][1],
            values=tuple(v for _, _, v in rows),
        )
    return out


# --- events and resolutions --------------------------------------------------

def read_demand_events(path: Path) -> list[DemandEvent]:
    events = []
    for row in read_csv(path, ["date", "sku_id", "quantity", "kind"]):
        if row["kind"] not in EventKind._value2member_map_:
            raise BadValue(None, "kind", f"unknown kind {row['kind']!r}")
        event = DemandEvent(
            date=dt.date.fromisoformat(row["date"]),
            sku_id=row["sku_id"],
            quantity=int(row["quantity"]),
            kind=EventKind(row["kind"]),
        )
        event.validate()
        events.append(event)
    return events


_RESOLUTION_COLUMNS = ["sku_id", "bucket_index", "action", "param"]


def write_resolutions(path: Path, rs: list[ExceptionResolution]) -> None:
    rows = [
        [r.sku_id, r.bucket_index, r.action.value, "" if r.param is None else r.param]
        for r in sorted(rs, key=lambda r: (r.sku_id, r.bucket_index))
    ]
    write_csv(path, _RESOLUTION_COLUMNS, rows)


def read_resolutions(path: Path) -> list[ExceptionResolution]:
    out = []
    for row in read_csv(path, _RESOLUTION_COLUMNS):
        if row["action"] not in ResolutionAction._value2member_map_:
            raise BadValue(None, "action", f"unknown action {row['action']!r}")
        param = row["param"]
        out.append(ExceptionResolution(
            sku_id=row["sku_id"],
            bucket_index=int(row["bucket_index"]),
            action=ResolutionAction(row["action"]),
            param=None if param == "" else float(param),
        ))
    return out


def read_signals(path: Path) -> list[DemandSignal]:
    return [
        DemandSignal(
            sku_id=row["sku_id"],
            start_bucket=int(row["start_bucket"]),
            end_bucket=int(row["end_bucket"]),
            uplift=float(row["uplift"]),
        )
        for row in read_csv(path, ["sku_id", "start_bucket", "end_bucket", "uplift"])
    ]


# --- model specs --------------------------------------------------------------

def spec_to_obj(spec: ForecastModelSpec | EnsembleSpec):
    if isinstance(spec, EnsembleSpec):
        obj = {"ensemble": [spec_to_obj(m) for m in spec.members],
               "combiner": spec.combiner}
        if spec.weights is not None:
            obj["weights"] = list(spec.weights)
        return obj
    return {"family": spec.family.value, "params": {k: v for k, v in spec.params}}


def spec_from_obj(obj) -> ForecastModelSpec | EnsembleSpec:
    if "ensemble" in obj:
        members = tuple(spec_from_obj(m) for m in obj["ensemble"])
        weights = obj.get("weights")
        return EnsembleSpec(
            members=members,
            combiner=obj.get("combiner", "mean"),
            weights=None if weights is None else tuple(weights),
        )
    if "family" not in obj:
        raise ConfigError(f"not a model spec: {obj!r}")
    return ForecastModelSpec.make(obj["family"], **obj.get("params", {}))
