"""CSV ingestion and snapshot persistence for Dataset.

File schemas (UTF-8, comma-delimited, RFC-4180, header row mandatory):

    skus.csv      sku_id,description,unit_cost,unit_price,unit_mass_kg,
                  unit_volume_m3,moq,supplier_id,inventory_level,backorders
    suppliers.csv supplier_id,name,lead_time_periods,container_volume_m3,
                  container_mass_kg,container_cost
    orders.csv    order_id,sku_id,quantity,placed_date,arrival_date,status
    demand.csv    date,sku_id,quantity,kind

snapshot() writes these four files in canonical order so that
load_dataset(snapshot_dir) reproduces the Dataset exactly.
"""

from __future__ import annotations

import csv
import datetime as dt
import os
from pathlib import Path
from typing import Callable, Iterator

from ..errors import BadValue, IoFailure, MissingColumn
from .records import (
    Dataset,
    DemandEvent,
    EventKind,
    OrderRecord,
    OrderStatus,
    SkuRecord,
    SupplierRecord,
    format_money,
    parse_money,
)

SKU_COLUMNS = ["sku_id", "description", "unit_cost", "unit_price", "unit_mass_kg",
               "unit_volume_m3", "moq", "supplier_id", "inventory_level", "backorders"]
SUPPLIER_COLUMNS = ["supplier_id", "name", "lead_time_periods", "container_volume_m3",
                    "container_mass_kg", "container_cost"]
ORDER_COLUMNS = ["order_id", "sku_id", "quantity", "placed_date", "arrival_date", "status"]
DEMAND_COLUMNS = ["date", "sku_id", "quantity", "kind"]

FILE_NAMES = {"skus": "skus.csv", "suppliers": "suppliers.csv",
              "orders": "orders.csv", "demand": "demand.csv"}


def _read_rows(path: Path, columns: list[str]) -> Iterator[tuple[int, dict[str, str]]]:
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    with handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        for col in columns:
            if col not in header:
                raise MissingColumn(col, str(path))
        for i, row in enumerate(reader, start=2):  # 2 = first data line in the file
            yield i, row


def _int(row: int, column: str, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise BadValue(row, column, f"not an integer: {text!r}")


def _float(row: int, column: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise BadValue(row, column, f"not a number: {text!r}")


def _date(row: int, column: str, text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise BadValue(row, column, f"not an ISO date: {text!r}")


def _money(row: int, column: str, text: str) -> int:
    try:
        return parse_money(text)
    except BadValue as exc:
        raise BadValue(row, column, exc.reason)


def _rewrap(row: int, fn: Callable[[], None]) -> None:
    # attach the file row to validation errors raised by record.validate()
    try:
        fn()
    except BadValue as exc:
        raise BadValue(row, exc.column, exc.reason)


def load_dataset(directory: str | os.PathLike, as_of: dt.date | None = None) -> Dataset:
    """Load and cross-validate the four record files from a directory.

    Rejects rather than repairs: any schema or referential violation raises
    with the offending row and column, and no Dataset is returned.
    """
    directory = Path(directory)
    skus: list[SkuRecord] = []
    for row, data in _read_rows(directory / FILE_NAMES["skus"], SKU_COLUMNS):
        rec = SkuRecord(
            sku_id=data["sku_id"],
            description=data["description"],
            unit_cost=_money(row, "unit_cost", data["unit_cost"]),
            unit_price=_money(row, "unit_price", data["unit_price"]),
            unit_mass=_float(row, "unit_mass_kg", data["unit_mass_kg"]),
            unit_volume=_float(row, "unit_volume_m3", data["unit_volume_m3"]),
            moq=_int(row, "moq", data["moq"]),
            supplier_id=data["supplier_id"],
            inventory_level=_int(row, "inventory_level", data["inventory_level"]),
            backorders=_int(row, "backorders", data["backorders"]),
        )
        _rewrap(row, rec.validate)
        skus.append(rec)

    suppliers: list[SupplierRecord] = []
    for row, data in _read_rows(directory / FILE_NAMES["suppliers"], SUPPLIER_COLUMNS):
        rec = SupplierRecord(
            supplier_id=data["supplier_id"],
            name=data["name"],
            lead_time=_int(row, "lead_time_periods", data["lead_time_periods"]),
            container_volume_cap=_float(row, "container_volume_m3", data["container_volume_m3"]),
            container_mass_cap=_float(row, "container_mass_kg", data["container_mass_kg"]),
            container_cost=_money(row, "container_cost", data["container_cost"]),
        )
        _rewrap(row, rec.validate)
        suppliers.append(rec)

    orders: list[OrderRecord] = []
    for row, data in _read_rows(directory / FILE_NAMES["orders"], ORDER_COLUMNS):
        if data["status"] not in OrderStatus._value2member_map_:
            raise BadValue(row, "status", f"unknown status {data['status']!r}")
        rec = OrderRecord(
            order_id=data["order_id"],
            sku_id=data["sku_id"],
            quantity=_int(row, "quantity", data["quantity"]),
            placed_date=_date(row, "placed_date", data["placed_date"]),
            arrival_date=_date(row, "arrival_date", data["arrival_date"]),
            status=OrderStatus(data["status"]),
        )
        _rewrap(row, rec.validate)
        orders.append(rec)

    events: list[DemandEvent] = []
    for row, data in _read_rows(directory / FILE_NAMES["demand"], DEMAND_COLUMNS):
        if data["kind"] not in EventKind._value2member_map_:
            raise BadValue(row, "kind", f"unknown kind {data['kind']!r}")
        rec = DemandEvent(
            date=_date(row, "date", data["date"]),
            sku_id=data["sku_id"],
            quantity=_int(row, "quantity", data["quantity"]),
            kind=EventKind(data["kind"]),
        )
        _rewrap(row, rec.validate)
        events.append(rec)

    return Dataset.build(skus, suppliers, orders, events, as_of=as_of)


def snapshot(ds: Dataset, directory: str | os.PathLike) -> None:
    """Write the Dataset to a directory as the four canonical CSV files."""
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
        _write_csv(directory / FILE_NAMES["skus"], SKU_COLUMNS, [
            [s.sku_id, s.description, format_money(s.unit_cost), format_money(s.unit_price),
             repr(s.unit_mass), repr(s.unit_volume), str(s.moq), s.supplier_id,
             str(s.inventory_level), str(s.backorders)]
            for s in ds.skus.values()
        ])
        _write_csv(directory / FILE_NAMES["suppliers"], SUPPLIER_COLUMNS, [
            [s.supplier_id, s.name, str(s.lead_time), repr(s.container_volume_cap),
             repr(s.container_mass_cap), format_money(s.container_cost)]
            for s in ds.suppliers.values()
        ])
        _write_csv(directory / FILE_NAMES["orders"], ORDER_COLUMNS, [
            [o.order_id, o.sku_id, str(o.quantity), o.placed_date.isoformat(),
             o.arrival_date.isoformat(), o.status.value]
            for o in ds.orders
        ])
        _write_csv(directory / FILE_NAMES["demand"], DEMAND_COLUMNS, [
            [e.date.isoformat(), e.sku_id, str(e.quantity), e.kind.value]
            for e in ds.demand_events
        ])
    except OSError as exc:
        raise IoFailure(f"cannot write snapshot to {directory}: {exc}") from exc


def _write_csv(path: Path, columns: list[str], rows: list[list[str]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)
