"""Domain records and the cross-validated Dataset container.

Monetary amounts are held as integer minor units (cents); the CSV layer
converts to and from decimal strings. Dataset values are immutable: every
mutating operation returns a new Dataset.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, replace
from decimal import Decimal, InvalidOperation
from enum import Enum
from typing import Iterable, Mapping, Union

from ..errors import BadValue, DanglingKey, DuplicateKey


class OrderStatus(str, Enum):
    HISTORICAL = "historical"
    SUGGESTED = "suggested"
    EDITED = "edited"
    CONFIRMED = "confirmed"


class EventKind(str, Enum):
    SALE = "sale"
    RETURN = "return"
    QUOTE = "quote"


def parse_money(text: str) -> int:
    """Decimal string -> integer minor units. At most two decimal places."""
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise BadValue(None, "", f"not a decimal amount: {text!r}")
    scaled = value * 100
    if scaled != scaled.to_integral_value():
        raise BadValue(None, "", f"more than two decimal places: {text!r}")
    return int(scaled)


def format_money(minor: int) -> str:
    sign = "-" if minor < 0 else ""
    minor = abs(minor)
    return f"{sign}{minor // 100}.{minor % 100:02d}"


@dataclass(frozen=True)
class SkuRecord:
    sku_id: str
    description: str
    unit_cost: int    # minor units per unit
    unit_price: int   # minor units per unit
    unit_mass: float  # kg per unit
    unit_volume: float  # m3 per unit
    moq: int
    supplier_id: str
    inventory_level: int
    backorders: int

    def validate(self) -> None:
        if not self.sku_id:
            raise BadValue(None, "sku_id", "empty key")
        for col, v in (("unit_cost", self.unit_cost), ("unit_price", self.unit_price),
                       ("unit_mass_kg", self.unit_mass), ("unit_volume_m3", self.unit_volume),
                       ("moq", self.moq), ("inventory_level", self.inventory_level),
                       ("backorders", self.backorders)):
            if v < 0:
                raise BadValue(None, col, f"must be >= 0, got {v}")


@dataclass(frozen=True)
class SupplierRecord:
    supplier_id: str
    name: str
    lead_time: int          # periods
    container_volume_cap: float  # m3
    container_mass_cap: float    # kg
    container_cost: int     # minor units per container

    def validate(self) -> None:
        if not self.supplier_id:
            raise BadValue(None, "supplier_id", "empty key")
        if self.lead_time < 0:
            raise BadValue(None, "lead_time_periods", f"must be >= 0, got {self.lead_time}")
        if self.container_volume_cap <= 0:
            raise BadValue(None, "container_volume_m3", "capacity must be > 0")
        if self.container_mass_cap <= 0:
            raise BadValue(None, "container_mass_kg", "capacity must be > 0")
        if self.container_cost < 0:
            raise BadValue(None, "container_cost", "must be >= 0")


@dataclass(frozen=True)
class OrderRecord:
    order_id: str
    sku_id: str
    quantity: int
    placed_date: dt.date
    arrival_date: dt.date
    status: OrderStatus

    def validate(self) -> None:
        if not self.order_id:
            raise BadValue(None, "order_id", "empty key")
        if self.quantity <= 0:
            raise BadValue(None, "quantity", f"must be > 0, got {self.quantity}")
        if self.arrival_date < self.placed_date:
            raise BadValue(None, "arrival_date", "arrival precedes placement")


@dataclass(frozen=True)
class DemandEvent:
    date: dt.date
    sku_id: str
    quantity: int  # negative for returns
    kind: EventKind

    def validate(self) -> None:
        if self.kind in (EventKind.SALE, EventKind.QUOTE) and self.quantity <= 0:
            raise BadValue(None, "quantity", f"{self.kind.value} quantity must be > 0")
        if self.kind is EventKind.RETURN and self.quantity >= 0:
            raise BadValue(None, "quantity", "return quantity must be < 0")


Record = Union[SkuRecord, SupplierRecord, OrderRecord, DemandEvent]


@dataclass(frozen=True)
class Dataset:
    skus: Mapping[str, SkuRecord]
    suppliers: Mapping[str, SupplierRecord]
    orders: tuple[OrderRecord, ...]
    demand_events: tuple[DemandEvent, ...]
    as_of: dt.date

    @staticmethod
    def build(skus: Iterable[SkuRecord],
              suppliers: Iterable[SupplierRecord],
              orders: Iterable[OrderRecord],
              demand_events: Iterable[DemandEvent],
              as_of: dt.date | None = None) -> "Dataset":
        """Validate records individually and cross-validate foreign keys.

        Rejects rather than repairs: the first violation raises and no
        Dataset is returned. Collections are canonically ordered so equal
        contents compare equal regardless of input order.
        """
        sup_map: dict[str, SupplierRecord] = {}
        for rec in suppliers:
            rec.validate()
            if rec.supplier_id in sup_map:
                raise DuplicateKey("supplier", rec.supplier_id)
            sup_map[rec.supplier_id] = rec

        sku_map: dict[str, SkuRecord] = {}
        for rec in skus:
            rec.validate()
            if rec.sku_id in sku_map:
                raise DuplicateKey("sku", rec.sku_id)
            if rec.supplier_id not in sup_map:
                raise DanglingKey("supplier", rec.supplier_id)
            sku_map[rec.sku_id] = rec

        order_ids: set[str] = set()
        order_list: list[OrderRecord] = []
        for rec in orders:
            rec.validate()
            if rec.order_id in order_ids:
                raise DuplicateKey("order", rec.order_id)
            if rec.sku_id not in sku_map:
                raise DanglingKey("sku", rec.sku_id)
            order_ids.add(rec.order_id)
            order_list.append(rec)

        event_list: list[DemandEvent] = []
        max_date: dt.date | None = None
        for rec in demand_events:
            rec.validate()
            if rec.sku_id not in sku_map:
                raise DanglingKey("sku", rec.sku_id)
            event_list.append(rec)
            if max_date is None or rec.date > max_date:
                max_date = rec.date

        if as_of is None:
            as_of = max_date if max_date is not None else dt.date(1970, 1, 1)
        for i, rec in enumerate(event_list):
            if rec.date > as_of:
                raise BadValue(i, "date", f"event date {rec.date} after as_of {as_of}")

        order_list.sort(key=lambda o: o.order_id)
        event_list.sort(key=lambda e: (e.date.isoformat(), e.sku_id, e.kind.value, e.quantity))
        return Dataset(
            skus={k: sku_map[k] for k in sorted(sku_map)},
            suppliers={k: sup_map[k] for k in sorted(sup_map)},
            orders=tuple(order_list),
            demand_events=tuple(event_list),
            as_of=as_of,
        )


def upsert_records(ds: Dataset, records: Iterable[Record],
                   as_of: dt.date | None = None) -> Dataset:
    """Replace keyed records (SKU/supplier) and append orders/events.

    The full Dataset validation re-runs; on any violation the original
    Dataset is untouched and the error propagates.
    """
    skus = dict(ds.skus)
    suppliers = dict(ds.suppliers)
    orders = list(ds.orders)
    events = list(ds.demand_events)
    for rec in records:
        if isinstance(rec, SkuRecord):
            skus[rec.sku_id] = rec
        elif isinstance(rec, SupplierRecord):
            suppliers[rec.supplier_id] = rec
        elif isinstance(rec, OrderRecord):
            orders.append(rec)
        elif isinstance(rec, DemandEvent):
            events.append(rec)
        else:
            raise BadValue(None, "record", f"unsupported record type {type(rec).__name__}")
    if as_of is None:
        as_of = ds.as_of
        for rec in events:
            if rec.date > as_of:
                as_of = rec.date
    return Dataset.build(skus.values(), suppliers.values(), orders, events, as_of=as_of)


def retire_order(ds: Dataset, order_id: str, status: OrderStatus) -> Dataset:
    """Return a Dataset with one order's status replaced."""
    orders = [replace(o, status=status) if o.order_id == order_id else o for o in ds.orders]
    return Dataset.build(ds.skus.values(), ds.suppliers.values(), orders,
                         ds.demand_events, as_of=ds.as_of)
