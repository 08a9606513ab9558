from .records import (
    Dataset,
    DemandEvent,
    EventKind,
    OrderRecord,
    OrderStatus,
    Record,
    SkuRecord,
    SupplierRecord,
    format_money,
    parse_money,
    retire_order,
    upsert_records,
)
from .io import load_dataset, snapshot

__all__ = [
    "Dataset", "DemandEvent", "EventKind", "OrderRecord", "OrderStatus",
    "Record", "SkuRecord", "SupplierRecord", "format_money", "parse_money",
    "retire_order", "upsert_records", "load_dataset", "snapshot",
]
