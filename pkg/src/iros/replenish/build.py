"""Instance assembly: datasets and forecasts in, solver-ready numbers out."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from typing import Mapping

from ..core.records import Dataset, OrderStatus
from ..demand import AggregationLevel, bucket_index, bucket_start, round_half_up
from ..errors import ConfigError, MissingForecast, MissingServiceLevel
from .types import PlanMode, ReplenishmentInstance, SkuGroup

__all__ = ["InstanceOptions", "group_skus", "build_instance"]

# order states that represent committed stock already on its way
_PIPELINE_STATUSES = {OrderStatus.HISTORICAL, OrderStatus.CONFIRMED}


@dataclass(frozen=True)
class InstanceOptions:
    horizon: int
    holding_rate: float = 0.02
    min_fill: float = 0.9
    shortage_multiplier: float = 4.0
    lead_time_padding: int = 0
    level: AggregationLevel = AggregationLevel.WEEKLY
    plan_start: dt.date | None = None

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon}")
        if self.shortage_multiplier < 0:
            raise ConfigError("shortage_multiplier must be >= 0")
        if self.lead_time_padding < 0:
            raise ConfigError("lead_time_padding must be >= 0")


def group_skus(ds: Dataset, criterion: str = "supplier") -> list[SkuGroup]:
    if criterion != "supplier":
        raise ConfigError(f"unsupported grouping criterion {criterion!r}")
    by_supplier: dict[str, list[str]] = {}
    for sku_id in sorted(ds.skus):
        by_supplier.setdefault(ds.skus[sku_id].supplier_id, []).append(sku_id)
    return [
        SkuGroup(group_id=supplier_id, supplier_id=supplier_id, sku_ids=tuple(members))
        for supplier_id, members in sorted(by_supplier.items())
    ]


def build_instance(
    group: SkuGroup,
    forecasts: Mapping[str, object],
    priority,
    ds: Dataset,
    mode: PlanMode = PlanMode.OPERATIONAL,
    options: InstanceOptions | None = None,
) -> ReplenishmentInstance:
    if options is None:
        raise ConfigError("options with a horizon are required")
    horizon = options.horizon
    mode = PlanMode(mode)

    demand = []
    for sku_id in group.sku_ids:
        forecast = forecasts.get(sku_id)
        if forecast is None:
            raise MissingForecast(f"no forecast for {sku_id}")
        point = tuple(getattr(forecast, "point", forecast))
        if len(point) < horizon:
            raise MissingForecast(
                f"forecast for {sku_id} covers {len(point)} buckets, need {horizon}"
            )
        demand.append(tuple(round_half_up(v) for v in point[:horizon]))

    service = []
    for sku_id in group.sku_ids:
        try:
            service.append(float(priority.service_level_for(sku_id)))
        except KeyError as exc:
            raise MissingServiceLevel(f"no service level for {sku_id}") from exc

    supplier = ds.suppliers[group.supplier_id]
    records = [ds.skus[sku_id] for sku_id in group.sku_ids]
    size = len(records)

    if mode is PlanMode.OPERATIONAL:
        init_inventory = tuple(r.inventory_level for r in records)
        init_backorders = tuple(r.backorders for r in records)
        arrivals = [[0] * horizon for _ in range(size)]
        start = options.plan_start or (ds.as_of + dt.timedelta(days=1))
        # bucket 0 is the bucket containing the plan start, so mid-bucket
        # starts still capture arrivals landing later the same bucket
        anchor = bucket_start(start, options.level, start)
        index_of = {sku_id: i for i, sku_id in enumerate(group.sku_ids)}
        for order in ds.orders:
            if order.status not in _PIPELINE_STATUSES:
                continue
            i = index_of.get(order.sku_id)
            if i is None or order.arrival_date < start:
                continue
            t = bucket_index(order.arrival_date, anchor, options.level)
            if 0 <= t < horizon:
                arrivals[i][t] += order.quantity
    else:
        init_inventory = (0,) * size
        init_backorders = (0,) * size
        arrivals = [[0] * horizon for _ in range(size)]

    return ReplenishmentInstance(
        group=group,
        horizon=horizon,
        demand=tuple(demand),
        unit_cost=tuple(r.unit_cost for r in records),
        unit_price=tuple(r.unit_price for r in records),
        holding_rate=options.holding_rate,
        container_cost=supplier.container_cost,
        unit_volume=tuple(r.unit_volume for r in records),
        unit_mass=tuple(r.unit_mass for r in records),
        volume_cap=supplier.container_volume_cap,
        mass_cap=supplier.container_mass_cap,
        moq=tuple(r.moq for r in records),
        lead_time=supplier.lead_time + options.lead_time_padding,
        init_inventory=init_inventory,
        init_backorders=init_backorders,
        arrivals=tuple(tuple(row) for row in arrivals),
        service_level=tuple(service),
        shortage_penalty=tuple(
            round_half_up(options.shortage_multiplier * r.unit_cost) for r in records
        ),
        mode=mode,
        min_fill=options.min_fill,
    )
