"""Demand consolidation and preparation.

Turns raw demand events into regularly spaced per-SKU series, re-aggregates
them across calendar levels, fills known gaps, and applies user-resolved
exception adjustments.

Calendar conventions: weekly buckets are ISO weeks (Mon-Sun); biweekly
buckets pair ISO weeks anchored on the first ISO week in the history;
monthly and quarterly buckets follow the calendar.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from .core.records import Dataset, EventKind
from .errors import EmptyHistory, IncompatibleLevels, IndexOutOfRange, UnknownSku


class AggregationLevel(str, Enum):
    DAILY = "daily"
    WEEKLY = "weekly"
    BIWEEKLY = "biweekly"
    MONTHLY = "monthly"
    QUARTERLY = "quarterly"


class Provenance(str, Enum):
    RAW = "raw"
    IMPUTED = "imputed"
    EXCEPTION_ADJUSTED = "exception_adjusted"


class ResolutionAction(str, Enum):
    KEEP = "keep"
    REDUCE_FRACTION = "reduce_fraction"
    REPLACE = "replace"


@dataclass(frozen=True)
class ExceptionResolution:
    sku_id: str
    bucket_index: int
    action: ResolutionAction
    param: float | int | None = None  # fraction for reduce_fraction, units for replace

    def __post_init__(self):
        if self.action is ResolutionAction.REDUCE_FRACTION:
            if self.param is None or not (0.0 <= float(self.param) <= 1.0):
                raise ValueError(f"reduce_fraction needs a fraction in [0,1], got {self.param}")
        if self.action is ResolutionAction.REPLACE:
            if self.param is None or int(self.param) < 0:
                raise ValueError(f"replace needs units >= 0, got {self.param}")


@dataclass(frozen=True)
class DemandSeries:
    """A contiguous, regularly spaced nonnegative demand history for one SKU.

    (start, level, len(values)) fully determines the bucket calendar; the
    anchor for biweekly pairing is the start date itself.
    """
    sku_id: str
    level: AggregationLevel
    start: dt.date  # first calendar day of the first bucket
    values: tuple[int, ...]
    provenance: Provenance = Provenance.RAW
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.values) < 1:
            raise EmptyHistory(f"series for {self.sku_id} has no buckets")
        if any(v < 0 for v in self.values):
            raise ValueError("demand values must be >= 0")

    def bucket_dates(self) -> list[dt.date]:
        return [bucket_date(self.start, self.level, i, anchor=self.start)
                for i in range(len(self.values))]


def round_half_up(x: Fraction | float) -> int:
    """Round to nearest integer, ties away from zero toward +inf."""
    f = Fraction(x) if not isinstance(x, Fraction) else x
    return int((2 * f + 1) // 2)


# --- bucket calendar -----------------------------------------------------

def _week_start(day: dt.date) -> dt.date:
    return day - dt.timedelta(days=day.weekday())


def _month_start(day: dt.date) -> dt.date:
    return day.replace(day=1)


def _quarter_start(day: dt.date) -> dt.date:
    return dt.date(day.year, 3 * ((day.month - 1) // 3) + 1, 1)


def _add_months(day: dt.date, months: int) -> dt.date:
    month0 = day.year * 12 + (day.month - 1) + months
    return dt.date(month0 // 12, month0 % 12 + 1, 1)


def bucket_start(day: dt.date, level: AggregationLevel, anchor: dt.date) -> dt.date:
    """First calendar day of the bucket containing `day`.

    `anchor` is only consulted for biweekly pairing and must itself be an
    ISO-week start.
    """
    if level is AggregationLevel.DAILY:
        return day
    if level is AggregationLevel.WEEKLY:
        return _week_start(day)
    if level is AggregationLevel.BIWEEKLY:
        base = _week_start(anchor)
        weeks = (_week_start(day) - base).days // 7
        return base + dt.timedelta(weeks=2 * (weeks // 2))
    if level is AggregationLevel.MONTHLY:
        return _month_start(day)
    return _quarter_start(day)


def bucket_date(start: dt.date, level: AggregationLevel, index: int,
                anchor: dt.date | None = None) -> dt.date:
    """Calendar day on which bucket `index` of a series begins."""
    if level is AggregationLevel.DAILY:
        return start + dt.timedelta(days=index)
    if level is AggregationLevel.WEEKLY:
        return start + dt.timedelta(weeks=index)
    if level is AggregationLevel.BIWEEKLY:
        return start + dt.timedelta(weeks=2 * index)
    if level is AggregationLevel.MONTHLY:
        return _add_months(start, index)
    return _add_months(start, 3 * index)


def bucket_index(day: dt.date, start: dt.date, level: AggregationLevel) -> int:
    """Index of the bucket containing `day` in a series anchored at `start`."""
    if level is AggregationLevel.DAILY:
        return (day - start).days
    if level is AggregationLevel.WEEKLY:
        return (_week_start(day) - start).days // 7
    if level is AggregationLevel.BIWEEKLY:
        return (_week_start(day) - start).days // 14
    if level is AggregationLevel.MONTHLY:
        return (day.year * 12 + day.month) - (start.year * 12 + start.month)
    dq = (day.year * 4 + (day.month - 1) // 3) - (start.year * 4 + (start.month - 1) // 3)
    return dq


def _bucket_end(start_day: dt.date, level: AggregationLevel) -> dt.date:
    """Last calendar day of the bucket beginning at start_day."""
    return bucket_date(start_day, level, 1) - dt.timedelta(days=1)


# --- operations ---------------------------------------------------------------

def consolidate(ds: Dataset, sku_id: str, level: AggregationLevel,
                include_quotes: bool = False) -> DemandSeries:
    """Net per-bucket demand from sales and returns (and optionally quotes).

    Bucket value = max(0, sum of event quantities in the bucket); buckets
    span first to last event date with zero-demand buckets present.
    Deterministic and invariant to event order.
    """
    if sku_id not in ds.skus:
        raise UnknownSku(sku_id)
    events = [e for e in ds.demand_events if e.sku_id == sku_id
              and (include_quotes or e.kind is not EventKind.QUOTE)]
    if not events:
        raise EmptyHistory(f"no demand events for {sku_id}")

    first = min(e.date for e in events)
    last = max(e.date for e in events)
    anchor = _week_start(first)
    start = bucket_start(first, level, anchor)
    n = bucket_index(last, start, level) + 1
    net = [0] * n
    for e in events:
        net[bucket_index(e.date, start, level)] += e.quantity
    return DemandSeries(sku_id=sku_id, level=level, start=start,
                        values=tuple(max(0, v) for v in net))


_DAILY_TARGETS = {AggregationLevel.WEEKLY, AggregationLevel.BIWEEKLY,
                  AggregationLevel.MONTHLY, AggregationLevel.QUARTERLY}


def aggregate(s: DemandSeries, target: AggregationLevel) -> DemandSeries:
    """Re-bucket a series to a coarser, calendar-compatible level.

    Integer sums are preserved except for a possibly incomplete final
    bucket, which is dropped and recorded in the series notes.
    """
    if s.level is AggregationLevel.DAILY and target in _DAILY_TARGETS:
        return _aggregate_daily(s, target)
    if s.level is AggregationLevel.WEEKLY and target is AggregationLevel.BIWEEKLY:
        return _aggregate_weekly_to_biweekly(s)
    raise IncompatibleLevels(f"cannot aggregate {s.level.value} -> {target.value}")


def _aggregate_daily(s: DemandSeries, target: AggregationLevel) -> DemandSeries:
    days = s.bucket_dates()
    last_day = days[-1]
    anchor = _week_start(s.start)
    start = bucket_start(s.start, target, anchor)
    n = bucket_index(last_day, start, target) + 1
    sums = [0] * n
    for day, v in zip(days, s.values):
        sums[bucket_index(day, start, target)] += v
    notes = list(s.notes)
    # final bucket incomplete unless the series covers its last calendar day
    if _bucket_end(bucket_date(start, target, n - 1), target) > last_day:
        dropped = sums.pop()
        notes.append(f"dropped partial final bucket (sum {dropped})")
    if not sums:
        raise EmptyHistory("aggregation leaves no complete bucket")
    return DemandSeries(sku_id=s.sku_id, level=target, start=start,
                        values=tuple(sums), provenance=s.provenance, notes=tuple(notes))


def _aggregate_weekly_to_biweekly(s: DemandSeries) -> DemandSeries:
    notes = list(s.notes)
    values = list(s.values)
    if len(values) % 2 == 1:
        notes.append(f"dropped partial final bucket (sum {values[-1]})")
        values = values[:-1]
    if not values:
        raise EmptyHistory("aggregation leaves no complete bucket")
    pairs = [values[i] + values[i + 1] for i in range(0, len(values), 2)]
    return DemandSeries(sku_id=s.sku_id, level=AggregationLevel.BIWEEKLY, start=s.start,
                        values=tuple(pairs), provenance=s.provenance, notes=tuple(notes))


def impute(s: DemandSeries, known_gaps: Iterable[int]) -> DemandSeries:
    """Replace known-gap buckets by linear interpolation of the nearest
    non-gap neighbours (rounded half-up); boundary gaps copy the nearest
    non-gap value."""
    gaps = set(known_gaps)
    n = len(s.values)
    for i in gaps:
        if not (0 <= i < n):
            raise IndexOutOfRange(f"gap index {i} outside [0, {n})")
    if not gaps:
        return s
    known = [i for i in range(n) if i not in gaps]
    if not known:
        raise IndexOutOfRange("every bucket marked as a gap")
    values = list(s.values)
    for i in sorted(gaps):
        left = max((j for j in known if j < i), default=None)
        right = min((j for j in known if j > i), default=None)
        if left is None:
            values[i] = values[right]
        elif right is None:
            values[i] = values[left]
        else:
            frac = Fraction(values[left]) + Fraction(values[right] - values[left]) \
                * Fraction(i - left, right - left)
            values[i] = round_half_up(frac)
    return replace(s, values=tuple(values), provenance=Provenance.IMPUTED)


def apply_resolutions(s: DemandSeries, rs: Sequence[ExceptionResolution]) -> DemandSeries:
    """Apply user decisions on flagged buckets: keep, reduce to a fraction
    (rounded half-up), or replace outright."""
    n = len(s.values)
    values = list(s.values)
    changed = False
    for r in rs:
        if r.sku_id != s.sku_id:
            continue
        if not (0 <= r.bucket_index < n):
            raise IndexOutOfRange(f"resolution index {r.bucket_index} outside [0, {n})")
        if r.action is ResolutionAction.KEEP:
            continue
        if r.action is ResolutionAction.REDUCE_FRACTION:
            values[r.bucket_index] = round_half_up(
                Fraction(str(r.param)) * values[r.bucket_index])
        else:
            values[r.bucket_index] = int(r.param)
        changed = True
    if not changed:
        return s
    return replace(s, values=tuple(values), provenance=Provenance.EXCEPTION_ADJUSTED)
