"""Deterministic synthetic fixtures for demos, benchmarks, and tests.

Tenant data cannot ship with the package, so everything here is generated
from fixed seeds: a container-constrained seasonal planning instance,
labelled anomaly corpora, a small multi-frequency forecasting bundle, and
a full dataset large enough to drive the whole pipeline end to end. The
magnitudes are arbitrary; what downstream code relies on is the structure
(seasonality, intermittency, trend, container pressure), so regenerating
with the same seed must always reproduce the same bytes.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np

from .core import (
    Dataset,
    DemandEvent,
    EventKind,
    OrderRecord,
    OrderStatus,
    SkuRecord,
    SupplierRecord,
)
from .replenish import PlanMode, ReplenishmentInstance, SkuGroup

__all__ = [
    "BenchmarkSeries",
    "ar_anomaly_corpus",
    "benchmark_bundle",
    "make_dataset",
    "seasonal_anomaly_corpus",
    "seasonal_replenishment_instance",
]


# --- replenishment fixture -------------------------------------------------

def seasonal_replenishment_instance(horizon: int = 26) -> ReplenishmentInstance:
    """Five seasonal SKUs sharing one supplier's containers.

    Demand follows phase-shifted 13-period sine waves, so a fixed
    periods-of-supply policy keeps ordering into troughs. Container caps
    are tight enough that consolidation matters.
    """
    rng = np.random.default_rng(42)
    n = 5
    demand = []
    for i in range(n):
        phase = rng.integers(0, 13)
        base = 6.0 + (2.0 + i) * np.sin(2.0 * np.pi * (np.arange(horizon) + phase) / 13.0)
        demand.append(tuple(int(round(max(0.0, v))) for v in base))
    return ReplenishmentInstance(
        group=SkuGroup("sup1", "sup1", tuple(f"P{i}" for i in range(n))),
        horizon=horizon,
        demand=tuple(demand),
        unit_cost=(120, 80, 200, 60, 150),
        unit_price=(180, 120, 300, 90, 225),
        holding_rate=0.02,
        container_cost=5000,
        unit_volume=(0.4, 0.2, 0.6, 0.1, 0.3),
        unit_mass=(2.0, 1.0, 3.0, 0.5, 1.5),
        volume_cap=60.0,
        mass_cap=400.0,
        moq=(5, 10, 2, 20, 5),
        lead_time=2,
        init_inventory=(30, 25, 12, 40, 18),
        init_backorders=(0, 0, 0, 0, 0),
        arrivals=tuple((0,) * horizon for _ in range(n)),
        service_level=(0.95, 0.9, 0.95, 0.9, 0.95),
        shortage_penalty=(480, 320, 800, 240, 600),
        mode=PlanMode.OPERATIONAL,
        min_fill=0.9,
    )


# --- labelled anomaly corpora ----------------------------------------------

def _inject_spikes(rng, values: np.ndarray, sigma: float, first: int,
                   lo: float = 3.5, hi: float = 6.0) -> np.ndarray:
    """Add isolated +-[lo, hi] sigma outliers, at least one per series."""
    n = values.size
    labels = np.zeros(n, dtype=bool)
    count = int(rng.integers(2, 5))
    positions = rng.choice(np.arange(first, n), size=count, replace=False)
    for pos in positions:
        sign = 1.0 if rng.random() < 0.5 else -1.0
        values[pos] += sign * float(rng.uniform(lo, hi)) * sigma
        labels[pos] = True
    return labels


def seasonal_anomaly_corpus(
    n_series: int = 30, length: int = 120, seed: int = 17,
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Sinusoidal series with injected spikes, labelled for AUC checks.

    The seasonal amplitude dwarfs the spike size, so detectors that do not
    remove the cycle first drown in false positives.
    """
    rng = np.random.default_rng(seed)
    period = 12
    corpus = []
    for _ in range(n_series):
        amplitude = float(rng.uniform(8.0, 15.0))
        sigma = float(rng.uniform(0.8, 1.5))
        phase = float(rng.uniform(0.0, period))
        t = np.arange(length, dtype=float)
        values = 50.0 + amplitude * np.sin(2.0 * np.pi * (t + phase) / period)
        values += rng.normal(0.0, sigma, size=length)
        labels = _inject_spikes(rng, values, sigma, first=period)
        corpus.append((values, labels))
    return corpus


def ar_anomaly_corpus(
    n_series: int = 30, length: int = 160, seed: int = 23,
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Autocorrelated series with additive outliers, labelled for AUC checks."""
    rng = np.random.default_rng(seed)
    corpus = []
    for _ in range(n_series):
        phi1 = float(rng.uniform(0.5, 0.7))
        phi2 = float(rng.uniform(-0.3, -0.1))
        sigma = float(rng.uniform(0.8, 1.5))
        mean = 40.0
        c = mean * (1.0 - phi1 - phi2)
        warmup = 30
        total = length + warmup
        eps = rng.normal(0.0, sigma, size=total)
        y = np.full(total, mean)
        for i in range(2, total):
            y[i] = c + phi1 * y[i - 1] + phi2 * y[i - 2] + eps[i]
        values = y[warmup:].copy()
        labels = _inject_spikes(rng, values, sigma, first=5)
        corpus.append((values, labels))
    return corpus


# --- forecasting benchmark bundle -------------------------------------------

@dataclass(frozen=True)
class BenchmarkSeries:
    """One holdout evaluation unit: train history plus unseen actuals."""
    name: str
    frequency: str
    period: int
    horizon: int
    train: tuple[float, ...]
    test: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.test) != self.horizon:
            raise ValueError(f"{self.name}: test length != horizon")


_FREQ_SHAPE = {
    # frequency -> (seasonal period, holdout horizon, train length)
    "monthly": (12, 18, 96),
    "quarterly": (4, 8, 48),
    "yearly": (1, 6, 31),
}


def _monthly(rng, kind: str, n: int) -> np.ndarray:
    t = np.arange(n, dtype=float)
    level = float(rng.uniform(80.0, 160.0))
    season = 1.0 + 0.35 * np.sin(2.0 * np.pi * (t + rng.uniform(0, 12)) / 12.0)
    if kind == "seasonal_trend":
        trend = 1.0 + float(rng.uniform(0.002, 0.006)) * t
        y = level * trend * season
    elif kind == "seasonal_stable":
        y = level * season
    else:  # intermittent
        p = float(rng.uniform(0.25, 0.4))
        hits = rng.random(n) < p
        sizes = rng.integers(1, 5, size=n).astype(float)
        return hits * sizes
    return y * (1.0 + rng.normal(0.0, 0.02, size=n))


def _quarterly(rng, kind: str, n: int) -> np.ndarray:
    t = np.arange(n, dtype=float)
    level = float(rng.uniform(200.0, 400.0))
    if kind == "trend":
        y = level + float(rng.uniform(2.0, 6.0)) * t
    elif kind == "damped":
        ceiling = level * float(rng.uniform(1.8, 2.5))
        rate = float(rng.uniform(0.05, 0.12))
        y = ceiling - (ceiling - level) * np.exp(-rate * t)
    else:  # seasonal
        season = 1.0 + 0.25 * np.sin(2.0 * np.pi * (t + rng.uniform(0, 4)) / 4.0)
        y = level * season
    return y * (1.0 + rng.normal(0.0, 0.025, size=n))


def _yearly(rng, kind: str, n: int) -> np.ndarray:
    t = np.arange(n, dtype=float)
    level = float(rng.uniform(500.0, 1500.0))
    if kind == "growth":
        y = level * (1.0 + float(rng.uniform(0.03, 0.07))) ** t
        y *= 1.0 + rng.normal(0.0, 0.03, size=n)
    elif kind == "level":
        y = np.empty(n)
        y[0] = level
        theta = float(rng.uniform(0.2, 0.4))
        for i in range(1, n):
            y[i] = y[i - 1] + theta * (level - y[i - 1]) + rng.normal(0.0, 0.04 * level)
    else:  # drift walk
        drift = float(rng.uniform(5.0, 20.0))
        steps = drift + rng.normal(0.0, 0.05 * level, size=n)
        y = level + np.cumsum(steps)
    return np.maximum(y, 1.0)


_BUNDLE_PLAN = (
    ("monthly", "seasonal_trend", 5),
    ("monthly", "seasonal_stable", 5),
    ("monthly", "intermittent", 4),
    ("quarterly", "trend", 5),
    ("quarterly", "damped", 4),
    ("quarterly", "seasonal", 4),
    ("yearly", "growth", 5),
    ("yearly", "level", 4),
    ("yearly", "walk", 4),
)

_FREQ_GEN = {"monthly": _monthly, "quarterly": _quarterly, "yearly": _yearly}


def benchmark_bundle(seed: int = 7) -> list[BenchmarkSeries]:
    """Forty series over three observation frequencies with fixed holdouts.

    Archetypes are chosen so no single model family dominates: seasonal
    shapes reward seasonal smoothing, yearly growth rewards trended
    models, and intermittent rows reward rate-based ones.
    """
    rng = np.random.default_rng(seed)
    out = []
    idx = 0
    for frequency, kind, count in _BUNDLE_PLAN:
        period, horizon, train_len = _FREQ_SHAPE[frequency]
        for _ in range(count):
            y = _FREQ_GEN[frequency](rng, kind, train_len + horizon)
            if kind != "intermittent" and np.any(y <= 0.0):
                y = np.maximum(y, 1.0)
            out.append(BenchmarkSeries(
                name=f"b{idx:02d}_{frequency}_{kind}",
                frequency=frequency,
                period=period,
                horizon=horizon,
                train=tuple(float(v) for v in y[:train_len]),
                test=tuple(float(v) for v in y[train_len:]),
            ))
            idx += 1
    return out


# --- full synthetic dataset --------------------------------------------------

_ARCHETYPES = ("steady", "seasonal", "trend", "intermittent", "lumpy")

_SUPPLIERS = (
    # id, name, lead weeks, volume cap m3, mass cap kg, container cost minor
    ("sup1", "Harbor Components", 1, 60.0, 24000.0, 180000),
    ("sup2", "Meridian Supply", 2, 60.0, 24000.0, 220000),
    ("sup3", "Axis Industrial", 2, 45.0, 20000.0, 200000),
    ("sup4", "Pacific Metals", 3, 60.0, 26000.0, 260000),
)


def _weekly_totals(rng, archetype: str, weeks: int) -> np.ndarray:
    """Integer weekly demand for one SKU, shaped by its archetype."""
    t = np.arange(weeks, dtype=float)
    if archetype == "steady":
        mu = float(rng.uniform(15.0, 50.0))
        y = rng.normal(mu, 0.12 * mu, size=weeks)
    elif archetype == "seasonal":
        mu = float(rng.uniform(15.0, 45.0))
        phase = float(rng.uniform(0.0, 13.0))
        y = mu * (1.0 + 0.5 * np.sin(2.0 * np.pi * (t + phase) / 13.0))
        y += rng.normal(0.0, 0.08 * mu, size=weeks)
    elif archetype == "trend":
        mu = float(rng.uniform(10.0, 30.0))
        slope = float(rng.uniform(0.05, 0.25)) * (1 if rng.random() < 0.7 else -1)
        y = mu + slope * t + rng.normal(0.0, 0.1 * mu, size=weeks)
    elif archetype == "intermittent":
        p = float(rng.uniform(0.25, 0.45))
        hits = rng.random(weeks) < p
        y = hits * rng.integers(1, 6, size=weeks)
    else:  # lumpy
        p = float(rng.uniform(0.2, 0.3))
        hits = rng.random(weeks) < p
        y = hits * rng.geometric(0.15, size=weeks)
    return np.maximum(np.rint(y), 0.0).astype(int)


def make_dataset(n_skus: int = 50, seed: int = 11) -> Dataset:
    """Synthetic catalog, two years of weekly demand, and open orders.

    SKUs cycle through five demand archetypes and round-robin across four
    suppliers. Weekly totals are emitted as dated sale events (sometimes
    split in two), with occasional returns and quotes mixed in so the
    consolidation paths all get exercised.
    """
    rng = np.random.default_rng(seed)
    weeks = 104
    start = dt.date(2023, 7, 3)  # a Monday, so weekly buckets align
    as_of = start + dt.timedelta(weeks=weeks) - dt.timedelta(days=1)

    suppliers = [
        SupplierRecord(sid, name, lead, vol, mass, cost)
        for sid, name, lead, vol, mass, cost in _SUPPLIERS
    ]

    skus = []
    events: list[DemandEvent] = []
    for i in range(n_skus):
        sku_id = f"SKU{i:03d}"
        archetype = _ARCHETYPES[i % len(_ARCHETYPES)]
        supplier = _SUPPLIERS[i % len(_SUPPLIERS)][0]
        totals = _weekly_totals(rng, archetype, weeks)
        mean_weekly = max(1.0, float(totals.mean()))

        unit_cost = int(rng.integers(300, 15000))
        unit_price = int(round(unit_cost * float(rng.uniform(1.25, 1.9))))
        lead = _SUPPLIERS[i % len(_SUPPLIERS)][2]
        # stock positions reflect a going concern: cover lead time plus a
        # review period at the busy end of the demand distribution, so even
        # a spiky forecast stays servable until the first order can arrive
        cover = max(mean_weekly, float(totals[-13:].max()),
                    float(np.percentile(totals, 90.0)))
        backorders = (int(rng.integers(1, max(2, int(mean_weekly // 2) + 1)))
                      if rng.random() < 0.1 else 0)
        skus.append(SkuRecord(
            sku_id=sku_id,
            description=f"{archetype} part {i:03d}",
            unit_cost=unit_cost,
            unit_price=unit_price,
            unit_mass=round(float(rng.uniform(0.2, 8.0)), 2),
            unit_volume=round(float(rng.uniform(0.002, 0.04)), 4),
            moq=int(rng.choice([1, 5, 10, 24])),
            supplier_id=supplier,
            inventory_level=backorders + int(round(
                cover * (lead + 2) * float(rng.uniform(0.9, 1.4)))),
            backorders=backorders,
        ))

        for w, qty in enumerate(totals):
            if qty <= 0:
                continue
            day = start + dt.timedelta(weeks=w, days=int(rng.integers(0, 5)))
            if qty >= 10 and rng.random() < 0.3:
                first = int(qty // 2)
                events.append(DemandEvent(day, sku_id, first, EventKind.SALE))
                events.append(DemandEvent(
                    day + dt.timedelta(days=1), sku_id, int(qty) - first, EventKind.SALE,
                ))
            else:
                events.append(DemandEvent(day, sku_id, int(qty), EventKind.SALE))
            # returns stay well under the week's sales so buckets never go negative
            if rng.random() < 0.02 and qty >= 5:
                events.append(DemandEvent(
                    day + dt.timedelta(days=2), sku_id, -int(qty // 5), EventKind.RETURN,
                ))
        if i % 10 == 0:
            for w in rng.choice(weeks, size=3, replace=False):
                day = start + dt.timedelta(weeks=int(w), days=5)
                events.append(DemandEvent(
                    day, sku_id, int(max(1, round(mean_weekly))), EventKind.QUOTE,
                ))

    orders: list[OrderRecord] = []
    serial = 0
    for i, sku in enumerate(skus):
        lead = _SUPPLIERS[i % len(_SUPPLIERS)][2]
        if rng.random() < 0.3:
            serial += 1
            placed = as_of - dt.timedelta(weeks=lead + 2)
            orders.append(OrderRecord(
                f"po-{serial:04d}", sku.sku_id,
                int(rng.integers(10, 80)), placed,
                placed + dt.timedelta(weeks=lead), OrderStatus.HISTORICAL,
            ))
        if rng.random() < 0.25:
            serial += 1
            placed = as_of - dt.timedelta(days=3)
            arrival = as_of + dt.timedelta(weeks=int(rng.integers(1, lead + 2)))
            orders.append(OrderRecord(
                f"po-{serial:04d}", sku.sku_id,
                int(rng.integers(10, 60)), placed, arrival, OrderStatus.CONFIRMED,
            ))

    return Dataset.build(skus, suppliers, orders, events, as_of=as_of)
