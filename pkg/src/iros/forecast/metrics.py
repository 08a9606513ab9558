"""Point-forecast accuracy metrics.

MASE scales errors by the in-sample seasonal naive error of the
training series, sMAPE is the symmetric percentage error bounded by
200, and OWA averages both relative to a reference model's scores.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ZeroReference, ZeroScale

__all__ = ["MetricValue", "mase", "smape", "owa"]


@dataclass(frozen=True)
class MetricValue:
    mase: float
    smape: float
    owa: float | None = None


def _values(x) -> np.ndarray:
    vals = getattr(x, "values", x)
    return np.asarray(vals, dtype=float)


def mase(forecast, actual, training, seasonal_m: int = 1) -> float:
    f = _values(forecast)
    a = _values(actual)
    train = _values(training)
    if f.size != a.size or f.size == 0:
        raise ZeroScale(f"forecast/actual lengths differ: {f.size} vs {a.size}")
    if train.size <= seasonal_m:
        raise ZeroScale(
            f"training length {train.size} must exceed seasonal lag {seasonal_m}"
        )
    scale = float(np.mean(np.abs(train[seasonal_m:] - train[:-seasonal_m])))
    if scale == 0.0:
        raise ZeroScale("constant training series gives a zero naive error")
    return float(np.mean(np.abs(f - a))) / scale


def smape(forecast, actual) -> float:
    f = _values(forecast)
    a = _values(actual)
    if f.size != a.size or f.size == 0:
        raise ZeroScale(f"forecast/actual lengths differ: {f.size} vs {a.size}")
    denom = np.abs(f) + np.abs(a)
    terms = np.zeros(f.size)
    nz = denom > 0
    terms[nz] = 200.0 * np.abs(f[nz] - a[nz]) / denom[nz]
    return float(terms.mean())


def owa(model_metrics: MetricValue, reference_metrics: MetricValue) -> float:
    if reference_metrics.smape <= 0.0 or reference_metrics.mase <= 0.0:
        raise ZeroReference("reference metrics must be positive")
    return 0.5 * (
        model_metrics.smape / reference_metrics.smape
        + model_metrics.mase / reference_metrics.mase
    )
