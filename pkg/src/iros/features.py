"""Shape features of demand series for clustering.

A series is decomposed once into trend + seasonal + remainder (classical
additive form), then summary statistics are computed on the original
values and on the remainder ("adjusted" basis). Feature matrices are
min-max scaled per column before any distance-based clustering.

Structure:
    decompose          classical additive decomposition
    extract_features   one FeatureVector per series
    scale_matrix       column-wise [0, 1] scaling
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import TooFewRows, TooShort

__all__ = [
    "DecomposedSeries",
    "FeatureVector",
    "FEATURE_NAMES",
    "decompose",
    "extract_features",
    "feature_matrix",
    "scale_matrix",
]


@dataclass(frozen=True)
class DecomposedSeries:
    """Additive decomposition: trend + seasonal + remainder == input."""

    trend: tuple[float, ...]
    seasonal: tuple[float, ...]
    remainder: tuple[float, ...]
    period: int

    def reconstruct(self) -> tuple[float, ...]:
        return tuple(
            t + s + r
            for t, s, r in zip(self.trend, self.seasonal, self.remainder)
        )


@dataclass(frozen=True)
class FeatureVector:
    """One row of the clustering feature matrix.

    Field order is the emission order of feature_matrix and of the
    features CSV. Strengths come from the decomposition; the *_adj
    variants are computed on the remainder after removing trend and
    seasonality; chaos, self_similarity, variation and intermittency
    are defined on the original values only.
    """

    sku_id: str
    trend_strength: float
    seasonality_strength: float
    serial_correlation_orig: float
    serial_correlation_adj: float
    skewness_orig: float
    skewness_adj: float
    kurtosis_orig: float
    kurtosis_adj: float
    stationarity_orig: float
    stationarity_adj: float
    chaos: float
    self_similarity: float
    variation: float
    intermittency: float

    def values(self) -> tuple[float, ...]:
        return tuple(
            getattr(self, f.name)
            for f in dataclasses.fields(self)
            if f.name != "sku_id"
        )


FEATURE_NAMES: tuple[str, ...] = tuple(
    f.name for f in dataclasses.fields(FeatureVector) if f.name != "sku_id"
)


def _moving_trend(x: np.ndarray, period: int) -> np.ndarray:
    """Centred moving average; even periods use the 2xm convention."""
    n = x.size
    if period % 2 == 1:
        kernel = np.full(period, 1.0 / period)
        half = period // 2
    else:
        kernel = np.full(period + 1, 1.0 / period)
        kernel[0] = kernel[-1] = 0.5 / period
        half = period // 2
    core = np.convolve(x, kernel, mode="valid")
    trend = np.empty(n)
    trend[half:half + core.size] = core
    # edges take the nearest interior value
    trend[:half] = core[0]
    trend[half + core.size:] = core[-1]
    return trend


def decompose(x: Sequence[float], period: int) -> DecomposedSeries:
    """Classical additive decomposition with de-meaned seasonal means.

    Requires at least two full periods. The remainder is the exact
    residual, so the three parts always reconstruct the input.
    """
    vals = np.asarray(x, dtype=float)
    n = vals.size
    if period < 2:
        raise TooShort(f"period must be >= 2, got {period}")
    if n < 2 * period:
        raise TooShort(f"need >= {2 * period} points for period {period}, got {n}")

    trend = _moving_trend(vals, period)
    detrended = vals - trend
    means = np.array([detrended[i::period].mean() for i in range(period)])
    means -= means.mean()
    seasonal = np.resize(means, n)
    remainder = vals - trend - seasonal
    return DecomposedSeries(
        trend=tuple(trend.tolist()),
        seasonal=tuple(seasonal.tolist()),
        remainder=tuple(remainder.tolist()),
        period=period,
    )


def _autocorr1(x: np.ndarray) -> float:
    d = x - x.mean()
    denom = float(d @ d)
    if denom == 0.0:
        return 0.0
    return float(d[:-1] @ d[1:]) / denom


def _skewness(x: np.ndarray) -> float:
    d = x - x.mean()
    s2 = float((d * d).mean())
    if s2 == 0.0:
        return 0.0
    return float((d ** 3).mean()) / s2 ** 1.5


def _kurtosis(x: np.ndarray) -> float:
    d = x - x.mean()
    s2 = float((d * d).mean())
    if s2 == 0.0:
        return 0.0
    return float((d ** 4).mean()) / s2 ** 2 - 3.0


def _stationarity(x: np.ndarray) -> float:
    """Absolute log ratio of first-half to second-half variance.

    A constant half is floored at 1e-9 of the other half's variance so
    the ratio stays finite; both halves constant gives 0.
    """
    half = x.size // 2
    v1 = float(np.var(x[:half]))
    v2 = float(np.var(x[half:]))
    if v1 == 0.0 and v2 == 0.0:
        return 0.0
    floor = 1e-9 * max(v1, v2)
    return abs(math.log(max(v1, floor) / max(v2, floor)))


def _lyapunov(x: np.ndarray, period: int) -> float:
    """Largest Lyapunov exponent, Rosenstein estimate.

    Embedding dimension 3, delay 1. Nearest neighbours must be at least
    one seasonal period apart in time; the exponent is the least-squares
    slope of the mean log divergence over the first few steps.
    """
    dim, follow = 3, 8
    m = x.size - dim + 1
    emb = np.column_stack([x[i:i + m] for i in range(dim)])
    sep = max(period, 1)
    usable = m - follow
    if usable <= sep + 1:
        return 0.0
    dists = np.linalg.norm(emb[:usable, None, :] - emb[None, :usable, :], axis=2)
    idx = np.arange(usable)
    too_close = np.abs(idx[:, None] - idx[None, :]) <= sep
    dists[too_close] = np.inf
    nn = np.argmin(dists, axis=1)
    valid = np.isfinite(dists[idx, nn])
    if not valid.any():
        return 0.0
    pairs = np.column_stack([idx[valid], nn[valid]])
    logs = []
    for k in range(follow + 1):
        d = np.linalg.norm(emb[pairs[:, 0] + k] - emb[pairs[:, 1] + k], axis=1)
        d = d[d > 0]
        if d.size == 0:
            logs.append(np.nan)
        else:
            logs.append(float(np.log(d).mean()))
    y = np.asarray(logs)
    ks = np.arange(follow + 1, dtype=float)
    ok = np.isfinite(y)
    if ok.sum() < 2:
        return 0.0
    slope = np.polyfit(ks[ok], y[ok], 1)[0]
    return float(slope)


def _hurst(x: np.ndarray) -> float:
    """Rescaled-range Hurst exponent over geometric window sizes."""
    n = x.size
    sizes = []
    size = 8
    while size <= n // 2:
        sizes.append(size)
        size = int(math.ceil(size * 1.5))
    if len(sizes) < 2:
        return 0.5
    pts = []
    for w in sizes:
        ratios = []
        for start in range(0, n - w + 1, w):
            block = x[start:start + w]
            dev = block - block.mean()
            z = np.cumsum(dev)
            r = float(z.max() - z.min())
            s = float(block.std())
            if s > 0:
                ratios.append(r / s)
        if ratios:
            pts.append((math.log(w), math.log(np.mean(ratios))))
    if len(pts) < 2:
        return 0.5
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    return float(np.polyfit(xs, ys, 1)[0])


def extract_features(
    x: Sequence[float], period: int, sku_id: str = ""
) -> FeatureVector:
    """Feature vector for one series.

    Zero-variance input is a supported degenerate case: every moment
    and strength is 0 by convention, intermittency still counts zeros.
    """
    vals = np.asarray(x, dtype=float)
    n = vals.size
    if n < max(2 * period, 20):
        raise TooShort(
            f"need >= {max(2 * period, 20)} points for period {period}, got {n}"
        )

    zeros = int(np.count_nonzero(vals == 0.0))
    intermittency = zeros / n

    if float(np.var(vals)) == 0.0:
        return FeatureVector(
            sku_id=sku_id,
            trend_strength=0.0, seasonality_strength=0.0,
            serial_correlation_orig=0.0, serial_correlation_adj=0.0,
            skewness_orig=0.0, skewness_adj=0.0,
            kurtosis_orig=0.0, kurtosis_adj=0.0,
            stationarity_orig=0.0, stationarity_adj=0.0,
            chaos=0.0, self_similarity=0.5,
            variation=0.0, intermittency=intermittency,
        )

    dec = decompose(vals, period)
    trend = np.asarray(dec.trend)
    seasonal = np.asarray(dec.seasonal)
    remainder = np.asarray(dec.remainder)

    var_rem = float(np.var(remainder))
    var_deseason = float(np.var(vals - seasonal))
    var_detrend = float(np.var(vals - trend))
    trend_strength = (
        max(0.0, 1.0 - var_rem / var_deseason) if var_deseason > 0 else 0.0
    )
    seasonality_strength = (
        max(0.0, 1.0 - var_rem / var_detrend) if var_detrend > 0 else 0.0
    )

    mu = float(vals.mean())
    variation = float(vals.std()) / mu if mu > 0 else 0.0

    return FeatureVector(
        sku_id=sku_id,
        trend_strength=trend_strength,
        seasonality_strength=seasonality_strength,
        serial_correlation_orig=_autocorr1(vals),
        serial_correlation_adj=_autocorr1(remainder),
        skewness_orig=_skewness(vals),
        skewness_adj=_skewness(remainder),
        kurtosis_orig=_kurtosis(vals),
        kurtosis_adj=_kurtosis(remainder),
        stationarity_orig=_stationarity(vals),
        stationarity_adj=_stationarity(remainder),
        chaos=_lyapunov(vals, period),
        self_similarity=_hurst(vals),
        variation=variation,
        intermittency=intermittency,
    )


def feature_matrix(rows: Sequence[FeatureVector]) -> np.ndarray:
    return np.array([row.values() for row in rows], dtype=float)


def scale_matrix(rows) -> np.ndarray:
    """Min-max scale each column to [0, 1]; constant columns become 0.5."""
    if len(rows) and isinstance(rows[0], FeatureVector):
        mat = feature_matrix(rows)
    else:
        mat = np.asarray(rows, dtype=float)
    if mat.ndim != 2 or mat.shape[0] < 2:
        raise TooFewRows("need at least 2 rows to scale")
    lo = mat.min(axis=0)
    hi = mat.max(axis=0)
    span = hi - lo
    out = np.empty_like(mat, dtype=float)
    for j in range(mat.shape[1]):
        if span[j] == 0:
            out[:, j] = 0.5
        else:
            out[:, j] = (mat[:, j] - lo[j]) / span[j]
    return out
