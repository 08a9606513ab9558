"""Unsupervised exception detection on demand series.

Four detectors produce per-bucket anomaly scores plus boolean flags:

    iqr       distance beyond the quartile fence, in IQR units
    quantile  distance beyond empirical quantile bounds
    ar        autoregressive residuals in sigma units
    seasonal  decomposition remainder in sigma units

roc_auc scores detectors against labelled corpora, and
flag_forecast_deviations compares realized demand with a forecast to
label a SKU stable or unstable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import rankdata

from .demand import DemandSeries, ExceptionResolution, apply_resolutions
from .errors import ConfigError, DegenerateLabels, NoOverlap, TooShort
from .features import decompose

__all__ = [
    "Detector",
    "Stability",
    "DetectorConfig",
    "AnomalyReport",
    "detect",
    "roc_auc",
    "compare_detectors",
    "flag_forecast_deviations",
    "dominant_period",
]


class Detector(str, Enum):
    IQR = "iqr"
    QUANTILE = "quantile"
    AR = "ar"
    SEASONAL = "seasonal"


class Stability(str, Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"


@dataclass(frozen=True)
class DetectorConfig:
    """Detector parameters; None means choose automatically."""

    iqr_c: float = 3.0
    q_low: float = 0.01
    q_high: float = 0.99
    ar_order: int | None = None
    ar_k: float = 3.0
    seasonal_period: int | None = None
    seasonal_k: float = 3.0

    def __post_init__(self) -> None:
        if not (0.0 <= self.q_low < self.q_high <= 1.0):
            raise ConfigError(
                f"need 0 <= q_low < q_high <= 1, got ({self.q_low}, {self.q_high})"
            )
        for name in ("iqr_c", "ar_k", "seasonal_k"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be > 0")
        if self.ar_order is not None and self.ar_order < 1:
            raise ConfigError("ar_order must be >= 1")
        if self.seasonal_period is not None and self.seasonal_period < 2:
            raise ConfigError("seasonal_period must be >= 2")


@dataclass(frozen=True)
class AnomalyReport:
    sku_id: str
    detector: Detector
    scores: tuple[float, ...]
    flags: tuple[bool, ...]
    config: DetectorConfig


def _series_values(series) -> tuple[str, np.ndarray]:
    if isinstance(series, DemandSeries):
        return series.sku_id, np.asarray(series.values, dtype=float)
    return "", np.asarray(series, dtype=float)


def _autocorrelations(x: np.ndarray, max_lag: int) -> np.ndarray:
    d = x - x.mean()
    denom = float(d @ d)
    if denom == 0.0:
        return np.zeros(max_lag + 1)
    out = np.empty(max_lag + 1)
    out[0] = 1.0
    for lag in range(1, max_lag + 1):
        out[lag] = float(d[:-lag] @ d[lag:]) / denom
    return out


def dominant_period(x: Sequence[float], min_acf: float = 0.3) -> int | None:
    """Lag in [2, len/3] with the highest autocorrelation, if above min_acf."""
    vals = np.asarray(x, dtype=float)
    max_lag = vals.size // 3
    if max_lag < 2:
        return None
    acf = _autocorrelations(vals, max_lag)
    lag = int(np.argmax(acf[2:])) + 2
    if acf[lag] <= min_acf:
        return None
    return lag


def _robust_scale(vals: np.ndarray) -> float:
    """Median absolute deviation of the nonzero deviations, scaled 1.4826.

    Plain MAD collapses to 0 on mostly-constant series, so only the
    nonzero deviations vote; 0 means the series is constant.
    """
    dev = np.abs(vals - np.median(vals))
    dev = dev[dev > 0]
    if dev.size == 0:
        return 0.0
    return float(np.median(dev)) * 1.4826


def _fence_scores(vals: np.ndarray, lo: float, hi: float, scale: float) -> np.ndarray:
    scores = np.zeros(vals.size)
    below = vals < lo
    above = vals > hi
    scores[below] = (lo - vals[below]) / scale
    scores[above] = (vals[above] - hi) / scale
    return scores


def _fit_ar(vals: np.ndarray, order: int) -> tuple[np.ndarray, float]:
    """Least-squares AR(order) with intercept; returns (residuals, ssr)."""
    n = vals.size
    rows = n - order
    design = np.column_stack(
        [np.ones(rows)] + [vals[order - lag - 1:n - lag - 1] for lag in range(order)]
    )
    target = vals[order:]
    coef, *_ = np.linalg.lstsq(design, target, rcond=None)
    resid = target - design @ coef
    return resid, float(resid @ resid)


def _choose_ar_order(vals: np.ndarray, max_order: int) -> int:
    """AICc over a common sample that conditions on the largest lag."""
    n = vals.size
    best_order, best_aicc = 1, math.inf
    rows = n - max_order
    target = vals[max_order:]
    for p in range(1, max_order + 1):
        design = np.column_stack(
            [np.ones(rows)]
            + [vals[max_order - lag - 1:n - lag - 1] for lag in range(p)]
        )
        coef, *_ = np.linalg.lstsq(design, target, rcond=None)
        resid = target - design @ coef
        ssr = max(float(resid @ resid), 1e-300)
        k = p + 1
        aicc = rows * math.log(ssr / rows) + 2 * k
        if rows - k - 1 > 0:
            aicc += 2 * k * (k + 1) / (rows - k - 1)
        if aicc < best_aicc:
            best_order, best_aicc = p, aicc
    return best_order


def _detect_iqr(vals: np.ndarray, cfg: DetectorConfig) -> tuple[np.ndarray, np.ndarray]:
    q1, q3 = np.percentile(vals, [25.0, 75.0])
    iqr = float(q3 - q1)
    scale = iqr if iqr > 0 else _robust_scale(vals)
    lo = q1 - cfg.iqr_c * iqr
    hi = q3 + cfg.iqr_c * iqr
    scores = _fence_scores(vals, lo, hi, scale)
    return scores, scores > 0


def _detect_quantile(vals: np.ndarray, cfg: DetectorConfig) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = np.quantile(vals, [cfg.q_low, cfg.q_high])
    spread = float(hi - lo)
    scale = spread if spread > 0 else _robust_scale(vals)
    scores = _fence_scores(vals, float(lo), float(hi), scale)
    return scores, scores > 0


def _detect_ar(vals: np.ndarray, cfg: DetectorConfig) -> tuple[np.ndarray, np.ndarray]:
    n = vals.size
    if cfg.ar_order is not None:
        order = cfg.ar_order
        if n < 3 * order:
            raise TooShort(f"ar order {order} needs >= {3 * order} points, got {n}")
    else:
        max_order = min(10, n // 3)
        if max_order < 1:
            raise TooShort(f"ar needs >= 3 points, got {n}")
        order = _choose_ar_order(vals, max_order)
    resid, ssr = _fit_ar(vals, order)
    rows = resid.size
    dof = rows - (order + 1) - 1
    sigma = math.sqrt(ssr / dof) if dof >= 1 else math.sqrt(ssr / rows)
    scores = np.zeros(n)
    if sigma > 0:
        # warm-up points have no prediction and keep score 0
        scores[order:] = np.abs(resid) / sigma
    return scores, scores > cfg.ar_k


def _detect_seasonal(vals: np.ndarray, cfg: DetectorConfig) -> tuple[np.ndarray, np.ndarray]:
    n = vals.size
    if cfg.seasonal_period is not None:
        period = cfg.seasonal_period
    else:
        period = dominant_period(vals)
        if period is None:
            raise TooShort("no dominant seasonal period found")
    if n < 3 * period:
        raise TooShort(f"seasonal period {period} needs >= {3 * period} points, got {n}")
    remainder = np.asarray(decompose(vals, period).remainder)
    sigma = float(remainder.std())
    scores = np.abs(remainder) / sigma if sigma > 0 else np.zeros(n)
    return scores, scores > cfg.seasonal_k


def detect(series, detector: Detector, cfg: DetectorConfig | None = None) -> AnomalyReport:
    """Score every bucket of a series with one detector.

    Zero-variance series take the degenerate path: all scores zero and
    nothing flagged.
    """
    cfg = cfg or DetectorConfig()
    detector = Detector(detector)
    sku_id, vals = _series_values(series)
    n = vals.size

    if detector in (Detector.IQR, Detector.QUANTILE) and n < 4:
        raise TooShort(f"{detector.value} needs >= 4 points, got {n}")

    if n and float(np.var(vals)) == 0.0:
        zeros = tuple(0.0 for _ in range(n))
        return AnomalyReport(sku_id, detector, zeros, tuple([False] * n), cfg)

    if detector is Detector.IQR:
        scores, flags = _detect_iqr(vals, cfg)
    elif detector is Detector.QUANTILE:
        scores, flags = _detect_quantile(vals, cfg)
    elif detector is Detector.AR:
        scores, flags = _detect_ar(vals, cfg)
    else:
        scores, flags = _detect_seasonal(vals, cfg)
    return AnomalyReport(
        sku_id, detector, tuple(scores.tolist()), tuple(bool(f) for f in flags), cfg
    )


def roc_auc(scores: Sequence[float], labels: Sequence[bool]) -> float:
    """Probability a random positive outscores a random negative, ties half."""
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=bool)
    if s.size != y.size:
        raise DegenerateLabels(f"length mismatch: {s.size} scores, {y.size} labels")
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabels("need at least one positive and one negative label")
    ranks = rankdata(s)
    u = float(ranks[y].sum()) - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


DETECTOR_ORDER: tuple[Detector, ...] = (
    Detector.IQR,
    Detector.QUANTILE,
    Detector.AR,
    Detector.SEASONAL,
)


def compare_detectors(
    corpus: Iterable[tuple[Sequence[float], Sequence[bool]]],
    cfg: DetectorConfig | None = None,
) -> list[tuple[Detector, float]]:
    """Mean AUC per detector over a labelled corpus, fixed row order."""
    cfg = cfg or DetectorConfig()
    items = list(corpus)
    if not items:
        raise DegenerateLabels("empty corpus")
    table = []
    for det in DETECTOR_ORDER:
        aucs = [
            roc_auc(detect(series, det, cfg).scores, labels)
            for series, labels in items
        ]
        table.append((det, float(np.mean(aucs))))
    return table


def flag_forecast_deviations(
    actual,
    forecast,
    cfg: DetectorConfig | None = None,
    resolutions: Sequence[ExceptionResolution] = (),
) -> tuple[AnomalyReport, Stability]:
    """Compare realized demand with its forecast over the common window.

    Scores are absolute errors in units of the forecast's in-sample
    error sigma (falling back to the sigma of the window errors when the
    forecast does not carry one). Resolutions are applied to the actual
    series first; the SKU is unstable while any flag survives them.
    """
    cfg = cfg or DetectorConfig()
    if resolutions and isinstance(actual, DemandSeries):
        actual = apply_resolutions(actual, resolutions)
    sku_id, vals = _series_values(actual)

    point = np.asarray(getattr(forecast, "point", forecast), dtype=float)
    overlap = min(vals.size, point.size)
    if overlap < 1:
        raise NoOverlap("forecast and actual share no buckets")
    err = vals[:overlap] - point[:overlap]

    sigma = float(getattr(forecast, "insample_sigma", 0.0) or 0.0)
    if sigma <= 0.0:
        sigma = float(np.std(err))

    if sigma > 0.0:
        scores = np.abs(err) / sigma
    else:
        # perfect-fit degenerate case: any error at all is infinitely surprising
        scores = np.where(err == 0.0, 0.0, math.inf)
    flags = scores > cfg.ar_k
    report = AnomalyReport(
        sku_id,
        Detector.AR,
        tuple(float(s) for s in scores),
        tuple(bool(f) for f in flags),
        cfg,
    )
    stability = Stability.UNSTABLE if report.flags and any(report.flags) else Stability.STABLE
    return report, stability
