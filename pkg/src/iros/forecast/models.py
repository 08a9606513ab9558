"""Forecast model zoo.

Sixteen deterministic point-forecast families sharing one entry point,
fit_predict(spec, history, horizon). Smoothing parameters left out of a
spec are chosen by small in-sample grids, so a spec always identifies a
reproducible forecast. make_forecast wraps the raw forecast in a
ForecastResult with nonnegativity clamping and a holdout error sigma
used downstream for deviation flagging.

Family notes:
    croston / sba / tsb  intermittent-demand smoothers, flat forecasts
    croston_opt          croston with alpha tuned on in-sample MASE
    naive2_deseasonalized  naive after multiplicative seasonal
                           adjustment gated by a 90% autocorrelation test
    theta / theta_boxcox two-line theta method, optionally on a
                           Box-Cox transformed scale
    arima_grid           small (p,d,q) grid fitted by conditional sum
                           of squares, picked by corrected AIC
    ets_grid             additive error/trend/seasonal combinations
    linreg_lags          least squares on lag features, recursive
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from ..demand import DemandSeries
from ..errors import AllZeroHistory, ConfigError, HistoryTooShort, WindowOutOfRange

__all__ = [
    "ModelFamily",
    "ForecastModelSpec",
    "EnsembleSpec",
    "ForecastResult",
    "DemandSignal",
    "fit_predict",
    "make_forecast",
    "apply_signals",
]


class ModelFamily(str, Enum):
    """Enumeration order doubles as the simplicity order for tie-breaks."""

    NAIVE_LAST = "naive_last"
    NAIVE_SEASONAL = "naive_seasonal"
    NAIVE2_DESEASONALIZED = "naive2_deseasonalized"
    MEAN = "mean"
    SES = "ses"
    HOLT = "holt"
    DAMPED_HOLT = "damped_holt"
    THETA = "theta"
    THETA_BOXCOX = "theta_boxcox"
    CROSTON = "croston"
    CROSTON_OPT = "croston_opt"
    SBA = "sba"
    TSB = "tsb"
    ARIMA_GRID = "arima_grid"
    ETS_GRID = "ets_grid"
    LINREG_LAGS = "linreg_lags"


FAMILY_ALIASES = {
    "croston2": ModelFamily.CROSTON_OPT,
    "naive1": ModelFamily.NAIVE_LAST,
    "naive2": ModelFamily.NAIVE2_DESEASONALIZED,
    "theta_bc": ModelFamily.THETA_BOXCOX,
}

# families that quietly return a zero forecast on all-zero history
_ZERO_TOLERANT = {
    ModelFamily.NAIVE_LAST,
    ModelFamily.NAIVE_SEASONAL,
    ModelFamily.NAIVE2_DESEASONALIZED,
    ModelFamily.MEAN,
    ModelFamily.SES,
    ModelFamily.HOLT,
    ModelFamily.DAMPED_HOLT,
    ModelFamily.THETA,
    ModelFamily.THETA_BOXCOX,
    ModelFamily.CROSTON,
    ModelFamily.CROSTON_OPT,
    ModelFamily.SBA,
    ModelFamily.TSB,
}

_FLAT_FAMILIES = {
    ModelFamily.MEAN,
    ModelFamily.SES,
    ModelFamily.CROSTON,
    ModelFamily.CROSTON_OPT,
    ModelFamily.SBA,
    ModelFamily.TSB,
}


@dataclass(frozen=True)
class ForecastModelSpec:
    family: ModelFamily
    params: tuple[tuple[str, float | int], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", ModelFamily(
            FAMILY_ALIASES.get(self.family, self.family)
        ))
        object.__setattr__(self, "params", tuple(sorted(self.params)))
        for name in ("alpha", "beta", "gamma", "phi"):
            value = self.param(name)
            if value is not None and not (0.0 < float(value) < 1.0):
                raise ConfigError(f"{name}={value} outside (0, 1)")
        lags = self.param("lags")
        if lags is not None and int(lags) < 1:
            raise ConfigError(f"lags={lags} must be >= 1")
        period = self.param("period")
        if period is not None and int(period) < 1:
            raise ConfigError(f"period={period} must be >= 1")

    @classmethod
    def make(cls, family, **params) -> "ForecastModelSpec":
        return cls(family, tuple(params.items()))

    def param(self, name: str, default=None):
        for key, value in self.params:
            if key == name:
                return value
        return default

    def describe(self) -> str:
        inner = ",".join(f"{k}={v}" for k, v in self.params)
        return f"{self.family.value}({inner})" if inner else self.family.value


@dataclass(frozen=True)
class EnsembleSpec:
    members: tuple[ForecastModelSpec, ...]
    combiner: str = "mean"
    weights: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if not (1 <= len(self.members) <= 3):
            raise ConfigError("ensemble needs 1 to 3 members")
        if self.combiner not in ("mean", "weighted"):
            raise ConfigError(f"unknown combiner {self.combiner!r}")
        if self.combiner == "weighted":
            if self.weights is None or len(self.weights) != len(self.members):
                raise ConfigError("weighted combiner needs one weight per member")
            if any(w < 0 for w in self.weights) or abs(sum(self.weights) - 1.0) > 1e-9:
                raise ConfigError("weights must be nonnegative and sum to 1")

    def describe(self) -> str:
        return "+".join(m.describe() for m in self.members)


@dataclass(frozen=True)
class DemandSignal:
    sku_id: str
    start_bucket: int
    end_bucket: int
    uplift: float

    def __post_init__(self) -> None:
        if self.uplift <= -1.0:
            raise ConfigError(f"uplift {self.uplift} must be > -1")
        if self.start_bucket < 0 or self.end_bucket < self.start_bucket:
            raise ConfigError("signal window is empty or negative")


@dataclass(frozen=True)
class ForecastResult:
    sku_id: str
    horizon: int
    point: tuple[float, ...]
    model: ForecastModelSpec | EnsembleSpec
    cv_score: object | None = None
    signals_applied: tuple[DemandSignal, ...] = ()
    clamped: bool = False
    all_zero: bool = False
    insample_sigma: float = 0.0


def _history_values(history) -> np.ndarray:
    if isinstance(history, DemandSeries):
        return np.asarray(history.values, dtype=float)
    return np.asarray(history, dtype=float)


# --- smoothing primitives ----------------------------------------------------

_ALPHA_GRID = tuple(round(0.05 * i, 2) for i in range(1, 20))


def _ses_level(y: np.ndarray, alpha: float) -> tuple[float, float]:
    """Final level and one-step in-sample SSE."""
    level = y[0]
    sse = 0.0
    for t in range(1, y.size):
        err = y[t] - level
        sse += err * err
        level += alpha * err
    return float(level), float(sse)


def _fit_ses(y: np.ndarray, alpha: float | None) -> float:
    if alpha is not None:
        return _ses_level(y, float(alpha))[0]
    best_level, best_sse = y[0], math.inf
    for a in _ALPHA_GRID:
        level, sse = _ses_level(y, a)
        if sse < best_sse - 1e-12:
            best_level, best_sse = level, sse
    return float(best_level)


def _holt_states(y: np.ndarray, alpha: float, beta: float, phi: float):
    level, trend = y[0], y[1] - y[0]
    sse = 0.0
    for t in range(1, y.size):
        pred = level + phi * trend
        err = y[t] - pred
        sse += err * err
        new_level = pred + alpha * err
        trend = phi * trend + alpha * beta * err
        level = new_level
    return level, trend, sse


_HOLT_ALPHAS = (0.1, 0.3, 0.5, 0.7, 0.9)
_HOLT_BETAS = (0.05, 0.1, 0.2, 0.4)
_PHI_GRID = (0.8, 0.9, 0.95, 0.98)


def _fit_holt(y: np.ndarray, spec: ForecastModelSpec, damped: bool):
    alpha = spec.param("alpha")
    beta = spec.param("beta")
    phi = spec.param("phi")
    alphas = (float(alpha),) if alpha is not None else _HOLT_ALPHAS
    betas = (float(beta),) if beta is not None else _HOLT_BETAS
    if damped:
        phis = (float(phi),) if phi is not None else _PHI_GRID
    else:
        phis = (1.0,)
    best = None
    for a in alphas:
        for b in betas:
            for p in phis:
                level, trend, sse = _holt_states(y, a, b, p)
                if best is None or sse < best[3] - 1e-12:
                    best = (level, trend, p, sse)
    level, trend, p, _ = best
    return level, trend, p


# --- intermittent-demand family -------------------------------------------------

def _croston_states(y: np.ndarray, alpha: float):
    """Size and interval smoothers after the final observed demand.

    The first demand initializes both states: size with its quantity,
    interval with its 1-indexed position. Later demands update by
    exponential smoothing with the shared alpha.
    """
    nz = np.flatnonzero(y > 0)
    size = float(y[nz[0]])
    interval = float(nz[0] + 1)
    prev = nz[0]
    for idx in nz[1:]:
        gap = float(idx - prev)
        size += alpha * (y[idx] - size)
        interval += alpha * (gap - interval)
        prev = idx
    return size, interval


def _croston_rate(y: np.ndarray, alpha: float) -> float:
    size, interval = _croston_states(y, alpha)
    return size / interval


def _croston_insample_mase(y: np.ndarray, alpha: float) -> float:
    """One-step in-sample MASE of the croston rate, naive scale."""
    nz = np.flatnonzero(y > 0)
    size = float(y[nz[0]])
    interval = float(nz[0] + 1)
    prev = nz[0]
    abs_err = 0.0
    count = 0
    for t in range(nz[0] + 1, y.size):
        abs_err += abs(y[t] - size / interval)
        count += 1
        if y[t] > 0:
            gap = float(t - prev)
            size += alpha * (y[t] - size)
            interval += alpha * (gap - interval)
            prev = t
    scale = float(np.mean(np.abs(np.diff(y))))
    if scale == 0.0 or count == 0:
        return math.inf
    return (abs_err / count) / scale


_CROSTON_OPT_GRID = tuple(round(0.05 * i, 2) for i in range(1, 11))


def _tsb_rate(y: np.ndarray, alpha: float, beta: float) -> float:
    nz = int(np.flatnonzero(y > 0)[0])
    prob = 1.0 / (1.0 + nz)
    size = float(y[nz])
    for t in range(nz + 1, y.size):
        if y[t] > 0:
            prob += beta * (1.0 - prob)
            size += alpha * (y[t] - size)
        else:
            prob += beta * (0.0 - prob)
    return prob * size


# --- seasonal helpers ----------------------------------------------------------

def _acf(y: np.ndarray, max_lag: int) -> np.ndarray:
    d = y - y.mean()
    denom = float(d @ d)
    out = np.zeros(max_lag + 1)
    out[0] = 1.0
    if denom == 0.0:
        return out
    for lag in range(1, max_lag + 1):
        out[lag] = float(d[:-lag] @ d[lag:]) / denom
    return out


def _is_seasonal(y: np.ndarray, m: int) -> bool:
    """90% significance test on the lag-m autocorrelation."""
    n = y.size
    if m < 2 or n < 3 * m:
        return False
    r = _acf(y, m)
    limit = 1.645 * math.sqrt((1.0 + 2.0 * float(np.sum(r[1:m] ** 2))) / n)
    return abs(r[m]) > limit


def _seasonal_indices(y: np.ndarray, m: int) -> np.ndarray | None:
    """Multiplicative indices normalized to mean 1; None when unusable."""
    n = y.size
    if m % 2 == 0:
        kernel = np.full(m + 1, 1.0 / m)
        kernel[0] = kernel[-1] = 0.5 / m
    else:
        kernel = np.full(m, 1.0 / m)
    trend = np.convolve(y, kernel, mode="valid")
    half = m // 2
    if np.any(trend <= 0):
        return None
    ratios = [[] for _ in range(m)]
    for i, tr in enumerate(trend):
        ratios[(i + half) % m].append(y[i + half] / tr)
    if any(not r for r in ratios):
        return None
    idx = np.array([float(np.mean(r)) for r in ratios])
    if np.any(idx <= 0):
        return None
    return idx / idx.mean()


# --- theta -----------------------------------------------------------------------

def _theta_forecast(y: np.ndarray, horizon: int, alpha: float | None) -> np.ndarray:
    n = y.size
    t = np.arange(n, dtype=float)
    slope, intercept = np.polyfit(t, y, 1)
    theta2 = 2.0 * y - (intercept + slope * t)
    level = _fit_ses(theta2, alpha)
    future = np.arange(n, n + horizon, dtype=float)
    line = intercept + slope * future
    return 0.5 * line + 0.5 * level


_BOXCOX_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)


def _boxcox(y: np.ndarray, lam: float) -> np.ndarray:
    shifted = y + 1.0
    if lam == 0.0:
        return np.log(shifted)
    return (shifted ** lam - 1.0) / lam


def _inv_boxcox(z: np.ndarray, lam: float) -> np.ndarray:
    if lam == 0.0:
        return np.exp(z) - 1.0
    base = np.maximum(lam * z + 1.0, 1e-12)
    return base ** (1.0 / lam) - 1.0


def _choose_lambda(y: np.ndarray, block: int) -> float:
    """Guerrero-style pick: most stable block std/mean^(1-lambda) ratio."""
    block = max(block, 2)
    blocks = [y[i:i + block] for i in range(0, y.size - block + 1, block)]
    stats = [(float(b.mean()), float(b.std())) for b in blocks]
    stats = [(m, s) for m, s in stats if m > 0 and s > 0]
    if len(stats) < 2:
        return 1.0
    best_lam, best_cv = 1.0, math.inf
    for lam in _BOXCOX_GRID:
        ratios = np.array([s / (m ** (1.0 - lam)) for m, s in stats])
        mean_r = float(ratios.mean())
        if mean_r <= 0:
            continue
        cv = float(ratios.std()) / mean_r
        if cv < best_cv - 1e-12:
            best_lam, best_cv = lam, cv
    return best_lam


# --- ARIMA (conditional sum of squares) ----------------------------------------------

def _css_residuals(y: np.ndarray, p: int, q: int, params: np.ndarray) -> np.ndarray:
    c = params[0]
    phi = params[1:1 + p]
    theta = params[1 + p:1 + p + q]
    n = y.size
    errs = np.zeros(n)
    start = p
    for t in range(start, n):
        pred = c
        for i in range(p):
            pred += phi[i] * y[t - 1 - i]
        for j in range(q):
            if t - 1 - j >= start:
                pred += theta[j] * errs[t - 1 - j]
        errs[t] = y[t] - pred
    return errs[start:]


def _fit_arma(y: np.ndarray, p: int, q: int):
    """CSS fit; AR-only cases solve exactly by least squares."""
    n = y.size
    if p > 0 and q == 0:
        rows = n - p
        design = np.column_stack(
            [np.ones(rows)] + [y[p - i - 1:n - i - 1] for i in range(p)]
        )
        coef, *_ = np.linalg.lstsq(design, y[p:], rcond=None)
        resid = y[p:] - design @ coef
        return np.concatenate([coef, np.zeros(0)]), float(resid @ resid), rows
    x0 = np.zeros(1 + p + q)
    x0[0] = float(y.mean())

    def objective(params):
        resid = _css_residuals(y, p, q, params)
        return float(resid @ resid)

    bounds = [(None, None)] + [(-0.99, 0.99)] * (p + q)
    res = minimize(
        objective, x0, method="L-BFGS-B", bounds=bounds,
        options={"maxiter": 120, "ftol": 1e-10},
    )
    resid = _css_residuals(y, p, q, res.x)
    return res.x, float(resid @ resid), resid.size


def _arima_forecast(y: np.ndarray, horizon: int, spec: ForecastModelSpec) -> np.ndarray:
    max_p = int(spec.param("max_p", 2))
    max_d = int(spec.param("max_d", 1))
    max_q = int(spec.param("max_q", 2))
    if max_d > 1:
        raise ConfigError("differencing beyond order 1 is not supported")
    best = None
    for d in range(0, max_d + 1):
        z = np.diff(y, n=d) if d else y.copy()
        for p in range(0, max_p + 1):
            for q in range(0, max_q + 1):
                if p == 0 and q == 0 and d == 0:
                    continue
                if z.size - p < p + q + 3:
                    continue
                params, ssr, rows = _fit_arma(z, p, q)
                k = p + q + 1
                ssr = max(ssr, 1e-300)
                aicc = rows * math.log(ssr / rows) + 2 * k
                if rows - k - 1 > 0:
                    aicc += 2 * k * (k + 1) / (rows - k - 1)
                if best is None or aicc < best[0] - 1e-12:
                    best = (aicc, p, d, q, params)
    if best is None:
        raise HistoryTooShort(f"{y.size} points are too few for the arima grid")
    _, p, d, q, params = best
    z = np.diff(y, n=d) if d else y.copy()
    c = params[0]
    phi = params[1:1 + p]
    theta = params[1 + p:1 + p + q]
    errs = np.zeros(z.size)
    start = p
    for t in range(start, z.size):
        pred = c
        for i in range(p):
            pred += phi[i] * z[t - 1 - i]
        for j in range(q):
            if t - 1 - j >= start:
                pred += theta[j] * errs[t - 1 - j]
        errs[t] = z[t] - pred
    hist = z.tolist()
    errhist = errs.tolist()
    out = []
    for _ in range(horizon):
        pred = c
        for i in range(p):
            pred += phi[i] * hist[-1 - i]
        for j in range(q):
            pred += theta[j] * (errhist[-1 - j] if len(errhist) > j else 0.0)
        out.append(pred)
        hist.append(pred)
        errhist.append(0.0)
    forecast = np.asarray(out)
    if d:
        forecast = y[-1] + np.cumsum(forecast)
    return forecast


# --- ETS ------------------------------------------------------------------------------

def _ets_fit(y: np.ndarray, trend: bool, seasonal: bool, m: int,
             alpha: float, beta: float, gamma: float):
    n = y.size
    if seasonal:
        season = y[:m] - y[:m].mean()
        level = float(y[:m].mean())
    else:
        season = np.zeros(1)
        level = float(y[0])
    trend_val = float(y[1] - y[0]) if trend else 0.0
    sse = 0.0
    count = 0
    start = m if seasonal else 1
    season = season.astype(float)
    for t in range(start, n):
        s = season[t % m] if seasonal else 0.0
        pred = level + trend_val + s
        err = y[t] - pred
        sse += err * err
        count += 1
        new_level = level + trend_val + alpha * err
        if trend:
            trend_val += alpha * beta * err
        if seasonal:
            season[t % m] = s + gamma * err
        level = new_level
    return level, trend_val, season, sse, count


_ETS_ALPHAS = (0.1, 0.3, 0.5, 0.7, 0.9)
_ETS_BETAS = (0.05, 0.1, 0.3)
_ETS_GAMMAS = (0.05, 0.1, 0.3)


def _ets_forecast(y: np.ndarray, horizon: int, spec: ForecastModelSpec) -> np.ndarray:
    m = int(spec.param("period", 1))
    n = y.size
    candidates = [(False, False), (True, False)]
    if m >= 2 and n >= 2 * m + 3:
        candidates += [(False, True), (True, True)]
    best = None
    for trend, seasonal in candidates:
        alphas = _ETS_ALPHAS
        betas = _ETS_BETAS if trend else (0.0,)
        gammas = _ETS_GAMMAS if seasonal else (0.0,)
        for a in alphas:
            for b in betas:
                for g in gammas:
                    level, trend_val, season, sse, count = _ets_fit(
                        y, trend, seasonal, m, a, b, g
                    )
                    k = 1 + (1 if trend else 0) + (1 if seasonal else 0)
                    k += 1 + (1 if trend else 0) + (m if seasonal else 0)
                    sse = max(sse, 1e-300)
                    aicc = count * math.log(sse / count) + 2 * k
                    if count - k - 1 > 0:
                        aicc += 2 * k * (k + 1) / (count - k - 1)
                    if best is None or aicc < best[0] - 1e-12:
                        best = (aicc, level, trend_val, season.copy(), trend, seasonal)
    _, level, trend_val, season, trend, seasonal = best
    out = np.empty(horizon)
    for h in range(1, horizon + 1):
        s = season[(n + h - 1) % m] if seasonal else 0.0
        out[h - 1] = level + h * trend_val + s
    return out


# --- lag regression -------------------------------------------------------------------

def _linreg_forecast(y: np.ndarray, horizon: int, spec: ForecastModelSpec) -> np.ndarray:
    lags = int(spec.param("lags", spec.param("period", 4)))
    n = y.size
    rows = n - lags
    if rows < lags + 2:
        raise HistoryTooShort(
            f"lag regression with {lags} lags needs >= {2 * lags + 2} points, got {n}"
        )
    design = np.column_stack(
        [np.ones(rows)] + [y[lags - i - 1:n - i - 1] for i in range(lags)]
    )
    coef, *_ = np.linalg.lstsq(design, y[lags:], rcond=None)
    hist = y.tolist()
    out = []
    for _ in range(horizon):
        row = [1.0] + [hist[-1 - i] for i in range(lags)]
        pred = float(np.dot(row, coef))
        out.append(pred)
        hist.append(pred)
    return np.asarray(out)


# --- entry points ------------------------------------------------------------------------

_MIN_LENGTH = {
    ModelFamily.NAIVE_LAST: 1,
    ModelFamily.NAIVE_SEASONAL: 1,
    ModelFamily.NAIVE2_DESEASONALIZED: 1,
    ModelFamily.MEAN: 1,
    ModelFamily.SES: 2,
    ModelFamily.HOLT: 3,
    ModelFamily.DAMPED_HOLT: 3,
    ModelFamily.THETA: 4,
    ModelFamily.THETA_BOXCOX: 4,
    ModelFamily.CROSTON: 2,
    ModelFamily.CROSTON_OPT: 2,
    ModelFamily.SBA: 2,
    ModelFamily.TSB: 1,
    ModelFamily.ARIMA_GRID: 12,
    ModelFamily.ETS_GRID: 8,
    ModelFamily.LINREG_LAGS: 4,
}


def fit_predict(spec: ForecastModelSpec, history, horizon: int) -> np.ndarray:
    """Raw point forecast; may be negative for trend models."""
    if horizon < 1:
        raise ConfigError(f"horizon must be >= 1, got {horizon}")
    y = _history_values(history)
    family = spec.family
    if y.size < _MIN_LENGTH[family]:
        raise HistoryTooShort(
            f"{family.value} needs >= {_MIN_LENGTH[family]} points, got {y.size}"
        )
    if not y.any():
        if family in _ZERO_TOLERANT:
            return np.zeros(horizon)
        raise AllZeroHistory(f"{family.value} cannot fit an all-zero history")

    if family is ModelFamily.NAIVE_LAST:
        return np.full(horizon, float(y[-1]))

    if family is ModelFamily.NAIVE_SEASONAL:
        m = int(spec.param("period", 1))
        if y.size < m:
            raise HistoryTooShort(f"need >= {m} points for period {m}, got {y.size}")
        tail = y[-m:]
        return np.array([tail[h % m] for h in range(horizon)], dtype=float)

    if family is ModelFamily.NAIVE2_DESEASONALIZED:
        m = int(spec.param("period", 1))
        if _is_seasonal(y, m):
            idx = _seasonal_indices(y, m)
            if idx is not None:
                adjusted = y / idx[np.arange(y.size) % m]
                last = float(adjusted[-1])
                return np.array(
                    [last * idx[(y.size + h) % m] for h in range(horizon)]
                )
        return np.full(horizon, float(y[-1]))

    if family is ModelFamily.MEAN:
        return np.full(horizon, float(y.mean()))

    if family is ModelFamily.SES:
        return np.full(horizon, _fit_ses(y, spec.param("alpha")))

    if family in (ModelFamily.HOLT, ModelFamily.DAMPED_HOLT):
        damped = family is ModelFamily.DAMPED_HOLT
        level, trend, phi = _fit_holt(y, spec, damped)
        out = np.empty(horizon)
        damp = 0.0
        for h in range(1, horizon + 1):
            damp += phi ** h
            out[h - 1] = level + damp * trend
        return out

    if family is ModelFamily.THETA:
        return _theta_forecast(y, horizon, spec.param("alpha"))

    if family is ModelFamily.THETA_BOXCOX:
        lam = spec.param("lambda")
        if lam is None:
            lam = _choose_lambda(y, int(spec.param("period", 4)))
        z = _boxcox(y, float(lam))
        zf = _theta_forecast(z, horizon, spec.param("alpha"))
        return _inv_boxcox(zf, float(lam))

    if family in (ModelFamily.CROSTON, ModelFamily.SBA):
        nz = int(np.count_nonzero(y > 0))
        if nz < 2:
            raise HistoryTooShort(f"{family.value} needs >= 2 nonzero demands, got {nz}")
        alpha = float(spec.param("alpha", 0.1))
        rate = _croston_rate(y, alpha)
        if family is ModelFamily.SBA:
            rate *= 1.0 - alpha / 2.0
        return np.full(horizon, rate)

    if family is ModelFamily.CROSTON_OPT:
        nz = int(np.count_nonzero(y > 0))
        if nz < 2:
            raise HistoryTooShort(f"croston_opt needs >= 2 nonzero demands, got {nz}")
        best_alpha, best_score = _CROSTON_OPT_GRID[0], math.inf
        for a in _CROSTON_OPT_GRID:
            score = _croston_insample_mase(y, a)
            if score < best_score - 1e-12:
                best_alpha, best_score = a, score
        return np.full(horizon, _croston_rate(y, best_alpha))

    if family is ModelFamily.TSB:
        alpha = float(spec.param("alpha", 0.1))
        beta = float(spec.param("beta", 0.1))
        return np.full(horizon, _tsb_rate(y, alpha, beta))

    if family is ModelFamily.ARIMA_GRID:
        return _arima_forecast(y, horizon, spec)

    if family is ModelFamily.ETS_GRID:
        return _ets_forecast(y, horizon, spec)

    if family is ModelFamily.LINREG_LAGS:
        return _linreg_forecast(y, horizon, spec)

    raise ConfigError(f"unknown family {family!r}")


def _predict_any(model, history, horizon: int) -> np.ndarray:
    if isinstance(model, EnsembleSpec):
        stack = np.vstack([fit_predict(m, history, horizon) for m in model.members])
        if model.combiner == "weighted":
            return np.asarray(model.weights) @ stack
        return stack.mean(axis=0)
    return fit_predict(model, history, horizon)


def _holdout_sigma(model, y: np.ndarray) -> float:
    """Error sigma from refitting on a short holdout at the series tail."""
    w = max(4, y.size // 5)
    if y.size - w < 4:
        return 0.0
    try:
        pred = _predict_any(model, y[:-w], w)
    except (HistoryTooShort, AllZeroHistory):
        return 0.0
    errs = y[-w:] - np.maximum(pred, 0.0)
    return float(np.std(errs))


def make_forecast(
    model: ForecastModelSpec | EnsembleSpec,
    history,
    horizon: int,
    sku_id: str = "",
    cv_score=None,
) -> ForecastResult:
    y = _history_values(history)
    if not sku_id and isinstance(history, DemandSeries):
        sku_id = history.sku_id
    raw = _predict_any(model, history, horizon)
    clamped = bool((raw < 0).any())
    point = np.maximum(raw, 0.0)
    return ForecastResult(
        sku_id=sku_id,
        horizon=horizon,
        point=tuple(float(v) for v in point),
        model=model,
        cv_score=cv_score,
        signals_applied=(),
        clamped=clamped,
        all_zero=not y.any(),
        insample_sigma=_holdout_sigma(model, y),
    )


def apply_signals(forecast: ForecastResult, signals: Sequence[DemandSignal]) -> ForecastResult:
    """Scale forecast buckets by (1 + uplift); overlaps compose multiplicatively."""
    point = np.asarray(forecast.point, dtype=float)
    for sig in signals:
        if sig.end_bucket >= forecast.horizon:
            raise WindowOutOfRange(
                f"signal window [{sig.start_bucket}, {sig.end_bucket}] exceeds "
                f"horizon {forecast.horizon}"
            )
        point[sig.start_bucket:sig.end_bucket + 1] *= 1.0 + sig.uplift
    point = np.maximum(point, 0.0)
    return ForecastResult(
        sku_id=forecast.sku_id,
        horizon=forecast.horizon,
        point=tuple(float(v) for v in point),
        model=forecast.model,
        cv_score=forecast.cv_score,
        signals_applied=tuple(forecast.signals_applied) + tuple(signals),
        clamped=forecast.clamped,
        all_zero=forecast.all_zero,
        insample_sigma=forecast.insample_sigma,
    )
