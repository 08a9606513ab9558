"""Rolling-origin model selection.

Fold i (0-indexed, folds total) trains on buckets [0, T - (folds - i) * h)
and validates on the next h buckets, so later folds see strictly more
history and validation windows never overlap. Models are ranked by the
median of their per-fold MASE scores. A model that cannot be scored on
some fold (constant training span, too short, all zero) is excluded from
the ranking with a note rather than failing the whole report.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..demand import DemandSeries
from ..errors import (
    AllZeroHistory,
    ConfigError,
    HistoryTooShort,
    TooFew,
    ZeroScale,
)
from .metrics import mase
from .models import (
    EnsembleSpec,
    ForecastModelSpec,
    ModelFamily,
    _history_values,
    _predict_any,
)

__all__ = ["CvReport", "rolling_origin_cv", "shortlist_by_cluster", "build_ensemble"]

_FAMILY_ORDER = {family: i for i, family in enumerate(ModelFamily)}


def _simplicity(model: ForecastModelSpec | EnsembleSpec) -> tuple:
    if isinstance(model, EnsembleSpec):
        return (len(model.members),) + tuple(
            _FAMILY_ORDER[m.family] for m in model.members
        )
    return (1, _FAMILY_ORDER[model.family])


@dataclass(frozen=True)
class CvReport:
    folds: int
    horizon: int
    fold_bounds: tuple[tuple[int, int, int], ...]
    scores: tuple[tuple[ForecastModelSpec | EnsembleSpec, tuple[float, ...]], ...]
    excluded: tuple[tuple[ForecastModelSpec | EnsembleSpec, str], ...] = ()

    def median(self, model) -> float:
        for spec, fold_scores in self.scores:
            if spec == model:
                return float(np.median(fold_scores))
        raise KeyError(f"{model} not scored")

    def mean(self, model) -> float:
        for spec, fold_scores in self.scores:
            if spec == model:
                return float(np.mean(fold_scores))
        raise KeyError(f"{model} not scored")

    def ranking(self) -> list[tuple[ForecastModelSpec | EnsembleSpec, float]]:
        """Scored models, best median first; ties break toward simpler."""
        rows = [
            (spec, float(np.median(fold_scores)))
            for spec, fold_scores in self.scores
        ]
        rows.sort(key=lambda row: (row[1], _simplicity(row[0])))
        return rows

    def best(self) -> ForecastModelSpec | EnsembleSpec:
        ranking = self.ranking()
        if not ranking:
            raise TooFew("every candidate model was excluded during cross-validation")
        return ranking[0][0]


def rolling_origin_cv(
    history,
    specs: Sequence[ForecastModelSpec | EnsembleSpec],
    folds: int = 5,
    horizon_per_fold: int = 1,
) -> CvReport:
    if folds < 1:
        raise ConfigError(f"folds must be >= 1, got {folds}")
    if horizon_per_fold < 1:
        raise ConfigError(f"horizon_per_fold must be >= 1, got {horizon_per_fold}")
    if not specs:
        raise ConfigError("no model specs supplied")
    y = _history_values(history)
    total = y.size
    h = horizon_per_fold
    min_train = 4
    if total - folds * h < min_train:
        raise HistoryTooShort(
            f"{total} buckets cannot host {folds} folds of {h} "
            f"after a {min_train}-bucket minimum training span"
        )

    bounds = []
    for i in range(folds):
        train_end = total - (folds - i) * h
        bounds.append((0, train_end, train_end + h))
    for _, train_end, valid_end in bounds:
        assert train_end < valid_end <= total

    scored: list[tuple[object, tuple[float, ...]]] = []
    excluded: list[tuple[object, str]] = []
    for spec in specs:
        fold_scores = []
        note = None
        for _, train_end, valid_end in bounds:
            train = y[:train_end]
            actual = y[train_end:valid_end]
            try:
                pred = np.maximum(_predict_any(spec, train, h), 0.0)
                fold_scores.append(mase(pred, actual, train))
            except (ZeroScale, HistoryTooShort, AllZeroHistory) as exc:
                note = f"{type(exc).__name__}: {exc}"
                break
        if note is None:
            scored.append((spec, tuple(fold_scores)))
        else:
            excluded.append((spec, note))
    return CvReport(
        folds=folds,
        horizon=h,
        fold_bounds=tuple(bounds),
        scores=tuple(scored),
        excluded=tuple(excluded),
    )


def shortlist_by_cluster(
    cluster_members: Sequence[DemandSeries],
    specs: Sequence[ForecastModelSpec],
    sample_size: int,
    seed: int = 0,
    folds: int = 5,
    horizon_per_fold: int = 1,
) -> list[ForecastModelSpec]:
    """Top three specs by pooled median MASE over a seeded member sample."""
    members = list(cluster_members)
    if not members:
        raise TooFew("cluster has no members")
    if sample_size < 1 or sample_size > len(members):
        raise ConfigError(
            f"sample_size {sample_size} outside [1, {len(members)}]"
        )
    rng = random.Random(seed)
    sample = rng.sample(members, sample_size)

    pooled: dict[ForecastModelSpec, list[float]] = {spec: [] for spec in specs}
    alive = set(specs)
    for series in sample:
        report = rolling_origin_cv(series, specs, folds, horizon_per_fold)
        scored = dict(report.scores)
        for spec in list(alive):
            if spec in scored:
                pooled[spec].extend(scored[spec])
            else:
                alive.discard(spec)
    ranked = sorted(
        (spec for spec in specs if spec in alive and pooled[spec]),
        key=lambda spec: (float(np.median(pooled[spec])), _simplicity(spec)),
    )
    if not ranked:
        raise TooFew("every spec failed cross-validation on the sampled series")
    return ranked[:3]


def build_ensemble(
    history,
    shortlist: Sequence[ForecastModelSpec],
    folds: int = 5,
    horizon_per_fold: int = 1,
) -> ForecastModelSpec | EnsembleSpec:
    """Best nonempty shortlist subset under mean combining; fewer members win ties."""
    members = list(shortlist)
    if not members:
        raise TooFew("shortlist is empty")
    candidates: list[ForecastModelSpec | EnsembleSpec] = []
    n = len(members)
    for mask in range(1, 2 ** n):
        subset = tuple(members[i] for i in range(n) if mask >> i & 1)
        if len(subset) == 1:
            candidates.append(subset[0])
        else:
            candidates.append(EnsembleSpec(subset))
    report = rolling_origin_cv(history, candidates, folds, horizon_per_fold)
    return report.best()
