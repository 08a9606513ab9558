"""Forecast model zoo, accuracy metrics, cross-validation and model comparison."""

from .metrics import MetricValue, mase, owa, smape
from .models import (
    DemandSignal,
    EnsembleSpec,
    ForecastModelSpec,
    ForecastResult,
    ModelFamily,
    apply_signals,
    fit_predict,
    make_forecast,
)
from .cv import (
    CvReport,
    build_ensemble,
    rolling_origin_cv,
    shortlist_by_cluster,
)
from .stats import emit_cd_diagram, friedman_test, nemenyi_cd

__all__ = [
    "MetricValue",
    "mase",
    "smape",
    "owa",
    "ModelFamily",
    "ForecastModelSpec",
    "ForecastResult",
    "EnsembleSpec",
    "DemandSignal",
    "fit_predict",
    "make_forecast",
    "apply_signals",
    "CvReport",
    "rolling_origin_cv",
    "shortlist_by_cluster",
    "build_ensemble",
    "friedman_test",
    "nemenyi_cd",
    "emit_cd_diagram",
]
