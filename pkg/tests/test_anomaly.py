"""Tests for the exception detectors and AUC scoring."""

import math
import types

import numpy as np
import pytest

from iros.anomaly import (
    DETECTOR_ORDER,
    AnomalyReport,
    Detector,
    DetectorConfig,
    Stability,
    compare_detectors,
    detect,
    dominant_period,
    flag_forecast_deviations,
    roc_auc,
)
from iros.demand import (
    AggregationLevel,
    DemandSeries,
    ExceptionResolution,
    ResolutionAction,
)
from iros.errors import ConfigError, DegenerateLabels, NoOverlap, TooShort
import datetime as dt


def test_iqr_flags_single_extreme_point():
    vals = [5.0] * 50
    vals.insert(37, 500.0)
    rep = detect(vals, Detector.IQR)
    assert [i for i, f in enumerate(rep.flags) if f] == [37]
    assert rep.scores[37] > 0
    assert all(s == 0.0 for i, s in enumerate(rep.scores) if i != 37)


def test_seasonal_detector_peaks_at_spike():
    t = np.arange(72)
    x = 10.0 * np.sin(2 * np.pi * t / 12)
    x[40] += 60.0
    rep = detect(x, Detector.SEASONAL)
    assert int(np.argmax(rep.scores)) == 40
    assert rep.flags[40]


def test_constant_series_degenerate_path():
    for det in DETECTOR_ORDER:
        rep = detect([4.0] * 40, det, DetectorConfig(seasonal_period=5))
        assert all(s == 0.0 for s in rep.scores)
        assert not any(rep.flags)


def test_report_flag_score_consistency():
    rng = np.random.default_rng(1)
    x = rng.poisson(6, 80).astype(float)
    x[11] += 50
    for det, threshold in [
        (Detector.IQR, 0.0),
        (Detector.QUANTILE, 0.0),
        (Detector.AR, 3.0),
    ]:
        rep = detect(x, det)
        assert len(rep.scores) == len(x) == len(rep.flags)
        for s, f in zip(rep.scores, rep.flags):
            assert f == (s > threshold)


def test_too_short_inputs():
    with pytest.raises(TooShort):
        detect([1.0, 2.0, 3.0], Detector.IQR)
    with pytest.raises(TooShort):
        detect([1.0, 5.0, 2.0, 4.0, 3.0, 1.0, 2.0], Detector.AR,
               DetectorConfig(ar_order=4))
    with pytest.raises(TooShort):
        detect([3.0, 1.0, 4.0, 1.0, 5.0], Detector.SEASONAL,
               DetectorConfig(seasonal_period=4))


def test_seasonal_refuses_without_dominant_period():
    rng = np.random.default_rng(2)
    x = rng.uniform(0, 10, 30)
    assert dominant_period(x) is None
    with pytest.raises(TooShort):
        detect(x, Detector.SEASONAL)


def test_dominant_period_finds_sine_cycle():
    t = np.arange(72)
    x = 50 + 10 * np.sin(2 * np.pi * t / 12)
    assert dominant_period(x) == 12


def test_config_validation():
    with pytest.raises(ConfigError):
        DetectorConfig(q_low=0.9, q_high=0.1)
    with pytest.raises(ConfigError):
        DetectorConfig(iqr_c=0.0)
    with pytest.raises(ConfigError):
        DetectorConfig(ar_order=0)
    with pytest.raises(ConfigError):
        DetectorConfig(seasonal_period=1)


def test_flags_monotone_in_multiplier():
    rng = np.random.default_rng(8)
    x = rng.poisson(5, 90).astype(float)
    x[[7, 30, 66]] += [25, 40, 60]
    for det, loose, tight in [
        (Detector.IQR, DetectorConfig(iqr_c=1.5), DetectorConfig(iqr_c=6.0)),
        (Detector.AR, DetectorConfig(ar_k=1.5), DetectorConfig(ar_k=6.0)),
        (Detector.SEASONAL,
         DetectorConfig(seasonal_period=5, seasonal_k=1.5),
         DetectorConfig(seasonal_period=5, seasonal_k=6.0)),
    ]:
        many = detect(x, det, loose).flags
        few = detect(x, det, tight).flags
        for m, f in zip(many, few):
            assert m or not f, det


def test_roc_auc_separable():
    assert roc_auc([0.9, 0.8, 0.1, 0.2], [True, True, False, False]) == 1.0


def test_roc_auc_all_ties():
    assert roc_auc([1.0, 1.0, 1.0, 1.0], [True, False, True, False]) == 0.5


def test_roc_auc_enumerated_pairs():
    # positives 0.9 and 0.7 vs negatives 0.8 and 0.1: wins 3 of 4 pairs
    assert roc_auc([0.9, 0.8, 0.7, 0.1], [1, 0, 1, 0]) == 0.75


def test_roc_auc_degenerate_labels():
    with pytest.raises(DegenerateLabels):
        roc_auc([0.1, 0.2], [True, True])
    with pytest.raises(DegenerateLabels):
        roc_auc([0.1, 0.2, 0.3], [False, False, False])


def test_roc_auc_complement_identity():
    rng = np.random.default_rng(12)
    scores = rng.permutation(20) / 20.0
    labels = rng.random(20) < 0.4
    s = np.asarray(scores)
    a = roc_auc(s, labels)
    b = roc_auc(-s, labels)
    assert abs(a + b - 1.0) < 1e-12


def test_roc_auc_monotone_transform_invariant():
    rng = np.random.default_rng(14)
    scores = rng.normal(size=25)
    labels = rng.random(25) < 0.3
    if not labels.any():
        labels[0] = True
    a = roc_auc(scores, labels)
    b = roc_auc(np.exp(scores), labels)
    assert a == b


def test_ar_detector_recovers_injected_shocks():
    aucs = []
    for trial in range(100):
        rng = np.random.default_rng(1000 + trial)
        n = 150
        x = np.zeros(n)
        noise = rng.normal(0, 1, n)
        for i in range(2, n):
            x[i] = 0.6 * x[i - 1] - 0.3 * x[i - 2] + noise[i]
        labels = np.zeros(n, dtype=bool)
        pos = rng.choice(np.arange(10, n), 3, replace=False)
        x[pos] += 8.0 * rng.choice([-1.0, 1.0], 3)
        labels[pos] = True
        aucs.append(roc_auc(detect(x, Detector.AR).scores, labels))
    assert np.mean(aucs) >= 0.9


def test_compare_detectors_row_order_and_values():
    corpus = []
    for s in range(6):
        rng = np.random.default_rng(500 + s)
        n = 96
        t = np.arange(n)
        x = 50 + 20 * np.sin(2 * np.pi * t / 12) + rng.normal(0, 2, n)
        labels = np.zeros(n, dtype=bool)
        pos = rng.choice(np.arange(n), 4, replace=False)
        x[pos] += rng.choice([-1.0, 1.0], 4) * 40
        labels[pos] = True
        corpus.append((x, labels))
    table = compare_detectors(corpus)
    assert [d for d, _ in table] == list(DETECTOR_ORDER)
    by_det = dict(table)
    assert by_det[Detector.SEASONAL] >= 0.95
    assert all(0.0 <= v <= 1.0 for v in by_det.values())


def test_compare_detectors_single_series():
    rng = np.random.default_rng(3)
    t = np.arange(60)
    x = 30 + 10 * np.sin(2 * np.pi * t / 10) + rng.normal(0, 1, 60)
    labels = np.zeros(60, dtype=bool)
    x[25] += 50
    labels[25] = True
    table = compare_detectors([(x, labels)])
    assert len(table) == 4


def test_exception_proportion_drops_with_coarser_buckets():
    rng = np.random.default_rng(7)
    daily = rng.poisson(3, 364).astype(float)
    spikes = rng.choice(364, 14, replace=False)
    daily[spikes] += rng.integers(12, 20, 14)
    weekly = daily.reshape(52, 7).sum(axis=1)
    monthly = daily[:336].reshape(12, 28).sum(axis=1)
    props = [
        float(np.mean(detect(series, Detector.IQR).flags))
        for series in (daily, weekly, monthly)
    ]
    assert props[0] > props[2]
    assert props[0] >= props[1] >= props[2]


def _forecast(point, sigma):
    return types.SimpleNamespace(point=tuple(point), insample_sigma=sigma)


def _series(values):
    return DemandSeries(
        sku_id="S1",
        level=AggregationLevel.WEEKLY,
        start=dt.date(2024, 1, 1),
        values=tuple(values),
    )


def test_deviations_stable_when_forecast_matches():
    actual = _series([10, 10, 10, 10])
    rep, stability = flag_forecast_deviations(actual, _forecast([10.0] * 4, 2.0))
    assert stability is Stability.STABLE
    assert not any(rep.flags)
    assert rep.sku_id == "S1"


def test_deviations_flag_ten_sigma_bucket():
    actual = _series([10, 10, 30, 10])
    rep, stability = flag_forecast_deviations(actual, _forecast([10.0] * 4, 2.0))
    assert stability is Stability.UNSTABLE
    assert rep.flags == (False, False, True, False)
    assert abs(rep.scores[2] - 10.0) < 1e-12


def test_deviation_kept_by_user_stays_unstable():
    actual = _series([10, 10, 30, 10])
    keep = ExceptionResolution(sku_id="S1", bucket_index=2, action=ResolutionAction.KEEP)
    _, stability = flag_forecast_deviations(
        actual, _forecast([10.0] * 4, 2.0), resolutions=[keep]
    )
    assert stability is Stability.UNSTABLE


def test_deviation_replaced_by_user_becomes_stable():
    actual = _series([10, 10, 30, 10])
    fix = ExceptionResolution(
        sku_id="S1", bucket_index=2, action=ResolutionAction.REPLACE, param=10
    )
    _, stability = flag_forecast_deviations(
        actual, _forecast([10.0] * 4, 2.0), resolutions=[fix]
    )
    assert stability is Stability.STABLE


def test_deviations_need_overlap():
    with pytest.raises(NoOverlap):
        flag_forecast_deviations(_series([1]), _forecast([], 1.0))


def test_deviations_zero_sigma_fallback():
    # constant nonzero error with no carried sigma: infinitely surprising
    actual = _series([15, 15, 15, 15])
    rep, stability = flag_forecast_deviations(actual, _forecast([10.0] * 4, 0.0))
    assert stability is Stability.UNSTABLE
    assert all(rep.flags)
    # varying errors fall back to the window's own error sigma
    actual = _series([10, 10, 11, 10])
    rep, stability = flag_forecast_deviations(actual, _forecast([10.0] * 4, 0.0))
    assert stability is Stability.STABLE
