"""Tests for series decomposition and feature extraction."""

import math

import numpy as np
import pytest

from iros.errors import TooFewRows, TooShort
from iros.features import (
    FEATURE_NAMES,
    FeatureVector,
    decompose,
    extract_features,
    feature_matrix,
    scale_matrix,
)


def test_decompose_pure_sine_remainder_vanishes():
    t = np.arange(72)
    x = 10.0 * np.sin(2 * np.pi * t / 12)
    dec = decompose(x, 12)
    assert max(abs(r) for r in dec.remainder) < 1e-6 * 10.0
    assert max(abs(v) for v in dec.trend) < 1e-6 * 10.0


def test_decompose_ramp_has_no_seasonal_content():
    x = np.arange(60, dtype=float)
    dec = decompose(x, 5)
    span = x.max() - x.min()
    assert max(abs(s) for s in dec.seasonal) < 0.05 * span


def test_decompose_constant_series():
    dec = decompose([5.0] * 24, 3)
    assert all(abs(t - 5.0) < 1e-9 for t in dec.trend)
    assert all(abs(s) < 1e-9 for s in dec.seasonal)
    assert all(abs(r) < 1e-9 for r in dec.remainder)


def test_decompose_reconstructs_exactly():
    rng = np.random.default_rng(3)
    for period in (2, 4, 7, 12, 13):
        x = rng.normal(20, 6, 5 * period)
        dec = decompose(x, period)
        rebuilt = np.asarray(dec.reconstruct())
        assert np.max(np.abs(rebuilt - x)) < 1e-9


def test_decompose_seasonal_sums_to_zero_over_period():
    rng = np.random.default_rng(4)
    x = rng.normal(30, 5, 48) + 8 * np.sin(2 * np.pi * np.arange(48) / 12)
    dec = decompose(x, 12)
    assert abs(sum(dec.seasonal[:12])) < 1e-9


def test_decompose_too_short():
    with pytest.raises(TooShort):
        decompose([1.0, 2.0, 3.0], 2)
    with pytest.raises(TooShort):
        decompose([1.0] * 30, 1)


def test_intermittency_is_exact_zero_count():
    x = [0.0, 2.0, 0.0, 0.0, 5.0] * 4
    fv = extract_features(x, 5)
    assert fv.intermittency == 12 / 20


def test_ramp_has_strong_trend():
    fv = extract_features(np.arange(40, dtype=float), 5)
    assert fv.trend_strength >= 0.99


def test_noise_has_weak_structure():
    rng = np.random.default_rng(42)
    x = rng.normal(50, 5, 200)
    fv = extract_features(x, 12)
    assert fv.trend_strength <= 0.2
    assert fv.seasonality_strength <= 0.2


def test_constant_series_degenerate_features():
    fv = extract_features([7.0] * 30, 4)
    assert fv.trend_strength == 0.0
    assert fv.seasonality_strength == 0.0
    assert fv.skewness_orig == 0.0
    assert fv.kurtosis_orig == 0.0
    assert fv.variation == 0.0
    assert fv.intermittency == 0.0


def test_all_zero_series_variation_convention():
    fv = extract_features([0.0] * 30, 4)
    assert fv.variation == 0.0
    assert fv.intermittency == 1.0


def test_extract_too_short():
    with pytest.raises(TooShort):
        extract_features([1.0, 2.0, 0.0, 4.0], 2)


def test_shift_invariant_features():
    rng = np.random.default_rng(9)
    x = rng.normal(40, 8, 120) + 10 * np.sin(2 * np.pi * np.arange(120) / 10)
    a = extract_features(x, 10)
    b = extract_features(x + 137.0, 10)
    for name in (
        "serial_correlation_orig",
        "serial_correlation_adj",
        "skewness_orig",
        "kurtosis_orig",
        "trend_strength",
        "seasonality_strength",
        "chaos",
    ):
        assert abs(getattr(a, name) - getattr(b, name)) < 1e-6, name


def test_seasonal_signal_scores_high_seasonality():
    t = np.arange(96)
    rng = np.random.default_rng(11)
    x = 50 + 20 * np.sin(2 * np.pi * t / 12) + rng.normal(0, 1, 96)
    fv = extract_features(x, 12)
    assert fv.seasonality_strength > 0.9


def test_intermittent_vs_smooth_corpus_direction():
    rng = np.random.default_rng(21)
    intermittent, smooth = [], []
    for _ in range(10):
        x = np.where(rng.random(80) < 0.7, 0.0, rng.integers(1, 9, 80)).astype(float)
        intermittent.append(extract_features(x, 4).intermittency)
        y = rng.normal(40, 5, 80).clip(1.0)
        smooth.append(extract_features(y, 4).intermittency)
    assert np.mean(intermittent) > np.mean(smooth)


def test_scale_matrix_minmax():
    out = scale_matrix(np.array([[1.0], [3.0], [5.0]]))
    assert np.allclose(out[:, 0], [0.0, 0.5, 1.0])


def test_scale_matrix_constant_column():
    out = scale_matrix(np.array([[2.0, 1.0], [2.0, 4.0]]))
    assert np.allclose(out[:, 0], 0.5)
    assert np.allclose(out[:, 1], [0.0, 1.0])


def test_scale_matrix_idempotent():
    rng = np.random.default_rng(5)
    mat = rng.normal(size=(8, 4))
    once = scale_matrix(mat)
    twice = scale_matrix(once)
    assert np.allclose(once, twice)


def test_scale_matrix_needs_two_rows():
    with pytest.raises(TooFewRows):
        scale_matrix(np.array([[1.0, 2.0]]))


def test_scale_matrix_accepts_feature_vectors():
    rng = np.random.default_rng(6)
    rows = [
        extract_features(rng.normal(30, 6, 60), 6, sku_id=f"S{i}")
        for i in range(3)
    ]
    out = scale_matrix(rows)
    assert out.shape == (3, len(FEATURE_NAMES))
    assert out.min() >= 0.0 and out.max() <= 1.0


def test_feature_matrix_column_order_matches_names():
    fv = FeatureVector(
        sku_id="X",
        trend_strength=1.0, seasonality_strength=2.0,
        serial_correlation_orig=3.0, serial_correlation_adj=4.0,
        skewness_orig=5.0, skewness_adj=6.0,
        kurtosis_orig=7.0, kurtosis_adj=8.0,
        stationarity_orig=9.0, stationarity_adj=10.0,
        chaos=11.0, self_similarity=12.0, variation=13.0, intermittency=14.0,
    )
    assert feature_matrix([fv])[0].tolist() == [float(i) for i in range(1, 15)]
    assert FEATURE_NAMES[0] == "trend_strength"
    assert FEATURE_NAMES[-1] == "intermittency"


def test_hurst_in_plausible_range_for_noise_and_trend():
    rng = np.random.default_rng(13)
    noise = rng.normal(0, 1, 400)
    trended = np.cumsum(rng.normal(0.2, 1, 400))
    h_noise = extract_features(noise + 50, 4).self_similarity
    h_trend = extract_features(trended + 200, 4).self_similarity
    assert h_noise < h_trend
