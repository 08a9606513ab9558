import numpy as np
import pytest

from iros.errors import ZeroReference, ZeroScale
from iros.forecast import MetricValue, mase, owa, smape


def test_mase_zero_when_forecast_matches_actual():
    train = [3.0, 5.0, 4.0, 6.0, 5.0]
    assert mase([7.0, 8.0], [7.0, 8.0], train) == 0.0


def test_mase_of_insample_naive_is_one():
    rng = np.random.default_rng(11)
    train = np.cumsum(rng.normal(0, 1, 40)) + 50
    # one-step naive over the training span scores exactly 1 by construction
    assert mase(train[:-1], train[1:], train) == pytest.approx(1.0, abs=1e-12)


def test_mase_seasonal_scale_uses_lagged_differences():
    train = np.array([1.0, 10.0, 2.0, 11.0, 3.0, 12.0])
    # lag-2 differences are all 1 or 1, so scale is 1
    got = mase([5.0], [8.0], train, seasonal_m=2)
    assert got == pytest.approx(3.0, abs=1e-12)


def test_mase_invariant_under_common_rescaling():
    rng = np.random.default_rng(3)
    train = rng.uniform(5, 15, 30)
    f = rng.uniform(5, 15, 6)
    a = rng.uniform(5, 15, 6)
    base = mase(f, a, train)
    scaled = mase(7 * f, 7 * a, 7 * train)
    assert scaled == pytest.approx(base, abs=1e-12)


def test_mase_constant_training_raises():
    with pytest.raises(ZeroScale):
        mase([1.0], [2.0], [5.0] * 10)


def test_mase_training_shorter_than_lag_raises():
    with pytest.raises(ZeroScale):
        mase([1.0], [2.0], [5.0, 6.0], seasonal_m=4)


def test_mase_length_mismatch_raises():
    with pytest.raises(ZeroScale):
        mase([1.0, 2.0], [1.0], [3.0, 4.0, 5.0])


def test_smape_zero_when_equal():
    assert smape([4.0, 5.0], [4.0, 5.0]) == 0.0


def test_smape_attains_upper_bound():
    assert smape([2.0], [0.0]) == 200.0


def test_smape_zero_over_zero_terms_count_as_zero():
    # one 0/0 bucket and one exact bucket average to 0
    assert smape([0.0, 3.0], [0.0, 3.0]) == 0.0
    # 0/0 term contributes 0, the other contributes 200
    assert smape([0.0, 2.0], [0.0, 0.0]) == 100.0


def test_smape_exactly_invariant_under_rescaling():
    f = np.array([1.0, 4.0, 2.5])
    a = np.array([2.0, 3.0, 2.5])
    assert smape(9 * f, 9 * a) == smape(f, a)


def test_smape_within_bounds():
    rng = np.random.default_rng(8)
    for _ in range(20):
        f = rng.uniform(0, 10, 12)
        a = rng.uniform(0, 10, 12)
        s = smape(f, a)
        assert 0.0 <= s <= 200.0


def test_owa_of_reference_against_itself_is_one():
    ref = MetricValue(mase=1.3, smape=24.0)
    assert owa(ref, ref) == pytest.approx(1.0, abs=1e-12)


def test_owa_halves_when_both_metrics_halve():
    ref = MetricValue(mase=2.0, smape=50.0)
    half = MetricValue(mase=1.0, smape=25.0)
    assert owa(half, ref) == pytest.approx(0.5, abs=1e-12)


def test_owa_zero_reference_raises():
    with pytest.raises(ZeroReference):
        owa(MetricValue(mase=1.0, smape=10.0), MetricValue(mase=0.0, smape=10.0))
    with pytest.raises(ZeroReference):
        owa(MetricValue(mase=1.0, smape=10.0), MetricValue(mase=1.0, smape=0.0))
