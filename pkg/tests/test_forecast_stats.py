import math

import numpy as np
import pytest
from scipy.stats import friedmanchisquare

from iros.errors import ConfigError, IoFailure, TooFew
from iros.forecast import emit_cd_diagram, friedman_test, nemenyi_cd
from iros.forecast.stats import mean_ranks


def test_identical_scores_give_zero_statistic():
    scores = np.ones((4, 12))
    stat, p = friedman_test(scores)
    assert stat == 0.0
    assert p == 1.0


def test_statistic_matches_scipy_on_tie_free_data():
    rng = np.random.default_rng(17)
    scores = rng.normal(0, 1, size=(5, 14))
    stat, p = friedman_test(scores)
    # scipy takes one sample per model; columns are the paired series
    ref_stat, ref_p = friedmanchisquare(*scores)
    assert stat == pytest.approx(ref_stat, abs=1e-10)
    assert p == pytest.approx(ref_p, abs=1e-10)


def test_statistic_invariant_under_monotone_column_transforms():
    rng = np.random.default_rng(23)
    scores = rng.uniform(1, 5, size=(4, 10))
    stat, _ = friedman_test(scores)
    warped = np.exp(scores) + 3.0
    stat_warped, _ = friedman_test(warped)
    assert stat_warped == pytest.approx(stat, abs=1e-12)


def test_clear_separation_gives_small_p():
    # model 0 always best, model 2 always worst over 20 series
    base = np.arange(20, dtype=float)
    scores = np.vstack([base, base + 10, base + 20])
    stat, p = friedman_test(scores)
    assert stat == pytest.approx(40.0)
    assert p < 1e-6


def test_mean_ranks_small_example():
    scores = np.array([[1.0, 4.0], [2.0, 3.0]])
    assert mean_ranks(scores) == pytest.approx([1.5, 1.5])
    scores = np.array([[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
    assert mean_ranks(scores) == pytest.approx([1.0, 2.0, 3.0])


def test_friedman_needs_two_models_and_series():
    with pytest.raises(TooFew):
        friedman_test(np.ones((1, 5)))
    with pytest.raises(TooFew):
        friedman_test(np.ones((3, 1)))


def test_nemenyi_cd_published_value():
    assert nemenyi_cd(3, 10, 0.05) == pytest.approx(1.0478, abs=1e-3)


def test_nemenyi_cd_scales_with_models_and_series():
    assert nemenyi_cd(5, 20, 0.05) == pytest.approx(
        2.728 * math.sqrt(5 * 6 / (6 * 20)), abs=1e-12
    )
    assert nemenyi_cd(2, 10, 0.01) == pytest.approx(
        2.576 * math.sqrt(2 * 3 / (6 * 10)), abs=1e-12
    )
    # more series shrink the critical difference
    assert nemenyi_cd(4, 100, 0.05) < nemenyi_cd(4, 10, 0.05)
    # stricter alpha widens it
    assert nemenyi_cd(4, 10, 0.01) > nemenyi_cd(4, 10, 0.05)


def test_nemenyi_cd_argument_validation():
    with pytest.raises(ConfigError):
        nemenyi_cd(3, 10, 0.10)
    with pytest.raises(ConfigError):
        nemenyi_cd(21, 10, 0.05)
    with pytest.raises(TooFew):
        nemenyi_cd(1, 10, 0.05)
    with pytest.raises(TooFew):
        nemenyi_cd(3, 1, 0.05)


def _clique_bars(svg_text):
    return [line for line in svg_text.splitlines() if 'stroke-width="4"' in line]


def test_cd_diagram_is_deterministic(tmp_path):
    ranks = {"holt": 1.4, "ses": 2.2, "mean": 2.4}
    first = tmp_path / "one.svg"
    second = tmp_path / "two.svg"
    emit_cd_diagram(ranks, 0.9, first)
    emit_cd_diagram(ranks, 0.9, second)
    assert first.read_bytes() == second.read_bytes()


def test_cd_diagram_far_apart_models_have_no_clique_bar(tmp_path):
    out = tmp_path / "far.svg"
    emit_cd_diagram({"a": 1.0, "b": 3.0}, 0.5, out)
    text = out.read_text()
    assert _clique_bars(text) == []
    assert "CD = 0.50" in text
    assert "a (1.00)" in text and "b (3.00)" in text


def test_cd_diagram_all_within_cd_single_spanning_bar(tmp_path):
    out = tmp_path / "near.svg"
    emit_cd_diagram({"a": 1.0, "b": 1.3, "c": 1.6}, 2.0, out)
    bars = _clique_bars(out.read_text())
    assert len(bars) == 1


def test_cd_diagram_partial_overlap_draws_two_bars(tmp_path):
    out = tmp_path / "two_groups.svg"
    # a-b within CD, b-c within CD, a-c beyond: two maximal groups
    emit_cd_diagram({"a": 1.0, "b": 1.8, "c": 2.6}, 1.0, out)
    bars = _clique_bars(out.read_text())
    assert len(bars) == 2


def test_cd_diagram_rejects_bad_input(tmp_path):
    with pytest.raises(TooFew):
        emit_cd_diagram({}, 1.0, tmp_path / "x.svg")
    with pytest.raises(ConfigError):
        emit_cd_diagram({"a": math.nan, "b": 1.0}, 1.0, tmp_path / "x.svg")
    with pytest.raises(ConfigError):
        emit_cd_diagram({"a": 1.0, "b": 2.0}, -1.0, tmp_path / "x.svg")


def test_cd_diagram_unwritable_path(tmp_path):
    blocker = tmp_path / "occupied"
    blocker.write_text("not a directory")
    with pytest.raises(IoFailure):
        emit_cd_diagram({"a": 1.0, "b": 2.0}, 1.0, blocker / "cd.svg")
