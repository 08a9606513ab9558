"""Tests for the flat key = value pipeline configuration."""

from pathlib import Path

import pytest

from iros.errors import ConfigError
from iros.pipeline import default_config_text, load_config, parse_config


def test_default_text_parses_and_roundtrips():
    cfg = parse_config(default_config_text(), base_dir="/work")
    again = parse_config(cfg.canonical(), base_dir="/")
    assert again == cfg
    assert again.config_hash() == cfg.config_hash()


def test_relative_paths_resolve_against_base_dir():
    cfg = parse_config(default_config_text(), base_dir="/work/site")
    assert cfg.skus_path == Path("/work/site/data/skus.csv")
    assert cfg.demand_path == Path("/work/site/data/demand.csv")


def test_absolute_paths_left_alone():
    text = default_config_text().replace(
        "data.skus = data/skus.csv", "data.skus = /srv/master/skus.csv"
    )
    cfg = parse_config(text, base_dir="/work")
    assert cfg.skus_path == Path("/srv/master/skus.csv")


def test_empty_signals_means_unset():
    cfg = parse_config(default_config_text(), base_dir=".")
    assert cfg.signals_path is None
    assert "signals.csv" not in cfg.data_paths()

    text = default_config_text().replace("data.signals =", "data.signals = data/signals.csv")
    cfg = parse_config(text, base_dir="/d")
    assert cfg.signals_path == Path("/d/data/signals.csv")
    assert cfg.data_paths()["signals.csv"] == Path("/d/data/signals.csv")


def test_comments_and_blank_lines_ignored():
    text = default_config_text() + "\n# trailing comment\n\nforecast.cv_folds = 5  # inline\n"
    # cv_folds appears twice now, so strip the original line first
    text = text.replace("forecast.cv_folds = 3\n", "", 1)
    cfg = parse_config(text, base_dir=".")
    assert cfg.cv_folds == 5


def test_duplicate_key_rejected():
    text = default_config_text() + "forecast.horizon = 9\n"
    with pytest.raises(ConfigError, match="duplicate key forecast.horizon"):
        parse_config(text, base_dir=".")


def test_unknown_key_rejected():
    text = default_config_text() + "plan.solver = cbc\n"
    with pytest.raises(ConfigError, match="unknown config keys: plan.solver"):
        parse_config(text, base_dir=".")


def test_missing_required_data_path_rejected():
    text = default_config_text().replace("data.orders = data/orders.csv\n", "")
    with pytest.raises(ConfigError, match="missing required key data.orders"):
        parse_config(text, base_dir=".")


def test_line_without_equals_rejected():
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("just some words\n", base_dir=".")


def test_order_frequency_beyond_horizon_rejected():
    text = default_config_text().replace(
        "forecast.order_frequency = 4", "forecast.order_frequency = 13"
    )
    with pytest.raises(ConfigError, match="order_frequency 13 outside"):
        parse_config(text, base_dir=".")


def test_service_level_count_must_match_k():
    text = default_config_text().replace(
        "priority.service_levels = 0.95, 0.90", "priority.service_levels = 0.95"
    )
    with pytest.raises(ConfigError, match="needs 2 values"):
        parse_config(text, base_dir=".")


def test_bad_enum_values_rejected():
    for old, new, frag in [
        ("exceptions.policy = manual", "exceptions.policy = ignore", "exceptions.policy"),
        ("plan.mode = operational", "plan.mode = fast", "plan.mode"),
        ("plan.objective = cost", "plan.objective = speed", "plan.objective"),
        ("demand.aggregation_level = weekly", "demand.aggregation_level = daily2", "aggregation level"),
        ("exceptions.detector = auto", "exceptions.detector = magic", "exceptions.detector"),
    ]:
        with pytest.raises(ConfigError, match=frag):
            parse_config(default_config_text().replace(old, new), base_dir=".")


def test_bad_scalar_types_rejected():
    with pytest.raises(ConfigError, match="must be an integer"):
        parse_config(default_config_text().replace(
            "forecast.horizon = 12", "forecast.horizon = soon"), base_dir=".")
    with pytest.raises(ConfigError, match="must be true or false"):
        parse_config(default_config_text().replace(
            "demand.include_quotes = false", "demand.include_quotes = maybe"), base_dir=".")
    with pytest.raises(ConfigError, match="must be a number"):
        parse_config(default_config_text().replace(
            "plan.gap = 0.01", "plan.gap = tight"), base_dir=".")


def test_empty_time_limit_means_none():
    text = default_config_text().replace("plan.time_limit = 120", "plan.time_limit =")
    cfg = parse_config(text, base_dir=".")
    assert cfg.time_limit is None
    # and it survives the canonical round trip
    assert parse_config(cfg.canonical(), base_dir=".").time_limit is None


def test_stage_seeds_offset_from_base():
    text = default_config_text().replace("seed.base = 0", "seed.base = 100")
    cfg = parse_config(text, base_dir=".")
    assert cfg.seed("priority") == 111
    assert cfg.seed("cluster") == 123
    assert cfg.seed("shortlist") == 137


def test_stage_seed_override_wins_over_base():
    text = default_config_text() + "seed.cluster = 7\n"
    cfg = parse_config(text, base_dir=".")
    assert cfg.seed("cluster") == 7
    assert cfg.seed("priority") == 11
    assert parse_config(cfg.canonical(), base_dir=".").seed("cluster") == 7


def test_unknown_seed_stage_rejected():
    with pytest.raises(ConfigError, match="unknown seed key seed.ingest"):
        parse_config(default_config_text() + "seed.ingest = 3\n", base_dir=".")


def test_hash_ignores_line_order_but_not_values(tmp_path):
    base = default_config_text()
    shuffled = "\n".join(sorted(base.splitlines(), reverse=True)) + "\n"
    a = parse_config(base, base_dir=".")
    b = parse_config(shuffled, base_dir=".")
    assert a.config_hash() == b.config_hash()

    c = parse_config(base.replace("plan.gap = 0.01", "plan.gap = 0.02"), base_dir=".")
    assert c.config_hash() != a.config_hash()


def test_load_config_reads_file_and_resolves(tmp_path):
    conf = tmp_path / "iros.conf"
    conf.write_text(default_config_text(), encoding="utf-8")
    cfg = load_config(conf)
    assert cfg.orders_path == tmp_path / "data" / "orders.csv"

    with pytest.raises(ConfigError, match="cannot read config"):
        load_config(tmp_path / "absent.conf")
