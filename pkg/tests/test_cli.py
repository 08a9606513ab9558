"""Tests for the iros command line interface and exit code contract."""

import pytest

from iros.cli import main
from iros.pipeline import load_manifest, run_dirs

from test_pipeline_run import build_root
from test_pipeline_step import week_events


def run_cli(path, *args):
    return main(["--config", str(path / "iros.conf"),
                 "--run-dir", str(path / "runs"), *args])


def test_plan_resumes_the_partial_run(tmp_path, capsys):
    cfg, root = build_root(tmp_path)
    assert run_cli(tmp_path, "demand") == 0
    assert "2 stage(s) done" in capsys.readouterr().out

    assert run_cli(tmp_path, "plan") == 0
    assert "12 stage(s) done" in capsys.readouterr().out
    assert len(run_dirs(root)) == 1
    man = load_manifest(run_dirs(root)[0])
    assert man.stage_names()[-1] == "summarize"


def test_step_and_report_commands(tmp_path, capsys):
    cfg, root = build_root(tmp_path)
    assert run_cli(tmp_path, "plan") == 0
    capsys.readouterr()

    prior = run_dirs(root)[-1]
    week_events(prior, cfg, tmp_path / "week.csv")
    assert run_cli(tmp_path, "step", "--events", str(tmp_path / "week.csv")) == 0
    out = capsys.readouterr().out
    assert f"advanced from {prior.name}" in out
    assert "10 stable, 0 unstable, 0 pending" in out

    assert run_cli(tmp_path, "report", "--kind", "forecast_eval") == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines and lines[0].endswith("forecast_eval.csv")


def test_seed_override_forces_a_fresh_run(tmp_path):
    cfg, root = build_root(tmp_path, n_skus=6)
    assert run_cli(tmp_path, "demand") == 0
    code = main(["--config", str(tmp_path / "iros.conf"),
                 "--run-dir", str(tmp_path / "runs"), "--seed", "5", "demand"])
    assert code == 0
    assert len(run_dirs(root)) == 2


def test_missing_config_is_a_validation_error(tmp_path, capsys):
    code = main(["--config", str(tmp_path / "absent.conf"), "demand"])
    assert code == 1
    assert "error: cannot read config" in capsys.readouterr().err


def test_step_without_prior_run_exits_1(tmp_path, capsys):
    cfg, root = build_root(tmp_path, n_skus=6)
    (tmp_path / "week.csv").write_text(
        "date,sku_id,quantity,kind\n2025-07-01,SKU000,4,sale\n", encoding="utf-8")
    code = run_cli(tmp_path, "step", "--events", str(tmp_path / "week.csv"))
    assert code == 1
    assert "no completed run" in capsys.readouterr().err


def test_report_without_runs_exits_1(tmp_path, capsys):
    cfg, root = build_root(tmp_path, n_skus=6)
    code = run_cli(tmp_path, "report", "--kind", "cd_diagram")
    assert code == 1
    assert "no runs under" in capsys.readouterr().err


def test_corrupt_input_is_a_stage_failure(tmp_path, capsys):
    cfg, root = build_root(tmp_path, n_skus=6)
    demand = tmp_path / "data" / "demand.csv"
    demand.write_text(demand.read_text(encoding="utf-8")
                      + "2025-01-06,SKU000,many,sale\n", encoding="utf-8")
    code = run_cli(tmp_path, "demand")
    assert code == 2
    assert "stage 'ingest' failed" in capsys.readouterr().err


def test_usage_mistakes_exit_1(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["report", "--kind", "weather"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["polish"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 1
