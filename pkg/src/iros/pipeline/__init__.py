"""Configuration-driven pipeline runner and run-directory plumbing."""

from .config import PipelineConfig, default_config_text, load_config, parse_config
from .runner import (
    REPORT_KINDS,
    RunManifest,
    StageRecord,
    latest_completed,
    load_manifest,
    new_run_dir,
    report,
    run_all,
    run_dirs,
    run_until,
    step,
)
from .stages import STAGE_ORDER, STAGES, default_roster, report_roster

__all__ = [
    "PipelineConfig",
    "REPORT_KINDS",
    "RunManifest",
    "STAGES",
    "STAGE_ORDER",
    "StageRecord",
    "default_config_text",
    "default_roster",
    "latest_completed",
    "load_config",
    "load_manifest",
    "new_run_dir",
    "parse_config",
    "report",
    "report_roster",
    "run_all",
    "run_dirs",
    "run_until",
    "step",
]
