"""Run directories, manifests, the full pipeline, and the moving window."""

from __future__ import annotations

import datetime as dt
import shutil
import time
from dataclasses import dataclass, field
from pathlib import Path
from types import SimpleNamespace

import numpy as np

from ..anomaly import DetectorConfig, flag_forecast_deviations
from ..cluster import DegenerateMatrix, pca_fit, pca_project
from ..core import load_dataset, snapshot, upsert_records
from ..demand import (
    DemandSeries,
    ExceptionResolution,
    ResolutionAction,
    bucket_date,
    bucket_index,
)
from ..errors import (
    ConfigError,
    HistoryTooShort,
    MissingStage,
    NoPriorRun,
    StageFailed,
    TooFew,
    TooShort,
)
from ..features import FEATURE_NAMES, extract_features, scale_matrix
from ..forecast import rolling_origin_cv, shortlist_by_cluster
from ..forecast.stats import emit_cd_diagram, friedman_test, mean_ranks, nemenyi_cd
from ..replenish import SolverOptions, compare_policies
from . import stages
from .artifacts import (
    read_csv,
    read_demand_events,
    read_json,
    read_series,
    sha256_file,
    spec_from_obj,
    spec_to_obj,
    write_csv,
    write_json,
    write_resolutions,
    write_text,
)
from .config import PipelineConfig
from .stages import STAGE_ORDER, STAGES

MANIFEST_NAME = "manifest.json"

# step inserts the deviation check between consolidation and exception scoring
STEP_STAGE_ORDER = STAGE_ORDER[:2] + ("deviations",) + STAGE_ORDER[2:]


@dataclass
class StageRecord:
    name: str
    seconds: float
    artifacts: dict[str, str]
    reused: bool = False


@dataclass
class RunManifest:
    run_id: str
    config_hash: str
    inputs: dict[str, str]
    stages: list[StageRecord] = field(default_factory=list)
    stability: dict[str, str] = field(default_factory=dict)
    prior_run_id: str | None = None

    def stage_names(self) -> list[str]:
        return [s.name for s in self.stages]

    def artifact_digests(self) -> dict[str, str]:
        out: dict[str, str] = {}
        for s in self.stages:
            out.update(s.artifacts)
        return out

    def to_obj(self) -> dict:
        return {
            "run_id": self.run_id,
            "config_hash": self.config_hash,
            "inputs": self.inputs,
            "prior_run_id": self.prior_run_id,
            "stages": [
                {"name": s.name, "seconds": s.seconds, "reused": s.reused,
                 "artifacts": s.artifacts}
                for s in self.stages
            ],
            "stability": self.stability,
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "RunManifest":
        return cls(
            run_id=obj["run_id"],
            config_hash=obj["config_hash"],
            inputs=dict(obj["inputs"]),
            stages=[
                StageRecord(s["name"], s["seconds"], dict(s["artifacts"]), s["reused"])
                for s in obj["stages"]
            ],
            stability=dict(obj["stability"]),
            prior_run_id=obj.get("prior_run_id"),
        )

    def save(self, run_dir: Path) -> Path:
        return write_json(run_dir / MANIFEST_NAME, self.to_obj())


# --- run directory bookkeeping -------------------------------------------------

def run_dirs(root: Path) -> list[Path]:
    if not root.is_dir():
        return []
    return sorted(p for p in root.iterdir() if p.is_dir() and p.name.startswith("run-"))


def new_run_dir(root: Path) -> Path:
    existing = run_dirs(root)
    nxt = 1
    if existing:
        nxt = max(int(p.name.split("-")[1]) for p in existing) + 1
    run = root / f"run-{nxt:04d}"
    run.mkdir(parents=True)
    return run


def load_manifest(run_dir: Path) -> RunManifest | None:
    path = run_dir / MANIFEST_NAME
    if not path.is_file():
        return None
    return RunManifest.from_obj(read_json(path))


def latest_completed(root: Path) -> Path | None:
    """Most recent run with every pipeline stage recorded."""
    for run in reversed(run_dirs(root)):
        man = load_manifest(run)
        if man and set(STAGE_ORDER) <= set(man.stage_names()):
            return run
    return None


def _digest_inputs(cfg: PipelineConfig) -> dict[str, str]:
    out = {}
    for name, src in sorted(cfg.data_paths().items()):
        p = Path(src)
        if p.is_file():
            out[name] = sha256_file(p)
    return out


def _new_manifest(cfg: PipelineConfig, run: Path, *, inputs: dict[str, str],
                  prior: str | None = None) -> RunManifest:
    write_text(run / "config.txt", cfg.canonical())
    man = RunManifest(run_id=run.name, config_hash=cfg.config_hash(),
                      inputs=inputs, prior_run_id=prior)
    man.save(run)
    return man


def _execute(cfg: PipelineConfig, run: Path, man: RunManifest, name: str, fn,
             reused: bool = False) -> None:
    t0 = time.perf_counter()
    try:
        rel_paths = fn(cfg, run)
    except ConfigError:
        raise
    except Exception as exc:
        raise StageFailed(name, exc) from exc
    digests = {rel: sha256_file(run / rel) for rel in sorted(rel_paths)}
    man.stages.append(StageRecord(name, round(time.perf_counter() - t0, 6),
                                  digests, reused))
    man.save(run)


def _label_all_stable(run: Path, man: RunManifest) -> None:
    ds = load_dataset(run / "dataset")
    man.stability = {sku_id: "stable" for sku_id in sorted(ds.skus)}
    man.save(run)


def _reusable_priority(cfg: PipelineConfig, root: Path, current: Path) -> Path | None:
    for run in reversed(run_dirs(root)):
        if run == current or not (run / "priority.csv").is_file():
            continue
        man = load_manifest(run)
        if man and man.config_hash == cfg.config_hash():
            return run / "priority.csv"
    return None


def _priority_stage(cfg: PipelineConfig, root: Path, run: Path, man: RunManifest,
                    refresh: bool) -> None:
    donor = None if refresh else _reusable_priority(cfg, root, run)
    if donor is None:
        _execute(cfg, run, man, "prioritize", STAGES["prioritize"])
        return

    def _copy(cfg_, run_):
        shutil.copyfile(donor, run_ / "priority.csv")
        return ["priority.csv"]

    _execute(cfg, run, man, "prioritize", _copy, reused=True)


# --- batch pipeline -------------------------------------------------------------

def run_until(cfg: PipelineConfig, root: Path, target: str,
              refresh_priorities: bool = False) -> RunManifest:
    """Execute pipeline stages through `target`, resuming a compatible
    partial run when one exists."""
    if target not in STAGE_ORDER:
        raise ConfigError(f"unknown stage {target!r}")
    prefix = STAGE_ORDER[: STAGE_ORDER.index(target) + 1]

    run = None
    man = None
    latest = run_dirs(root)[-1] if run_dirs(root) else None
    if latest is not None:
        prior_man = load_manifest(latest)
        if prior_man is not None and prior_man.config_hash == cfg.config_hash():
            done = prior_man.stage_names()
            if tuple(done) == STAGE_ORDER[: len(done)] and len(done) < len(prefix):
                run, man = latest, prior_man
    if run is None:
        root.mkdir(parents=True, exist_ok=True)
        run = new_run_dir(root)
        man = _new_manifest(cfg, run, inputs=_digest_inputs(cfg))

    for name in prefix[len(man.stages):]:
        if name == "prioritize":
            _priority_stage(cfg, root, run, man, refresh_priorities)
        else:
            _execute(cfg, run, man, name, STAGES[name])
        if name == "ingest":
            _label_all_stable(run, man)
    return man


def run_all(cfg: PipelineConfig, root: Path,
            refresh_priorities: bool = False) -> RunManifest:
    return run_until(cfg, root, STAGE_ORDER[-1], refresh_priorities)


# --- moving window --------------------------------------------------------------

def _read_resolved(prior: Path) -> list[dict]:
    path = prior / "exceptions_resolved.json"
    if not path.is_file():
        return []
    return read_json(path)["resolutions"]


def _read_pending(prior: Path) -> list[dict]:
    path = prior / "pending_exceptions.json"
    if not path.is_file():
        return []
    return read_json(path)["exceptions"]


_ACTIONS = {
    "keep": ResolutionAction.KEEP,
    "reduce_fraction": ResolutionAction.REDUCE_FRACTION,
    "replace": ResolutionAction.REPLACE,
}


def _deviation_stage(cfg: PipelineConfig, run: Path, prior: Path,
                     state: dict) -> list[str]:
    level = cfg.aggregation_level
    series = read_series(run / "series.csv", level)
    prior_meta = read_json(prior / "forecast_meta.json")
    prior_points = stages.load_forecast_points(prior)
    resolved = _read_resolved(prior)
    carried = [e for e in _read_pending(prior)
               if e["id"] not in {r["id"] for r in resolved}]

    labels: dict[str, str] = {}
    dev_rows = []
    pending: dict[str, dict] = {e["id"]: dict(e, status="pending") for e in carried}
    effective: list[ExceptionResolution] = []
    detector_cfg = DetectorConfig()

    # user decisions indexed by (sku, bucket start date)
    keeps: dict[str, set[dt.date]] = {}
    user_res: dict[str, list[tuple[dt.date, ResolutionAction, float | None]]] = {}
    for r in resolved:
        day = dt.date.fromisoformat(r["date"])
        action = _ACTIONS[r["action"]]
        if action is ResolutionAction.KEEP:
            keeps.setdefault(r["sku_id"], set()).add(day)
        user_res.setdefault(r["sku_id"], []).append((day, action, r.get("param")))

    for sku_id in sorted(series):
        s = series[sku_id]
        for day, action, param in user_res.get(sku_id, ()):
            idx = bucket_index(day, s.start, level)
            if 0 <= idx < len(s.values):
                effective.append(ExceptionResolution(sku_id, idx, action, param))

        # an explicit keep says the model missed real demand: re-select even
        # if the kept bucket has already left the checkable window
        kept = bool(keeps.get(sku_id))

        m = prior_meta.get(sku_id)
        if m is None:
            labels[sku_id] = "unstable"  # no prior spec to keep
            continue
        start_day = dt.date.fromordinal(m["plan_start_ordinal"])
        idx0 = bucket_index(start_day, s.start, level)
        points = list(prior_points.get(sku_id, ()))
        if idx0 >= 0 and bucket_date(s.start, level, idx0, anchor=s.start) < start_day:
            # the plan was cut mid-bucket; that bucket mixes demand the
            # model already saw, so it is not evidence of deviation
            idx0 += 1
            points = points[1:]
        if idx0 < 0:
            points = points[-idx0:]
            idx0 = 0
        window = s.values[idx0: idx0 + len(points)]
        overlap = min(len(window), len(points))
        if overlap < 1:
            labels[sku_id] = "unstable" if kept else "stable"
            continue
        win_start = bucket_date(s.start, level, idx0, anchor=s.start)
        win_series = DemandSeries(sku_id, level, win_start, tuple(window[:overlap]))
        win_res = [
            ExceptionResolution(sku_id, r.bucket_index - idx0, r.action, r.param)
            for r in effective
            if r.sku_id == sku_id and 0 <= r.bucket_index - idx0 < overlap
        ]
        report, _ = flag_forecast_deviations(
            win_series, SimpleNamespace(point=tuple(points[:overlap]),
                                        insample_sigma=m.get("sigma", 0.0)),
            detector_cfg, win_res,
        )

        kept_days = keeps.get(sku_id, set())
        new_flags = []
        for b, flag in enumerate(report.flags):
            abs_idx = idx0 + b
            day = bucket_date(s.start, level, abs_idx, anchor=s.start)
            dev_rows.append([sku_id, abs_idx, day.isoformat(), s.values[abs_idx],
                             float(points[b]), float(report.scores[b]), bool(flag)])
            if flag and day not in kept_days:
                new_flags.append((abs_idx, b, day))

        if not new_flags:
            labels[sku_id] = "unstable" if kept else "stable"
            continue
        if cfg.exception_policy == "auto_reduce":
            labels[sku_id] = "unstable"
            effective.extend(
                ExceptionResolution(sku_id, abs_idx, ResolutionAction.REDUCE_FRACTION,
                                    cfg.reduce_fraction)
                for abs_idx, _, _ in new_flags
            )
        else:
            labels[sku_id] = "pending"
            for abs_idx, b, day in new_flags:
                eid = f"exc-{sku_id}-{day.isoformat()}"
                pending[eid] = {
                    "id": eid, "sku_id": sku_id, "bucket_index": abs_idx,
                    "date": day.isoformat(), "score": float(report.scores[b]),
                    "actual": int(s.values[abs_idx]), "forecast": float(points[b]),
                    "suggested_action": "reduce_fraction",
                    "suggested_param": cfg.reduce_fraction, "status": "pending",
                }

    # a carried-over unresolved deviation keeps its SKU on the prior forecast
    for entry in pending.values():
        labels[entry["sku_id"]] = "pending"

    state["labels"] = labels
    write_csv(run / "deviations.csv",
              ["sku_id", "bucket_index", "date", "actual", "forecast", "score",
               "flagged"], dev_rows)
    write_json(run / "pending_exceptions.json",
               {"exceptions": [pending[k] for k in sorted(pending)]})
    write_resolutions(run / "resolutions_effective.csv",
                      sorted(effective, key=lambda r: (r.sku_id, r.bucket_index)))
    write_json(run / "deviation_notes.json", {
        "labels": {k: labels[k] for k in sorted(labels)},
        "resolved_consumed": sorted(r["id"] for r in resolved),
    })
    return ["deviations.csv", "pending_exceptions.json", "resolutions_effective.csv",
            "deviation_notes.json"]


def _step_priority(cfg: PipelineConfig, run: Path, prior: Path) -> list[str]:
    """Carry prior priorities; new SKUs join the lowest-priority class."""
    rows = read_csv(prior / "priority.csv",
                    ["sku_id", "cluster_label", "service_level"])
    known = {r["sku_id"] for r in rows}
    lowest = max(r["cluster_label"] for r in rows) if rows else "A"
    level = min((float(r["service_level"]) for r in rows), default=cfg.service_levels[-1])
    ds = load_dataset(run / "dataset")
    out = [[r["sku_id"], r["cluster_label"], float(r["service_level"])] for r in rows]
    out += [[sku_id, lowest, level] for sku_id in sorted(ds.skus) if sku_id not in known]
    out.sort(key=lambda r: r[0])
    write_csv(run / "priority.csv", ["sku_id", "cluster_label", "service_level"], out)
    return ["priority.csv"]


def _step_features(cfg: PipelineConfig, run: Path, prior: Path,
                   recompute: set[str]) -> list[str]:
    prior_rows = read_csv(prior / "features.csv", ["sku_id", *FEATURE_NAMES])
    adjusted = read_series(run / "demand_adjusted.csv", cfg.aggregation_level)
    rows = {r["sku_id"]: [r["sku_id"], *(float(r[n]) for n in FEATURE_NAMES)]
            for r in prior_rows}
    skipped = []
    for sku_id in sorted(recompute):
        if sku_id not in adjusted:
            continue
        try:
            fv = extract_features(adjusted[sku_id].values, cfg.seasonal_period,
                                  sku_id=sku_id)
        except TooShort:
            rows.pop(sku_id, None)
            skipped.append(sku_id)
            continue
        rows[sku_id] = [sku_id, *fv.values()]
    write_csv(run / "features.csv", ["sku_id", *FEATURE_NAMES],
              [rows[k] for k in sorted(rows)])
    write_json(run / "feature_notes.json", {"skipped": skipped})
    return ["features.csv", "feature_notes.json"]


def _step_cluster(cfg: PipelineConfig, run: Path, prior: Path,
                  recompute: set[str]) -> list[str]:
    prior_map = {
        r["sku_id"]: int(r["cluster"])
        for r in read_csv(prior / "series_clusters.csv", ["sku_id", "cluster"])
    }
    cur_rows = read_csv(run / "features.csv", ["sku_id", *FEATURE_NAMES])
    cur = {r["sku_id"]: np.array([float(r[n]) for n in FEATURE_NAMES])
           for r in cur_rows}

    out = {sku: lab for sku, lab in prior_map.items()
           if sku in cur and sku not in recompute}
    targets = [sku for sku in sorted(cur) if sku not in out]

    p_rows = read_csv(prior / "features.csv", ["sku_id", *FEATURE_NAMES])
    p_ids = [r["sku_id"] for r in p_rows]
    if targets and p_ids:
        Xp = np.array([[float(r[n]) for n in FEATURE_NAMES] for r in p_rows])
        lo, hi = Xp.min(axis=0), Xp.max(axis=0)
        span = hi - lo
        scaled_p = scale_matrix(Xp)
        try:
            model = pca_fit(scaled_p)
            proj_p = pca_project(model, scaled_p)
        except DegenerateMatrix:
            model, proj_p = None, scaled_p
        # centroids of the prior partition in the prior projection space
        centroids = {}
        for lab in sorted(set(prior_map.values())):
            members = [i for i, sku in enumerate(p_ids) if prior_map.get(sku) == lab]
            if members:
                centroids[lab] = proj_p[members].mean(axis=0)
        if centroids:
            for sku in targets:
                row = cur[sku]
                scaled = np.where(span > 0, (row - lo) / np.where(span > 0, span, 1.0),
                                  0.5)
                proj = pca_project(model, scaled[None, :])[0] if model is not None \
                    else scaled
                out[sku] = min(centroids,
                               key=lambda lab: (float(np.linalg.norm(proj - centroids[lab])),
                                                lab))
    write_csv(run / "series_clusters.csv", ["sku_id", "cluster"],
              [[sku, out[sku]] for sku in sorted(out)])
    return ["series_clusters.csv"]


def _step_shortlist(cfg: PipelineConfig, run: Path, prior: Path,
                    unstable: set[str]) -> list[str]:
    prior_sl = read_json(prior / "shortlist.json")
    clusters = stages._cluster_map(run)
    affected = sorted({clusters[sku] for sku in unstable if sku in clusters})
    out = dict(prior_sl)
    if affected:
        adjusted = read_series(run / "demand_adjusted.csv", cfg.aggregation_level)
        roster = stages.default_roster(cfg.seasonal_period)
        for cluster in affected:
            group = [adjusted[sku] for sku in sorted(clusters)
                     if clusters[sku] == cluster and sku in adjusted]
            try:
                sl = shortlist_by_cluster(
                    group, roster,
                    sample_size=min(cfg.shortlist_sample, len(group)),
                    seed=cfg.seed("shortlist"), folds=cfg.cv_folds,
                )
            except (TooFew, HistoryTooShort):
                sl = stages._FALLBACK_SHORTLIST
            out[str(cluster)] = [spec_to_obj(s) for s in sl]
    write_json(run / "shortlist.json", out)
    return ["shortlist.json"]


def _step_tune(cfg: PipelineConfig, run: Path, prior: Path,
               labels: dict[str, str]) -> list[str]:
    prior_models = read_json(prior / "models.json")
    adjusted = read_series(run / "demand_adjusted.csv", cfg.aggregation_level)
    clusters = stages._cluster_map(run)
    shortlists = {key: [spec_from_obj(o) for o in objs]
                  for key, objs in read_json(run / "shortlist.json").items()}
    models = {}
    cv_rows = []
    for sku_id in sorted(adjusted):
        if labels.get(sku_id, "unstable") != "unstable" and sku_id in prior_models:
            entry = dict(prior_models[sku_id])
            entry["cluster"] = clusters.get(sku_id)
            models[sku_id] = entry
            continue
        s = adjusted[sku_id]
        cluster = clusters.get(sku_id)
        shortlist = shortlists[str(cluster)] if cluster is not None \
            else shortlists["fallback"]
        if not any(s.values):
            models[sku_id] = {"model": spec_to_obj(stages._spec("naive_last")),
                              "cv_mase": None, "cluster": cluster}
            continue
        try:
            report = rolling_origin_cv(s, stages._subset_candidates(shortlist),
                                       folds=cfg.cv_folds, horizon_per_fold=1)
            chosen = report.best()
            score = report.median(chosen)
        except (HistoryTooShort, TooFew):
            chosen, score = stages._spec("ses"), None
        models[sku_id] = {"model": spec_to_obj(chosen),
                          "cv_mase": score, "cluster": cluster}
        if score is not None:
            for spec, folds in report.scores:
                cv_rows.append([sku_id, spec.describe(), float(np.median(folds))])
    write_json(run / "models.json", models)
    write_csv(run / "cv_scores.csv", ["sku_id", "model", "median_mase"], cv_rows)
    return ["models.json", "cv_scores.csv"]


def _pending_overrides(cfg: PipelineConfig, run: Path, prior: Path,
                       labels: dict[str, str]) -> dict:
    pending = sorted(sku for sku, lab in labels.items() if lab == "pending")
    if not pending:
        return {}
    prior_meta = read_json(prior / "forecast_meta.json")
    prior_points = stages.load_forecast_points(prior)
    series = read_series(run / "series.csv", cfg.aggregation_level)
    ds = load_dataset(run / "dataset")
    cur_start = dt.date.fromordinal(ds.as_of.toordinal() + 1)
    overrides = {}
    for sku_id in pending:
        m = prior_meta.get(sku_id)
        points = list(prior_points.get(sku_id, ()))
        if m is None or not points or sku_id not in series:
            continue
        s = series[sku_id]
        prior_start = dt.date.fromordinal(m["plan_start_ordinal"])
        shift = (bucket_index(cur_start, s.start, cfg.aggregation_level)
                 - bucket_index(prior_start, s.start, cfg.aggregation_level))
        shifted = points[max(0, shift):]
        last = shifted[-1] if shifted else points[-1]
        while len(shifted) < cfg.horizon:
            shifted.append(last)
        desc = spec_from_obj(m["model"]).describe() if m.get("model") else "naive_last"
        overrides[sku_id] = (tuple(shifted[: cfg.horizon]), desc,
                             m.get("sigma", 0.0), m.get("model"))
    return overrides


def step(cfg: PipelineConfig, root: Path, events_path: Path,
         refresh_priorities: bool = False) -> RunManifest:
    """Advance the moving window: append events, check realized demand
    against the prior forecast, refit what moved, re-plan."""
    prior = latest_completed(root)
    if prior is None:
        raise NoPriorRun(f"no completed run under {root}")
    events_path = Path(events_path)
    if not events_path.is_file():
        raise ConfigError(f"events file not found: {events_path}")

    run = new_run_dir(root)
    man = _new_manifest(cfg, run, inputs={"events.csv": sha256_file(events_path)},
                        prior=prior.name)
    state: dict = {}

    def _ingest(cfg_, run_):
        ds = load_dataset(prior / "dataset")
        events = read_demand_events(events_path)
        ds = upsert_records(ds, events)  # as_of advances with the new events
        dataset_dir = run_ / "dataset"
        dataset_dir.mkdir(parents=True, exist_ok=True)
        snapshot(ds, dataset_dir)
        shutil.copyfile(events_path, run_ / "events.csv")
        out = [f"dataset/{n}" for n in ("skus.csv", "suppliers.csv", "orders.csv",
                                        "demand.csv")]
        out.append("events.csv")
        if (prior / "signals.csv").is_file():
            shutil.copyfile(prior / "signals.csv", run_ / "signals.csv")
            out.append("signals.csv")
        return out

    _execute(cfg, run, man, "ingest", _ingest)
    _label_all_stable(run, man)
    _execute(cfg, run, man, "consolidate", STAGES["consolidate"])
    _execute(cfg, run, man, "deviations",
             lambda c, r: _deviation_stage(c, r, prior, state))
    labels = state["labels"]
    man.stability.update(labels)
    man.save(run)

    _execute(cfg, run, man, "exceptions", STAGES["exceptions"])
    if refresh_priorities:
        _execute(cfg, run, man, "prioritize", STAGES["prioritize"])
    else:
        _execute(cfg, run, man, "prioritize",
                 lambda c, r: _step_priority(c, r, prior), reused=True)

    unstable = {sku for sku, lab in labels.items() if lab == "unstable"}
    _execute(cfg, run, man, "features",
             lambda c, r: _step_features(c, r, prior, unstable))
    _execute(cfg, run, man, "cluster",
             lambda c, r: _step_cluster(c, r, prior, unstable))
    _execute(cfg, run, man, "shortlist",
             lambda c, r: _step_shortlist(c, r, prior, unstable))
    _execute(cfg, run, man, "tune", lambda c, r: _step_tune(c, r, prior, labels))

    overrides = _pending_overrides(cfg, run, prior, labels)
    _execute(cfg, run, man, "forecast",
             lambda c, r: stages.stage_forecast(c, r, overrides=overrides))
    _execute(cfg, run, man, "group", STAGES["group"])
    _execute(cfg, run, man, "plan", STAGES["plan"])
    _execute(cfg, run, man, "summarize", STAGES["summarize"])
    return man


# --- reports ---------------------------------------------------------------------

REPORT_KINDS = ("forecast_eval", "cd_diagram", "policy_comparison")


def _require(run: Path, rel: str, stage: str) -> Path:
    path = run / rel
    if not path.is_file():
        raise MissingStage(f"{rel} not found; run the {stage} stage first")
    return path


def _pct(old: float, new: float) -> float:
    if old <= 0:
        return 0.0
    return (old - new) / old * 100.0


def report_forecast_eval(cfg: PipelineConfig, run: Path, out_dir: Path) -> list[Path]:
    models = read_json(_require(run, "models.json", "tune"))
    by_cluster: dict[str, list[float]] = {}
    counts: dict[str, int] = {}
    for entry in models.values():
        key = "unclustered" if entry["cluster"] is None else str(entry["cluster"])
        counts[key] = counts.get(key, 0) + 1
        if entry["cv_mase"] is not None:
            by_cluster.setdefault(key, []).append(entry["cv_mase"])
    rows = [
        [key, counts[key],
         float(np.median(by_cluster[key])) if key in by_cluster else ""]
        for key in sorted(counts, key=lambda k: (k == "unclustered", k))
    ]
    path = out_dir / "forecast_eval.csv"
    write_csv(path, ["cluster", "skus", "median_mase"], rows)
    return [path]


def report_cd_diagram(cfg: PipelineConfig, run: Path, out_dir: Path) -> list[Path]:
    series = read_series(_require(run, "demand_adjusted.csv", "exceptions"),
                         cfg.aggregation_level)
    specs = stages.report_roster(cfg.seasonal_period)
    descs = [s.describe() for s in specs]
    cols = []
    used = []
    for sku_id in sorted(series):
        try:
            rep = rolling_origin_cv(series[sku_id], specs, folds=cfg.cv_folds,
                                    horizon_per_fold=1)
        except (HistoryTooShort, TooFew):
            continue
        med = {spec.describe(): float(np.median(folds)) for spec, folds in rep.scores}
        if any(d not in med for d in descs):
            continue  # an excluded model would leave a hole in the rank matrix
        cols.append([med[d] for d in descs])
        used.append(sku_id)
    if len(cols) < 2:
        raise TooFew(f"need >= 2 rankable series, got {len(cols)}")
    matrix = np.array(cols).T  # models x series
    ranks = mean_ranks(matrix)
    stat, p_value = friedman_test(matrix)
    cd = nemenyi_cd(len(specs), len(cols), 0.05)

    svg = out_dir / "cd_diagram.svg"
    emit_cd_diagram(dict(zip(descs, ranks)), cd, svg)
    ranks_csv = out_dir / "cd_ranks.csv"
    order = sorted(range(len(descs)), key=lambda i: (ranks[i], descs[i]))
    write_csv(ranks_csv, ["model", "mean_rank"],
              [[descs[i], float(ranks[i])] for i in order])
    stats_json = out_dir / "cd_stats.json"
    write_json(stats_json, {
        "friedman_statistic": stat, "p_value": p_value, "critical_difference": cd,
        "models": len(specs), "series": len(cols), "alpha": 0.05,
    })
    return [svg, ranks_csv, stats_json]


_COMPARISON_PERIODS = (12, 16, 20, 24)


def report_policy_comparison(cfg: PipelineConfig, run: Path,
                             out_dir: Path) -> list[Path]:
    instances = [stages.instance_from_obj(o)
                 for o in read_json(_require(run, "instances.json", "plan"))]
    status = {p["group_id"]: p["status"]
              for p in read_json(_require(run, "plan.json", "plan"))}
    solver = SolverOptions(gap=cfg.gap, time_limit=cfg.time_limit,
                           objective=cfg.objective)
    agg = {p: [0, 0, 0.0, 0.0, 0] for p in _COMPARISON_PERIODS}
    skipped = []
    for inst in instances:
        gid = inst.group.group_id
        if status.get(gid) == "infeasible":
            skipped.append(gid)
            continue
        cells = inst.size * inst.horizon
        for comp in compare_policies(inst, _COMPARISON_PERIODS, solver):
            acc = agg[comp.periods_of_supply]
            acc[0] += comp.baseline_cost
            acc[1] += comp.optimized_cost
            acc[2] += comp.mean_inventory_baseline * cells
            acc[3] += comp.mean_inventory_optimized * cells
            acc[4] += cells
    rows = []
    for p in _COMPARISON_PERIODS:
        base_cost, opt_cost, base_inv_w, opt_inv_w, cells = agg[p]
        base_inv = base_inv_w / cells if cells else 0.0
        opt_inv = opt_inv_w / cells if cells else 0.0
        rows.append([p, base_cost, opt_cost, _pct(base_cost, opt_cost),
                     base_inv, opt_inv, _pct(base_inv, opt_inv)])
    path = out_dir / "policy_comparison.csv"
    write_csv(path, ["periods_of_supply", "baseline_cost", "optimized_cost",
                     "cost_savings_pct", "mean_inventory_baseline",
                     "mean_inventory_optimized", "inventory_decrease_pct"], rows)
    notes = out_dir / "policy_comparison_notes.json"
    write_json(notes, {"skipped_groups": sorted(skipped)})
    return [path, notes]


def report(cfg: PipelineConfig, run: Path, kind: str) -> list[Path]:
    if kind not in REPORT_KINDS:
        raise ConfigError(f"unknown report kind {kind!r}; choose from {REPORT_KINDS}")
    out_dir = run / "reports"
    out_dir.mkdir(parents=True, exist_ok=True)
    fn = {"forecast_eval": report_forecast_eval,
          "cd_diagram": report_cd_diagram,
          "policy_comparison": report_policy_comparison}[kind]
    return fn(cfg, run, out_dir)
