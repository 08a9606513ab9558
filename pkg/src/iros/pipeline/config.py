"""Pipeline configuration: flat ``key = value`` text with dotted keys.

Grammar: one ``section.key = value`` per line; blank lines and ``#``
comments ignored; values are scalars, comma lists, or empty (meaning
unset). Relative data paths resolve against the config file's directory
so a run can be launched from anywhere.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

from ..demand import AggregationLevel
from ..errors import ConfigError

_POLICIES = ("manual", "auto_reduce")
_DETECTORS = ("auto", "iqr", "quantile", "ar", "seasonal")
_MODES = ("operational", "equilibrium")
_OBJECTIVES = ("cost", "profit")

# stage seeds default to base + a fixed offset so one --seed reseeds
# everything while per-stage overrides stay possible
_SEED_OFFSETS = {"priority": 11, "cluster": 23, "shortlist": 37}


@dataclass(frozen=True)
class PipelineConfig:
    skus_path: Path
    suppliers_path: Path
    orders_path: Path
    demand_path: Path
    signals_path: Path | None = None

    aggregation_level: AggregationLevel = AggregationLevel.WEEKLY
    seasonal_period: int = 13
    include_quotes: bool = False

    horizon: int = 12
    order_frequency: int = 4
    cv_folds: int = 3

    priority_k: int = 2
    service_levels: tuple[float, ...] = (0.95, 0.90)

    exception_policy: str = "manual"
    reduce_fraction: float = 0.85
    detector: str = "auto"

    cluster_k: int = 0  # 0 = pick by elbow rule
    shortlist_sample: int = 4

    plan_mode: str = "operational"
    objective: str = "cost"
    gap: float = 0.01
    time_limit: float | None = 120.0
    min_fill: float = 0.0
    holding_rate: float = 0.02
    shortage_multiplier: float = 4.0

    seed_base: int = 0
    seed_overrides: tuple[tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ConfigError(f"forecast.horizon must be >= 1, got {self.horizon}")
        if not 1 <= self.order_frequency <= self.horizon:
            raise ConfigError(
                f"forecast.order_frequency {self.order_frequency} outside "
                f"[1, horizon={self.horizon}]"
            )
        if self.cv_folds < 1:
            raise ConfigError(f"forecast.cv_folds must be >= 1, got {self.cv_folds}")
        if self.seasonal_period < 1:
            raise ConfigError(f"demand.seasonal_period must be >= 1, got {self.seasonal_period}")
        if self.priority_k < 1:
            raise ConfigError(f"priority.k must be >= 1, got {self.priority_k}")
        if len(self.service_levels) != self.priority_k:
            raise ConfigError(
                f"priority.service_levels needs {self.priority_k} values, "
                f"got {len(self.service_levels)}"
            )
        for s in self.service_levels:
            if not 0.0 < s <= 1.0:
                raise ConfigError(f"service level {s} outside (0, 1]")
        if self.exception_policy not in _POLICIES:
            raise ConfigError(f"exceptions.policy must be one of {_POLICIES}")
        if not 0.0 < self.reduce_fraction <= 1.0:
            raise ConfigError(f"exceptions.reduce_fraction {self.reduce_fraction} outside (0, 1]")
        if self.detector not in _DETECTORS:
            raise ConfigError(f"exceptions.detector must be one of {_DETECTORS}")
        if self.cluster_k < 0:
            raise ConfigError(f"cluster.k must be >= 0, got {self.cluster_k}")
        if self.shortlist_sample < 1:
            raise ConfigError(f"cluster.sample_size must be >= 1, got {self.shortlist_sample}")
        if self.plan_mode not in _MODES:
            raise ConfigError(f"plan.mode must be one of {_MODES}")
        if self.objective not in _OBJECTIVES:
            raise ConfigError(f"plan.objective must be one of {_OBJECTIVES}")
        if self.gap < 0:
            raise ConfigError(f"plan.gap must be >= 0, got {self.gap}")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ConfigError(f"plan.time_limit must be > 0, got {self.time_limit}")
        if not 0.0 <= self.min_fill <= 1.0:
            raise ConfigError(f"plan.min_fill {self.min_fill} outside [0, 1]")
        if self.holding_rate < 0:
            raise ConfigError(f"plan.holding_rate must be >= 0, got {self.holding_rate}")
        if self.shortage_multiplier < 0:
            raise ConfigError("plan.shortage_multiplier must be >= 0")
        for name, _ in self.seed_overrides:
            if name not in _SEED_OFFSETS:
                raise ConfigError(f"unknown seed key seed.{name}")

    def seed(self, stage: str) -> int:
        for name, value in self.seed_overrides:
            if name == stage:
                return value
        return self.seed_base + _SEED_OFFSETS[stage]

    def data_paths(self) -> dict[str, Path]:
        out = {
            "skus.csv": self.skus_path,
            "suppliers.csv": self.suppliers_path,
            "orders.csv": self.orders_path,
            "demand.csv": self.demand_path,
        }
        if self.signals_path is not None:
            out["signals.csv"] = self.signals_path
        return out

    def canonical(self) -> str:
        """Stable rendering used for hashing and for the run-dir copy."""
        lines = []
        for key, value in sorted(_to_items(self)):
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical().encode("utf-8")).hexdigest()


def _to_items(cfg: PipelineConfig) -> list[tuple[str, str]]:
    items = [
        ("data.skus", str(cfg.skus_path)),
        ("data.suppliers", str(cfg.suppliers_path)),
        ("data.orders", str(cfg.orders_path)),
        ("data.demand", str(cfg.demand_path)),
        ("data.signals", "" if cfg.signals_path is None else str(cfg.signals_path)),
        ("demand.aggregation_level", cfg.aggregation_level.value),
        ("demand.seasonal_period", str(cfg.seasonal_period)),
        ("demand.include_quotes", "true" if cfg.include_quotes else "false"),
        ("forecast.horizon", str(cfg.horizon)),
        ("forecast.order_frequency", str(cfg.order_frequency)),
        ("forecast.cv_folds", str(cfg.cv_folds)),
        ("priority.k", str(cfg.priority_k)),
        ("priority.service_levels", ", ".join(repr(s) for s in cfg.service_levels)),
        ("exceptions.policy", cfg.exception_policy),
        ("exceptions.reduce_fraction", repr(cfg.reduce_fraction)),
        ("exceptions.detector", cfg.detector),
        ("cluster.k", str(cfg.cluster_k)),
        ("cluster.sample_size", str(cfg.shortlist_sample)),
        ("plan.mode", cfg.plan_mode),
        ("plan.objective", cfg.objective),
        ("plan.gap", repr(cfg.gap)),
        ("plan.time_limit", "" if cfg.time_limit is None else repr(cfg.time_limit)),
        ("plan.min_fill", repr(cfg.min_fill)),
        ("plan.holding_rate", repr(cfg.holding_rate)),
        ("plan.shortage_multiplier", repr(cfg.shortage_multiplier)),
        ("seed.base", str(cfg.seed_base)),
    ]
    for name, value in cfg.seed_overrides:
        items.append((f"seed.{name}", str(value)))
    return items


def _parse_bool(key: str, text: str) -> bool:
    if text in ("true", "false"):
        return text == "true"
    raise ConfigError(f"{key} must be true or false, got {text!r}")


def _parse_int(key: str, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {text!r}")


def _parse_float(key: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{key} must be a number, got {text!r}")


def parse_config(text: str, base_dir: str | Path = ".") -> PipelineConfig:
    base = Path(base_dir)
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key}")
        raw[key] = value.strip()

    def take(key: str) -> str | None:
        return raw.pop(key, None)

    def path_of(key: str, required: bool) -> Path | None:
        value = take(key)
        if not value:
            if required:
                raise ConfigError(f"missing required key {key}")
            return None
        p = Path(value)
        return p if p.is_absolute() else base / p

    kwargs: dict = {
        "skus_path": path_of("data.skus", True),
        "suppliers_path": path_of("data.suppliers", True),
        "orders_path": path_of("data.orders", True),
        "demand_path": path_of("data.demand", True),
        "signals_path": path_of("data.signals", False),
    }

    scalar_parsers = {
        "demand.seasonal_period": ("seasonal_period", _parse_int),
        "demand.include_quotes": ("include_quotes", _parse_bool),
        "forecast.horizon": ("horizon", _parse_int),
        "forecast.order_frequency": ("order_frequency", _parse_int),
        "forecast.cv_folds": ("cv_folds", _parse_int),
        "priority.k": ("priority_k", _parse_int),
        "exceptions.policy": ("exception_policy", str),
        "exceptions.reduce_fraction": ("reduce_fraction", _parse_float),
        "exceptions.detector": ("detector", str),
        "cluster.k": ("cluster_k", _parse_int),
        "cluster.sample_size": ("shortlist_sample", _parse_int),
        "plan.mode": ("plan_mode", str),
        "plan.objective": ("objective", str),
        "plan.gap": ("gap", _parse_float),
        "plan.min_fill": ("min_fill", _parse_float),
        "plan.holding_rate": ("holding_rate", _parse_float),
        "plan.shortage_multiplier": ("shortage_multiplier", _parse_float),
        "seed.base": ("seed_base", _parse_int),
    }
    for key, (attr, parser) in scalar_parsers.items():
        value = take(key)
        if value is not None and value != "":
            kwargs[attr] = parser(key, value) if parser is not str else value

    level = take("demand.aggregation_level")
    if level:
        try:
            kwargs["aggregation_level"] = AggregationLevel(level)
        except ValueError:
            raise ConfigError(f"unknown aggregation level {level!r}")

    levels = take("priority.service_levels")
    if levels:
        kwargs["service_levels"] = tuple(
            _parse_float("priority.service_levels", part.strip())
            for part in levels.split(",")
        )

    limit = take("plan.time_limit")
    if limit is not None:
        kwargs["time_limit"] = None if limit == "" else _parse_float("plan.time_limit", limit)

    overrides = []
    for key in sorted(k for k in raw if k.startswith("seed.")):
        overrides.append((key[len("seed."):], _parse_int(key, raw.pop(key))))
    if overrides:
        kwargs["seed_overrides"] = tuple(overrides)

    if raw:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(raw))}")
    return PipelineConfig(**kwargs)


def load_config(path: str | Path) -> PipelineConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, base_dir=path.parent)


def default_config_text() -> str:
    """Template written by `iros ingest --init` style bootstrapping and docs."""
    return (
        "# data sources (paths relative to this file)\n"
        "data.skus = data/skus.csv\n"
        "data.suppliers = data/suppliers.csv\n"
        "data.orders = data/orders.csv\n"
        "data.demand = data/demand.csv\n"
        "data.signals =\n"
        "\n"
        "demand.aggregation_level = weekly\n"
        "demand.seasonal_period = 13\n"
        "demand.include_quotes = false\n"
        "\n"
        "forecast.horizon = 12\n"
        "forecast.order_frequency = 4\n"
        "forecast.cv_folds = 3\n"
        "\n"
        "priority.k = 2\n"
        "priority.service_levels = 0.95, 0.90\n"
        "\n"
        "exceptions.policy = manual\n"
        "exceptions.reduce_fraction = 0.85\n"
        "exceptions.detector = auto\n"
        "\n"
        "cluster.k = 0\n"
        "cluster.sample_size = 4\n"
        "\n"
        "plan.mode = operational\n"
        "plan.objective = cost\n"
        "plan.gap = 0.01\n"
        "plan.time_limit = 120\n"
        "plan.min_fill = 0.0\n"
        "plan.holding_rate = 0.02\n"
        "plan.shortage_multiplier = 4.0\n"
        "\n"
        "seed.base = 0\n"
    )
