"""Error types shared across the iros modules.

Every failure surfaced to callers derives from IrosError so the CLI and the
review service can map them to exit codes / HTTP codes uniformly.
"""

from __future__ import annotations


class IrosError(Exception):
    """Base class for all iros failures."""


# --- data layer ---------------------------------------------------------

class MissingColumn(IrosError):
    def __init__(self, name: str, path: str = ""):
        self.name = name
        self.path = path
        super().__init__(f"missing column {name!r}" + (f" in {path}" if path else ""))


class BadValue(IrosError):
    def __init__(self, row: int | None, column: str, reason: str):
        self.row = row
        self.column = column
        self.reason = reason
        where = f"row {row}, " if row is not None else ""
        super().__init__(f"bad value ({where}column {column!r}): {reason}")


class DanglingKey(IrosError):
    def __init__(self, kind: str, key: str):
        self.kind = kind
        self.key = key
        super().__init__(f"dangling {kind} key: {key!r}")


class DuplicateKey(IrosError):
    def __init__(self, kind: str, key: str):
        self.kind = kind
        self.key = key
        super().__init__(f"duplicate {kind} key: {key!r}")


class IoFailure(IrosError):
    pass


# --- demand preparation --------------------------------------------------

class UnknownSku(IrosError):
    pass


class EmptyHistory(IrosError):
    pass


class IncompatibleLevels(IrosError):
    pass


class IndexOutOfRange(IrosError):
    pass


# --- series analysis ------------------------------------------------------

class TooShort(IrosError):
    pass


class DegenerateSeries(IrosError):
    pass


class DegenerateLabels(IrosError):
    pass


class NoOverlap(IrosError):
    pass


class TooFewRows(IrosError):
    pass


# --- clustering ------------------------------------------------------------

class DegenerateMatrix(IrosError):
    pass


class KTooLarge(IrosError):
    pass


class BadGrid(IrosError):
    pass


class SingleCluster(IrosError):
    pass


# --- forecasting -------------------------------------------------------------

class HistoryTooShort(IrosError):
    pass


class AllZeroHistory(IrosError):
    pass


class ZeroScale(IrosError):
    pass


class ZeroReference(IrosError):
    pass


class WindowOutOfRange(IrosError):
    pass


class TooFew(IrosError):
    pass


# --- replenishment ------------------------------------------------------------

class Infeasible(IrosError):
    pass


class TimeLimitNoIncumbent(IrosError):
    pass


class MissingForecast(IrosError):
    pass


class MissingServiceLevel(IrosError):
    pass


# --- orchestration --------------------------------------------------------------

class ConfigError(IrosError):
    pass


class NoPriorRun(IrosError):
    pass


class MissingStage(IrosError):
    pass


class StageFailed(IrosError):
    """A pipeline stage raised; carries the stage name for diagnostics."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        super().__init__(f"stage {stage!r} failed: {cause}")
