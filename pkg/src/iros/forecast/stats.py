"""Rank-based comparison of forecast models across many series.

friedman_test works on a score matrix with one row per model and one
column per series; lower scores are better. Ranks use midranks for ties.
nemenyi_cd returns the critical difference in mean rank below which two
models are not distinguishable at the chosen level; the studentized
range quantiles (infinite degrees of freedom, divided by sqrt(2)) are
embedded for alpha 0.05 and 0.01 up to twenty models. emit_cd_diagram
renders the usual critical-difference picture as a deterministic SVG:
a rank axis, one labelled tick per model, a CD ruler, and horizontal
bars joining groups of models whose mean ranks all lie within one CD.
"""

from __future__ import annotations

import math
import os
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import chi2, rankdata

from ..errors import ConfigError, IoFailure, TooFew

__all__ = ["friedman_test", "nemenyi_cd", "emit_cd_diagram"]

# Demsar (2006), Table 5(a): q_alpha for the Nemenyi test, k = 2..20.
_Q_ALPHA = {
    0.05: (
        1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164,
        3.219, 3.268, 3.313, 3.354, 3.391, 3.426, 3.458, 3.489, 3.517,
        3.544,
    ),
    0.01: (
        2.576, 2.913, 3.113, 3.255, 3.364, 3.452, 3.526, 3.590, 3.646,
        3.696, 3.741, 3.781, 3.818, 3.853, 3.885, 3.914, 3.942, 3.968,
        3.992,
    ),
}


def mean_ranks(scores) -> np.ndarray:
    """Mean rank per model (row); rank 1 is the best score in a column."""
    matrix = np.asarray(scores, dtype=float)
    if matrix.ndim != 2:
        raise ConfigError("scores must be a 2-D models x series matrix")
    ranks = np.empty_like(matrix)
    for j in range(matrix.shape[1]):
        ranks[:, j] = rankdata(matrix[:, j])
    return ranks.mean(axis=1)


def friedman_test(scores) -> tuple[float, float]:
    matrix = np.asarray(scores, dtype=float)
    if matrix.ndim != 2:
        raise ConfigError("scores must be a 2-D models x series matrix")
    k, n = matrix.shape
    if k < 2:
        raise TooFew(f"need >= 2 models, got {k}")
    if n < 2:
        raise TooFew(f"need >= 2 series, got {n}")
    rbar = mean_ranks(matrix)
    stat = 12.0 * n / (k * (k + 1)) * float(np.sum(rbar ** 2)) - 3.0 * n * (k + 1)
    stat = max(stat, 0.0)
    p_value = float(chi2.sf(stat, k - 1))
    return float(stat), p_value


def nemenyi_cd(k_models: int, n_series: int, alpha: float = 0.05) -> float:
    if alpha not in _Q_ALPHA:
        raise ConfigError(f"alpha must be 0.05 or 0.01, got {alpha}")
    if k_models < 2:
        raise TooFew(f"need >= 2 models, got {k_models}")
    if n_series < 2:
        raise TooFew(f"need >= 2 series, got {n_series}")
    table = _Q_ALPHA[alpha]
    if k_models - 2 >= len(table):
        raise ConfigError(f"no quantile for k={k_models}; table covers k <= 20")
    q = table[k_models - 2]
    return q * math.sqrt(k_models * (k_models + 1) / (6.0 * n_series))


def _cliques(ordered: list[tuple[str, float]], cd: float) -> list[tuple[int, int]]:
    """Maximal index ranges whose rank span fits inside one CD."""
    spans = []
    n = len(ordered)
    for i in range(n):
        j = i
        while j + 1 < n and ordered[j + 1][1] - ordered[i][1] <= cd + 1e-12:
            j += 1
        if j > i:
            spans.append((i, j))
    maximal = []
    for span in spans:
        if not any(o[0] <= span[0] and span[1] <= o[1] and o != span for o in spans):
            maximal.append(span)
    # drop duplicates while keeping order
    seen = set()
    out = []
    for span in maximal:
        if span not in seen:
            seen.add(span)
            out.append(span)
    return out


def emit_cd_diagram(
    ranks: Mapping[str, float] | Sequence[tuple[str, float]],
    cd: float,
    out,
) -> str:
    """Write an SVG critical-difference diagram; returns the path written."""
    items = list(ranks.items()) if isinstance(ranks, Mapping) else list(ranks)
    if not items:
        raise TooFew("no models to draw")
    for name, rank in items:
        if not math.isfinite(rank):
            raise ConfigError(f"rank for {name!r} is not finite")
    if not math.isfinite(cd) or cd < 0:
        raise ConfigError(f"cd must be finite and >= 0, got {cd}")
    ordered = sorted(items, key=lambda kv: (kv[1], kv[0]))

    lo = math.floor(min(r for _, r in ordered))
    hi = math.ceil(max(r for _, r in ordered))
    if hi <= lo:
        hi = lo + 1
    width, x0, x1 = 720.0, 80.0, 640.0
    axis_y = 70.0

    def x_of(rank: float) -> float:
        return x0 + (rank - lo) / (hi - lo) * (x1 - x0)

    half = (len(ordered) + 1) // 2
    label_rows = max(half, len(ordered) - half)
    cliques = _cliques(ordered, cd)
    bar_y0 = axis_y + 12.0
    label_y0 = bar_y0 + 14.0 * max(len(cliques), 1) + 10.0
    height = label_y0 + 18.0 * label_rows + 20.0

    def fmt(v: float) -> str:
        return f"{v:.2f}"

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{fmt(width)}" '
        f'height="{fmt(height)}" font-family="sans-serif" font-size="12">',
        f'<line x1="{fmt(x0)}" y1="{fmt(axis_y)}" x2="{fmt(x1)}" '
        f'y2="{fmt(axis_y)}" stroke="black" stroke-width="1.5"/>',
    ]
    for tick in range(lo, hi + 1):
        tx = x_of(tick)
        lines.append(
            f'<line x1="{fmt(tx)}" y1="{fmt(axis_y - 5)}" x2="{fmt(tx)}" '
            f'y2="{fmt(axis_y)}" stroke="black"/>'
        )
        lines.append(
            f'<text x="{fmt(tx)}" y="{fmt(axis_y - 10)}" '
            f'text-anchor="middle">{tick}</text>'
        )
    # CD ruler above the axis
    cd_px = cd / (hi - lo) * (x1 - x0)
    lines.append(
        f'<line x1="{fmt(x0)}" y1="30.00" x2="{fmt(x0 + cd_px)}" y2="30.00" '
        f'stroke="black" stroke-width="2"/>'
    )
    lines.append(
        f'<text x="{fmt(x0 + cd_px / 2)}" y="24.00" text-anchor="middle">'
        f'CD = {fmt(cd)}</text>'
    )
    for level, (i, j) in enumerate(cliques):
        y = bar_y0 + 14.0 * level
        lines.append(
            f'<line x1="{fmt(x_of(ordered[i][1]) - 3)}" y1="{fmt(y)}" '
            f'x2="{fmt(x_of(ordered[j][1]) + 3)}" y2="{fmt(y)}" '
            f'stroke="black" stroke-width="4"/>'
        )
    for pos, (name, rank) in enumerate(ordered):
        tx = x_of(rank)
        left = pos < half
        row = pos if left else pos - half
        ly = label_y0 + 18.0 * row
        lx = x0 - 10.0 if left else x1 + 10.0
        anchor = "end" if left else "start"
        lines.append(
            f'<line x1="{fmt(tx)}" y1="{fmt(axis_y)}" x2="{fmt(tx)}" '
            f'y2="{fmt(ly - 4)}" stroke="gray" stroke-width="0.7"/>'
        )
        lines.append(
            f'<line x1="{fmt(tx)}" y1="{fmt(ly - 4)}" x2="{fmt(lx)}" '
            f'y2="{fmt(ly - 4)}" stroke="gray" stroke-width="0.7"/>'
        )
        lines.append(
            f'<text x="{fmt(lx)}" y="{fmt(ly)}" text-anchor="{anchor}">'
            f'{name} ({fmt(rank)})</text>'
        )
    lines.append("</svg>")
    payload = "\n".join(lines) + "\n"
    path = os.fspath(out)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(payload)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    return path
