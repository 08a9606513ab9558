"""Clustering toolkit for SKU prioritisation and series grouping.

All algorithms are deterministic given a seed. Distances are Euclidean
throughout; Ward linkage is updated with the Lance-Williams recurrence
on squared distances.

Structure:
    pca_fit / pca_project   dimensionality reduction
    kmeans                  Lloyd with k-means++ seeding and restarts
    hierarchical            agglomerative Ward, cut at k
    som                     rectangular self-organising map
    quality                 silhouette, Davies-Bouldin, Calinski-Harabasz
    choose_k                inertia elbow or silhouette maximum
    prioritize              criteria -> clusters -> service levels
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .core.records import Dataset, EventKind
from .errors import (
    BadGrid,
    ConfigError,
    DegenerateMatrix,
    KTooLarge,
    SingleCluster,
)
from .features import scale_matrix

__all__ = [
    "PcaModel",
    "ClusterAssignment",
    "ClusterQuality",
    "PriorityMap",
    "KChoice",
    "pca_fit",
    "pca_project",
    "kmeans",
    "hierarchical",
    "dendrogram",
    "som",
    "quality",
    "choose_k",
    "prioritize",
    "DEFAULT_CRITERIA",
]


@dataclass(frozen=True)
class PcaModel:
    mean: tuple[float, ...]
    components: tuple[tuple[float, ...], ...]
    explained_variance: tuple[float, ...]
    retained: int


@dataclass(frozen=True)
class ClusterAssignment:
    labels: tuple[int, ...]
    k: int
    centroids: tuple[tuple[float, ...], ...] | None
    inertia: float | None


@dataclass(frozen=True)
class ClusterQuality:
    silhouette: float
    davies_bouldin: float
    calinski_harabasz: float


@dataclass(frozen=True)
class PriorityMap:
    """Cluster labels A, B, ... in decreasing priority order."""

    assignments: dict[str, str]
    service_levels: dict[str, float]
    cluster_means: dict[str, tuple[float, ...]]
    criteria_names: tuple[str, ...]

    def service_level_for(self, sku_id: str) -> float:
        return self.service_levels[self.assignments[sku_id]]


class KChoice(str, Enum):
    INERTIA_ELBOW = "inertia_elbow"
    SILHOUETTE_MAX = "silhouette_max"


# --- PCA -----------------------------------------------------------------

def pca_fit(X, target_share: float = 0.90, retained: int | None = None) -> PcaModel:
    """PCA by SVD of the centred matrix.

    Components keep a fixed sign convention (largest-magnitude entry
    positive) so repeated fits are byte-identical. retained defaults to
    the smallest count whose cumulative variance share reaches
    target_share.
    """
    mat = np.asarray(X, dtype=float)
    if mat.ndim != 2 or mat.shape[0] < 2:
        raise DegenerateMatrix("need a 2-D matrix with at least 2 rows")
    if not np.isfinite(mat).all():
        raise DegenerateMatrix("matrix contains non-finite values")
    mean = mat.mean(axis=0)
    centred = mat - mean
    _, svals, vt = np.linalg.svd(centred, full_matrices=False)
    var = svals ** 2 / (mat.shape[0] - 1)
    total = float(var.sum())
    if total == 0.0:
        raise DegenerateMatrix("matrix has zero variance")
    for i in range(vt.shape[0]):
        pivot = np.argmax(np.abs(vt[i]))
        if vt[i, pivot] < 0:
            vt[i] = -vt[i]
    if retained is None:
        share = np.cumsum(var) / total
        retained = int(np.searchsorted(share, target_share - 1e-12) + 1)
        retained = min(retained, var.size)
    elif not (1 <= retained <= var.size):
        raise ConfigError(f"retained must be in [1, {var.size}]")
    return PcaModel(
        mean=tuple(mean.tolist()),
        components=tuple(tuple(row) for row in vt.tolist()),
        explained_variance=tuple(var.tolist()),
        retained=retained,
    )


def pca_project(model: PcaModel, X, retained: int | None = None) -> np.ndarray:
    mat = np.asarray(X, dtype=float)
    r = model.retained if retained is None else retained
    comps = np.asarray(model.components)[:r]
    return (mat - np.asarray(model.mean)) @ comps.T


# --- k-means ----------------------------------------------------------------

def _kmeanspp_centers(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    d2 = ((X - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total > 0:
            probs = d2 / total
            idx = rng.choice(n, p=probs)
        else:
            idx = rng.integers(n)
        centers[j] = X[idx]
        d2 = np.minimum(d2, ((X - centers[j]) ** 2).sum(axis=1))
    return centers


def _assign_with_repair(X: np.ndarray, centers: np.ndarray):
    """Nearest-centre assignment; empty clusters reseed to the farthest point."""
    k = centers.shape[0]
    d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    labels = d2.argmin(axis=1)
    for j in range(k):
        if not (labels == j).any():
            # never steal a cluster's only member
            contrib = d2[np.arange(X.shape[0]), labels].copy()
            sizes = np.bincount(labels, minlength=k)
            contrib[sizes[labels] <= 1] = -1.0
            far = int(contrib.argmax())
            centers[j] = X[far]
            labels[far] = j
            d2[:, j] = ((X - centers[j]) ** 2).sum(axis=1)
    inertia = float(d2[np.arange(X.shape[0]), labels].sum())
    return labels, inertia


def _lloyd(X: np.ndarray, centers: np.ndarray, max_iter: int = 300):
    k = centers.shape[0]
    prev_inertia = math.inf
    labels, inertia = _assign_with_repair(X, centers)
    for _ in range(max_iter):
        assert inertia <= prev_inertia + 1e-9
        prev_inertia = inertia
        new_centers = np.array([X[labels == j].mean(axis=0) for j in range(k)])
        if np.allclose(new_centers, centers):
            break
        centers = new_centers
        labels, inertia = _assign_with_repair(X, centers)
    return labels, centers, inertia


def kmeans(X, k: int, seed: int = 0, restarts: int = 20) -> ClusterAssignment:
    """Best of several k-means++ starts; deterministic for a given seed."""
    mat = np.asarray(X, dtype=float)
    if k > mat.shape[0]:
        raise KTooLarge(f"k={k} exceeds {mat.shape[0]} rows")
    if k < 1:
        raise KTooLarge("k must be >= 1")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        centers = _kmeanspp_centers(mat, k, rng)
        labels, centers, inertia = _lloyd(mat, centers.copy())
        if best is None or inertia < best[2]:
            best = (labels, centers, inertia)
    labels, centers, inertia = best
    return ClusterAssignment(
        labels=tuple(int(v) for v in labels),
        k=k,
        centroids=tuple(tuple(c) for c in centers.tolist()),
        inertia=inertia,
    )


# --- hierarchical (Ward) -------------------------------------------------------

def dendrogram(X) -> list[tuple[int, int, float, int]]:
    """Full Ward merge tree: (cluster_a, cluster_b, height, new_size).

    Original rows are clusters 0..n-1; merge i creates cluster n+i.
    Heights are Lance-Williams updated squared distances and are
    nondecreasing.
    """
    mat = np.asarray(X, dtype=float)
    n = mat.shape[0]
    if n < 1:
        raise DegenerateMatrix("empty matrix")
    size = {i: 1 for i in range(n)}
    active = list(range(n))
    dist: dict[tuple[int, int], float] = {}
    # heights carry the squared-distance scale of the recurrence
    for i in range(n):
        for j in range(i + 1, n):
            dist[(i, j)] = float(((mat[i] - mat[j]) ** 2).sum())
    merges = []
    next_id = n
    while len(active) > 1:
        best_pair, best_d = None, math.inf
        for a_pos in range(len(active)):
            for b_pos in range(a_pos + 1, len(active)):
                a, b = active[a_pos], active[b_pos]
                key = (a, b) if a < b else (b, a)
                d = dist[key]
                if d < best_d - 1e-15:
                    best_pair, best_d = key, d
        a, b = best_pair
        new = next_id
        next_id += 1
        na, nb = size[a], size[b]
        merges.append((a, b, best_d, na + nb))
        for c in active:
            if c in (a, b):
                continue
            nc = size[c]
            key_ac = (a, c) if a < c else (c, a)
            key_bc = (b, c) if b < c else (c, b)
            dac, dbc = dist[key_ac], dist[key_bc]
            denom = na + nb + nc
            d_new = (
                (na + nc) / denom * dac
                + (nb + nc) / denom * dbc
                - nc / denom * best_d
            )
            dist[(c, new) if c < new else (new, c)] = d_new
        size[new] = na + nb
        active = [c for c in active if c not in (a, b)] + [new]
    return merges


def hierarchical(X, k: int, linkage: str = "ward") -> ClusterAssignment:
    if linkage != "ward":
        raise ConfigError(f"unsupported linkage {linkage!r}")
    mat = np.asarray(X, dtype=float)
    n = mat.shape[0]
    if k > n:
        raise KTooLarge(f"k={k} exceeds {n} rows")
    if k < 1:
        raise KTooLarge("k must be >= 1")
    merges = dendrogram(mat)
    parent = {}
    for step, (a, b, _, _) in enumerate(merges[: n - k]):
        parent[a] = n + step
        parent[b] = n + step
    def root(c: int) -> int:
        while c in parent:
            c = parent[c]
        return c
    roots = sorted({root(i) for i in range(n)})
    remap = {r: idx for idx, r in enumerate(roots)}
    labels = tuple(remap[root(i)] for i in range(n))
    return ClusterAssignment(labels=labels, k=k, centroids=None, inertia=None)


# --- self-organising map ----------------------------------------------------------

def som(X, grid: tuple[int, int], seed: int = 0, epochs: int = 20) -> ClusterAssignment:
    """Rectangular SOM with Gaussian neighbourhood and linear decay."""
    mat = np.asarray(X, dtype=float)
    rows, cols = grid
    cells = rows * cols
    if rows < 1 or cols < 1 or cells < 2:
        raise BadGrid(f"grid {grid} needs at least 2 cells")
    n = mat.shape[0]
    rng = np.random.default_rng(seed)
    weights = mat[rng.integers(n, size=cells)].astype(float).copy()
    coords = np.array([(r, c) for r in range(rows) for c in range(cols)], dtype=float)
    lr0, lr1 = 0.5, 0.01
    sigma0, sigma1 = max(rows, cols) / 2.0, 0.5
    total_steps = epochs * n
    step = 0
    for _ in range(epochs):
        order = rng.permutation(n)
        for idx in order:
            frac = step / max(total_steps - 1, 1)
            lr = lr0 + (lr1 - lr0) * frac
            sigma = sigma0 + (sigma1 - sigma0) * frac
            x = mat[idx]
            bmu = int(((weights - x) ** 2).sum(axis=1).argmin())
            g2 = ((coords - coords[bmu]) ** 2).sum(axis=1)
            influence = lr * np.exp(-g2 / (2.0 * sigma * sigma))
            weights += influence[:, None] * (x - weights)
            step += 1
    bmus = ((mat[:, None, :] - weights[None, :, :]) ** 2).sum(axis=2).argmin(axis=1)
    used = sorted(set(int(b) for b in bmus))
    remap = {u: i for i, u in enumerate(used)}
    labels = tuple(remap[int(b)] for b in bmus)
    centroids = tuple(tuple(weights[u].tolist()) for u in used)
    return ClusterAssignment(labels=labels, k=len(used), centroids=centroids, inertia=None)


# --- quality indices ---------------------------------------------------------------

def quality(X, labels: Sequence[int]) -> ClusterQuality:
    """Silhouette (singletons score 0), Davies-Bouldin, Calinski-Harabasz."""
    mat = np.asarray(X, dtype=float)
    lab = np.asarray(labels, dtype=int)
    ks = sorted(set(lab.tolist()))
    k = len(ks)
    n = mat.shape[0]
    if k < 2:
        raise SingleCluster("quality indices need at least 2 clusters")
    remap = {c: i for i, c in enumerate(ks)}
    lab = np.array([remap[int(v)] for v in lab])

    dists = np.sqrt(((mat[:, None, :] - mat[None, :, :]) ** 2).sum(axis=2))
    sil_values = np.zeros(n)
    for i in range(n):
        own = lab == lab[i]
        if own.sum() == 1:
            sil_values[i] = 0.0
            continue
        a = dists[i, own].sum() / (own.sum() - 1)
        b = min(
            dists[i, lab == c].mean() for c in range(k) if c != lab[i]
        )
        denom = max(a, b)
        sil_values[i] = 0.0 if denom == 0 else (b - a) / denom
    silhouette = float(sil_values.mean())

    centroids = np.array([mat[lab == c].mean(axis=0) for c in range(k)])
    scatter = np.array(
        [np.sqrt(((mat[lab == c] - centroids[c]) ** 2).sum(axis=1)).mean() for c in range(k)]
    )
    db_terms = []
    for i in range(k):
        worst = 0.0
        for j in range(k):
            if i == j:
                continue
            m = float(np.sqrt(((centroids[i] - centroids[j]) ** 2).sum()))
            ratio = math.inf if m == 0 else (scatter[i] + scatter[j]) / m
            worst = max(worst, ratio)
        db_terms.append(worst)
    davies_bouldin = float(np.mean(db_terms))

    overall = mat.mean(axis=0)
    between = sum(
        (lab == c).sum() * float(((centroids[c] - overall) ** 2).sum()) for c in range(k)
    )
    within = sum(
        float(((mat[lab == c] - centroids[c]) ** 2).sum()) for c in range(k)
    )
    if within == 0.0:
        calinski = math.inf
    else:
        calinski = (between / (k - 1)) / (within / (n - k))
    return ClusterQuality(
        silhouette=silhouette,
        davies_bouldin=davies_bouldin,
        calinski_harabasz=float(calinski),
    )


# --- k selection ---------------------------------------------------------------------

def choose_k(X, method: KChoice | str, k_range: Sequence[int], seed: int = 0) -> int:
    """Pick k from candidates; ties resolve to the smaller k.

    The inertia elbow needs at least three candidates; with fewer the
    smallest candidate wins by the tie rule.
    """
    method = KChoice(method)
    mat = np.asarray(X, dtype=float)
    candidates = sorted(set(int(k) for k in k_range))
    if not candidates:
        raise KTooLarge("empty k range")
    if candidates[0] < 2 or candidates[-1] > mat.shape[0] - 1:
        raise KTooLarge(f"k range must lie in [2, {mat.shape[0] - 1}]")
    if len(candidates) == 1:
        return candidates[0]

    if method is KChoice.SILHOUETTE_MAX:
        best_k, best_s = None, -math.inf
        for k in candidates:
            asg = kmeans(mat, k, seed=seed)
            s = quality(mat, asg.labels).silhouette
            if s > best_s + 1e-12:
                best_k, best_s = k, s
        return best_k

    inertias = {k: kmeans(mat, k, seed=seed).inertia for k in candidates}
    if len(candidates) < 3:
        return candidates[0]
    # flat or concave curves fall back to the smallest candidate
    best_k, best_curve = candidates[0], 0.0
    for prev_k, k, next_k in zip(candidates, candidates[1:], candidates[2:]):
        curve = inertias[prev_k] - 2.0 * inertias[k] + inertias[next_k]
        if curve > best_curve + 1e-12:
            best_k, best_curve = k, curve
    return best_k


# --- SKU prioritisation -----------------------------------------------------------------

def _sales_volume(ds: Dataset, sku_id: str) -> float:
    total = 0.0
    for ev in ds.demand_events:
        if ev.sku_id == sku_id and ev.kind is not EventKind.QUOTE:
            total += ev.quantity
    return max(total, 0.0)


def _sales_value(ds: Dataset, sku_id: str) -> float:
    return _sales_volume(ds, sku_id) * ds.skus[sku_id].unit_price


def _profit_value(ds: Dataset, sku_id: str) -> float:
    sku = ds.skus[sku_id]
    return _sales_volume(ds, sku_id) * (sku.unit_price - sku.unit_cost)


DEFAULT_CRITERIA: tuple[tuple[str, Callable[[Dataset, str], float]], ...] = (
    ("sales_volume", _sales_volume),
    ("sales_value", _sales_value),
    ("profit_value", _profit_value),
)


def prioritize(
    ds: Dataset,
    k: int = 2,
    service_levels: Sequence[float] = (0.95, 0.90),
    criteria: Sequence[tuple[str, Callable[[Dataset, str], float]]] = DEFAULT_CRITERIA,
    seed: int = 0,
) -> PriorityMap:
    """Cluster SKUs on scaled criteria; label clusters A, B, ... by
    descending mean scaled criteria sum and attach service levels."""
    if len(service_levels) != k:
        raise ConfigError(f"need {k} service levels, got {len(service_levels)}")
    for s in service_levels:
        if not (0.0 < s <= 1.0):
            raise ConfigError(f"service level {s} outside (0, 1]")
    sku_ids = list(ds.skus)
    if k > len(sku_ids):
        raise KTooLarge(f"k={k} exceeds {len(sku_ids)} SKUs")
    raw = np.array(
        [[fn(ds, sku_id) for _, fn in criteria] for sku_id in sku_ids], dtype=float
    )
    scaled = scale_matrix(raw)
    try:
        model = pca_fit(scaled)
        projected = pca_project(model, scaled)
    except DegenerateMatrix:
        projected = scaled
    asg = kmeans(projected, k, seed=seed)
    labels = np.asarray(asg.labels)
    order = sorted(
        range(k),
        key=lambda c: (-float(scaled[labels == c].sum(axis=1).mean()), c),
    )
    letter = {c: string.ascii_uppercase[i] for i, c in enumerate(order)}
    assignments = {sku_id: letter[int(lab)] for sku_id, lab in zip(sku_ids, labels)}
    service = {string.ascii_uppercase[i]: float(service_levels[i]) for i in range(k)}
    means = {
        letter[c]: tuple(float(v) for v in raw[labels == c].mean(axis=0))
        for c in range(k)
    }
    return PriorityMap(
        assignments=assignments,
        service_levels=service,
        cluster_means=means,
        criteria_names=tuple(name for name, _ in criteria),
    )
