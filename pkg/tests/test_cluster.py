"""Tests for PCA, clustering algorithms, quality indices and prioritisation."""

import datetime as dt
import math
import os

import numpy as np
import pytest
from scipy.cluster.hierarchy import fcluster, linkage

from iros.cluster import (
    DEFAULT_CRITERIA,
    ClusterAssignment,
    KChoice,
    choose_k,
    dendrogram,
    hierarchical,
    kmeans,
    pca_fit,
    pca_project,
    prioritize,
    quality,
    som,
)
from iros.core.records import (
    Dataset,
    DemandEvent,
    EventKind,
    SkuRecord,
    SupplierRecord,
)
from iros.errors import (
    BadGrid,
    ConfigError,
    DegenerateMatrix,
    KTooLarge,
    SingleCluster,
)


def _canon(labels):
    seen = {}
    out = []
    for lab in labels:
        if lab not in seen:
            seen[lab] = len(seen)
        out.append(seen[lab])
    return out


# --- PCA -------------------------------------------------------------------

def test_pca_collinear_points():
    X = np.array([[t, 2.0 * t] for t in range(6)])
    m = pca_fit(X)
    shares = np.array(m.explained_variance) / sum(m.explained_variance)
    assert shares[0] > 1 - 1e-12
    assert m.retained == 1


def test_pca_isotropic_gaussian():
    rng = np.random.default_rng(17)
    X = rng.normal(size=(400, 2))
    m = pca_fit(X)
    ratio = m.explained_variance[0] / m.explained_variance[1]
    assert 0.8 < ratio < 1.25


def test_pca_project_reconstruct_roundtrip():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(10, 4))
    m = pca_fit(X, retained=4)
    proj = pca_project(m, X)
    rebuilt = proj @ np.asarray(m.components) + np.asarray(m.mean)
    assert np.max(np.abs(rebuilt - X)) < 1e-9


def test_pca_components_orthonormal_variance_sorted():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(30, 5)) * np.array([5, 3, 2, 1, 0.5])
    m = pca_fit(X)
    comps = np.asarray(m.components)
    gram = comps @ comps.T
    assert np.max(np.abs(gram - np.eye(len(comps)))) < 1e-9
    ev = m.explained_variance
    assert all(a >= b - 1e-12 for a, b in zip(ev, ev[1:]))


def test_pca_preserves_distances_with_all_components():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(12, 3))
    m = pca_fit(X, retained=3)
    proj = pca_project(m, X)
    orig = np.linalg.norm(X[:, None] - X[None, :], axis=2)
    new = np.linalg.norm(proj[:, None] - proj[None, :], axis=2)
    assert np.max(np.abs(orig - new)) < 1e-9


def test_pca_degenerate_inputs():
    with pytest.raises(DegenerateMatrix):
        pca_fit(np.zeros((5, 3)))
    with pytest.raises(DegenerateMatrix):
        pca_fit(np.array([[1.0, 2.0]]))
    with pytest.raises(DegenerateMatrix):
        pca_fit(np.array([[1.0, np.nan], [2.0, 3.0]]))


def test_pca_deterministic_sign():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(20, 4))
    assert pca_fit(X) == pca_fit(X)


# --- k-means ------------------------------------------------------------------

def test_kmeans_square_corners():
    X = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    asg = kmeans(X, 2, seed=0)
    assert asg.inertia == pytest.approx(1.0, abs=1e-12)
    lab = asg.labels
    horizontal = lab[0] == lab[1] and lab[2] == lab[3] and lab[0] != lab[2]
    vertical = lab[0] == lab[2] and lab[1] == lab[3] and lab[0] != lab[1]
    assert horizontal or vertical


def test_kmeans_k_equals_n():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(6, 2))
    asg = kmeans(X, 6, seed=1)
    assert asg.inertia == pytest.approx(0.0, abs=1e-12)
    assert sorted(asg.labels) == list(range(6))


def test_kmeans_deterministic_and_k_bound():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(15, 3))
    assert kmeans(X, 3, seed=9) == kmeans(X, 3, seed=9)
    with pytest.raises(KTooLarge):
        kmeans(X, 16)


def test_kmeans_every_cluster_nonempty():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(20, 2))
    for k in (2, 5, 9):
        asg = kmeans(X, k, seed=k)
        assert sorted(set(asg.labels)) == list(range(k))


# --- hierarchical -----------------------------------------------------------------

def test_hierarchical_groups_far_pairs():
    X = np.array([[0.0, 0.0], [0.1, 0.0], [9.0, 9.0], [9.1, 9.0]])
    asg = hierarchical(X, 2)
    assert asg.labels[0] == asg.labels[1]
    assert asg.labels[2] == asg.labels[3]
    assert asg.labels[0] != asg.labels[2]


def test_hierarchical_k1_single_cluster():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(7, 2))
    asg = hierarchical(X, 1)
    assert set(asg.labels) == {0}


def test_dendrogram_heights_nondecreasing():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(14, 3))
    merges = dendrogram(X)
    heights = [m[2] for m in merges]
    assert all(a <= b + 1e-9 for a, b in zip(heights, heights[1:]))
    assert merges[-1][3] == 14


def test_hierarchical_matches_reference_implementation():
    for seed in range(10):
        rng = np.random.default_rng(100 + seed)
        X = rng.normal(size=(rng.integers(8, 16), rng.integers(2, 5)))
        for k in (2, 3):
            mine = _canon(hierarchical(X, k).labels)
            ref = _canon(fcluster(linkage(X, method="ward"), t=k, criterion="maxclust"))
            assert mine == ref, (seed, k)


# --- SOM ------------------------------------------------------------------------

def test_som_splits_two_blobs_like_kmeans():
    rng = np.random.default_rng(6)
    X = np.vstack([rng.normal(0, 0.3, (10, 2)), rng.normal(5, 0.3, (10, 2))])
    s = som(X, (1, 2), seed=3, epochs=10)
    km = kmeans(X, 2, seed=3)
    assert _canon(s.labels) == _canon(km.labels)


def test_som_identical_rows_single_unit():
    X = np.ones((8, 3))
    s = som(X, (2, 2), seed=0, epochs=5)
    assert s.k == 1
    assert set(s.labels) == {0}


def test_som_deterministic():
    rng = np.random.default_rng(7)
    X = rng.normal(size=(12, 2))
    assert som(X, (2, 2), seed=11) == som(X, (2, 2), seed=11)


def test_som_bad_grid():
    with pytest.raises(BadGrid):
        som(np.ones((4, 2)), (1, 1))


# --- quality ---------------------------------------------------------------------

def test_quality_two_singletons_silhouette_zero():
    X = np.array([[0.0, 0.0], [3.0, 4.0]])
    q = quality(X, [0, 1])
    assert q.silhouette == 0.0


def test_quality_square_oracle():
    X = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    q = quality(X, [0, 0, 1, 1])
    assert q.silhouette == pytest.approx(3 - 2 * math.sqrt(2), abs=1e-9)
    assert q.davies_bouldin == pytest.approx(1.0, abs=1e-9)
    assert q.calinski_harabasz == pytest.approx(2.0, abs=1e-9)


def test_quality_invariances():
    rng = np.random.default_rng(8)
    X = rng.normal(size=(18, 3))
    labels = kmeans(X, 3, seed=1).labels
    base = quality(X, labels)
    permuted = quality(X, [(l + 1) % 3 for l in labels])
    shifted = quality(X + np.array([5.0, -2.0, 42.0]), labels)
    for q in (permuted, shifted):
        assert q.silhouette == pytest.approx(base.silhouette, abs=1e-9)
        assert q.davies_bouldin == pytest.approx(base.davies_bouldin, abs=1e-9)
        assert q.calinski_harabasz == pytest.approx(base.calinski_harabasz, abs=1e-9)


def test_quality_single_cluster_error():
    with pytest.raises(SingleCluster):
        quality(np.ones((4, 2)), [0, 0, 0, 0])


# --- choose_k ------------------------------------------------------------------------

def test_choose_k_three_blobs():
    rng = np.random.default_rng(9)
    X = np.vstack(
        [
            rng.normal((0, 0), 0.4, (8, 2)),
            rng.normal((6, 0), 0.4, (8, 2)),
            rng.normal((0, 9), 0.4, (8, 2)),
        ]
    )
    assert choose_k(X, KChoice.SILHOUETTE_MAX, range(2, 6)) == 3
    assert choose_k(X, KChoice.INERTIA_ELBOW, range(2, 6)) == 3


def test_choose_k_single_candidate():
    rng = np.random.default_rng(10)
    X = rng.normal(size=(10, 2))
    assert choose_k(X, "silhouette_max", [4]) == 4


def test_choose_k_tie_prefers_smaller():
    # identical rows tie every candidate; smallest k must win
    X = np.zeros((8, 2))
    X += 1.0
    assert choose_k(X, KChoice.SILHOUETTE_MAX, range(2, 6)) == 2
    assert choose_k(X, KChoice.INERTIA_ELBOW, range(2, 6)) == 2


def test_choose_k_range_validation():
    rng = np.random.default_rng(11)
    X = rng.normal(size=(6, 2))
    with pytest.raises(KTooLarge):
        choose_k(X, KChoice.SILHOUETTE_MAX, [2, 6])
    with pytest.raises(KTooLarge):
        choose_k(X, KChoice.SILHOUETTE_MAX, [])


# --- prioritisation ------------------------------------------------------------------------

def _dataset(volumes, price=500, cost=200):
    skus, events = [], []
    for i, vol in enumerate(volumes):
        sid = f"S{i:03d}"
        skus.append(
            SkuRecord(
                sku_id=sid, description=f"part {i}", unit_cost=cost,
                unit_price=price, unit_mass=1.0, unit_volume=0.01,
                moq=1, supplier_id="SUP0", inventory_level=10, backorders=0,
            )
        )
        day = dt.date(2024, 1, 1)
        events.append(
            DemandEvent(date=day, sku_id=sid, quantity=int(vol), kind=EventKind.SALE)
        )
    sup = SupplierRecord(
        supplier_id="SUP0", name="main", lead_time=2,
        container_volume_cap=30.0, container_mass_cap=20000.0, container_cost=50000,
    )
    return Dataset.build(skus, [sup], [], events)


def test_prioritize_dominant_population_is_a():
    ds = _dataset([1000, 1200, 1100, 90, 110, 100])
    pm = prioritize(ds, k=2, service_levels=(0.95, 0.90), seed=0)
    big = {f"S{i:03d}" for i in range(3)}
    for sku_id in big:
        assert pm.assignments[sku_id] == "A"
    for sku_id in set(pm.assignments) - big:
        assert pm.assignments[sku_id] == "B"
    assert pm.service_levels == {"A": 0.95, "B": 0.90}


def test_prioritize_cluster_means_dominance():
    ds = _dataset([2000, 1900, 2100, 50, 60, 40])
    pm = prioritize(ds, k=2, seed=0)
    a = pm.cluster_means["A"]
    b = pm.cluster_means["B"]
    assert all(x >= y for x, y in zip(a, b))
    assert pm.criteria_names == ("sales_volume", "sales_value", "profit_value")


def test_prioritize_single_criterion_isolates_top_sku():
    ds = _dataset([100, 10, 8])
    pm = prioritize(
        ds, k=2, service_levels=(0.95, 0.90),
        criteria=DEFAULT_CRITERIA[:1], seed=0,
    )
    # enumerate the three 2-partitions: isolating the top SKU is optimal
    assert pm.assignments["S000"] == "A"
    assert pm.assignments["S001"] == pm.assignments["S002"] == "B"


def test_prioritize_validates_service_levels():
    ds = _dataset([10, 20, 30])
    with pytest.raises(ConfigError):
        prioritize(ds, k=2, service_levels=(0.95,))
    with pytest.raises(ConfigError):
        prioritize(ds, k=2, service_levels=(0.95, 1.5))


@pytest.mark.skipif(
    not os.path.exists(os.path.join(os.environ.get("IROS_DATA_DIR", ""), "reid.csv")),
    reason="external benchmark matrix not supplied",
)
def test_kmeans_external_benchmark_sizes():
    import csv

    path = os.path.join(os.environ["IROS_DATA_DIR"], "reid.csv")
    with open(path, newline="") as fh:
        rows = [[float(v) for v in row] for row in csv.reader(fh)]
    X = np.asarray(rows)
    asg = kmeans(X, 3, seed=0)
    sizes = sorted(
        [sum(1 for l in asg.labels if l == c) for c in range(3)]
    )
    assert sizes == [9, 16, 22]
