import itertools

import numpy as np
import pytest
import scipy.sparse as sp

from conformal_al.select import (
    Pool,
    SelectionConfig,
    build_pool,
    kmeans,
    pick_representatives,
    rank_unlabeled,
    refill,
)


def test_rank_by_uncertainty_descending():
    assert rank_unlabeled([("a", 0.9), ("b", 0.1)]) == [("a", 0.9), ("b", 0.1)]
    assert rank_unlabeled([("b", 0.5), ("a", 0.5)]) == [("a", 0.5), ("b", 0.5)]
    assert rank_unlabeled([]) == []


def test_build_pool_split_70_30():
    ordering = [(f"d{i:03d}", 1.0 - i / 1000) for i in range(1000)]
    cfg = SelectionConfig(k_top=500, k_cluster=6, high_fraction=0.7)
    pool = build_pool(ordering, cfg)
    assert len(pool.high) == 350
    assert len(pool.low) == 150
    assert pool.high[0] == ordering[0]
    assert pool.low[0] == ordering[-1]  # lowest uncertainty first
    assert pool.low[-1] == ordering[-150]


def test_build_pool_pure_high():
    ordering = [(f"d{i}", 1.0 - i / 100) for i in range(100)]
    pool = build_pool(ordering, SelectionConfig(k_top=50, k_cluster=6, high_fraction=1.0))
    assert len(pool.high) == 50
    assert pool.low == []


def test_build_pool_saturation():
    ordering = [(f"d{i}", 0.5) for i in range(10)]
    pool = build_pool(ordering, SelectionConfig(k_top=500, k_cluster=6, high_fraction=0.7))
    assert len(pool.high) + len(pool.low) == 10
    assert len(pool.high) == 7  # rounding toward high


def test_selection_config_validation():
    with pytest.raises(ValueError):
        SelectionConfig(k_top=5, k_cluster=6)
    with pytest.raises(ValueError):
        SelectionConfig(k_top=500, k_cluster=6, high_fraction=0.0)
    with pytest.raises(ValueError):
        SelectionConfig(k_top=100, k_cluster=6, high_fraction=0.01)


def _planted(seed=0):
    rng = np.random.default_rng(seed)
    centers = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]])
    pts = []
    truth = []
    for c in range(3):
        for _ in range(4):
            pts.append(centers[c] + rng.normal(0, 0.1, 2))
            truth.append(c)
    return sp.csr_matrix(np.array(pts)), np.array(truth)


def brute_force_best_assignment(X, k):
    """Enumerate every labeling of <= 12 points, return the minimal inertia."""
    X = X.toarray()
    n = len(X)
    best = np.inf
    for labels in itertools.product(range(k), repeat=n):
        labels = np.array(labels)
        if len(set(labels.tolist())) < k:
            continue
        inertia = 0.0
        for c in range(k):
            members = X[labels == c]
            inertia += ((members - members.mean(axis=0)) ** 2).sum()
        best = min(best, inertia)
    return best


def test_kmeans_recovers_planted_clusters():
    X, truth = _planted()
    labels, centroids, inertia = kmeans(X, 3, seed=0)
    # same partition as planted, up to relabeling
    for c in range(3):
        members = labels[truth == c]
        assert len(set(members.tolist())) == 1
    assert inertia == pytest.approx(brute_force_best_assignment(X, 3), rel=1e-6)


def test_kmeans_k_one_centroid_is_mean():
    X = sp.csr_matrix(np.array([[0.0, 0.0], [2.0, 0.0], [1.0, 3.0]]))
    labels, centroids, _ = kmeans(X, 1, seed=0)
    assert np.allclose(centroids[0], [1.0, 1.0])
    assert set(labels.tolist()) == {0}


def test_kmeans_k_equals_n_zero_inertia():
    X = sp.csr_matrix(np.array([[0.0, 0.0], [2.0, 0.0], [1.0, 3.0]]))
    labels, _, inertia = kmeans(X, 3, seed=0)
    assert sorted(labels.tolist()) == [0, 1, 2]
    assert inertia == pytest.approx(0.0, abs=1e-12)


def test_kmeans_too_few_points():
    X = sp.csr_matrix(np.array([[0.0, 0.0]]))
    with pytest.raises(ValueError, match="shrink k"):
        kmeans(X, 2, seed=0)


def test_kmeans_deterministic():
    rng = np.random.default_rng(5)
    X = sp.csr_matrix(rng.random((30, 4)))
    a = kmeans(X, 4, seed=11)
    b = kmeans(X, 4, seed=11)
    assert np.array_equal(a[0], b[0])
    assert np.array_equal(a[1], b[1])


def test_pick_representatives_tie_lower_doc_id():
    X = sp.csr_matrix(np.array([[0.0, 0.0], [2.0, 0.0]]))
    labels = np.array([0, 0])
    centroids = np.array([[1.0, 0.0]])
    assert pick_representatives(["a", "b"], X, labels, centroids) == ["a"]
    assert pick_representatives(["b", "a"], X, labels, centroids) == ["a"]


def test_pick_representatives_singleton_and_near_centroid():
    rng = np.random.default_rng(2)
    X, truth = _planted(seed=2)
    labels, centroids, _ = kmeans(X, 3, seed=2)
    ids = [f"d{i:02d}" for i in range(X.shape[0])]
    reps = pick_representatives(ids, X, labels, centroids)
    assert len(reps) == 3
    assert len(set(reps)) == 3
    for rep in reps:
        assert rep in ids


def test_refill_seeded_and_exhaustion():
    pool = Pool(high=[(f"h{i}", 0.9) for i in range(5)], low=[("l0", 0.1)])
    ids1, flag1 = refill(pool, {"h0", "h1"}, 2, seed=9)
    ids2, flag2 = refill(pool, {"h0", "h1"}, 2, seed=9)
    assert ids1 == ids2
    assert not flag1
    assert set(ids1) <= {"h2", "h3", "h4"}
    ids, flag = refill(pool, {"h0", "h1"}, 10, seed=9)
    assert flag
    assert set(ids) == {"h2", "h3", "h4", "l0"}


def test_refill_high_part_first():
    pool = Pool(high=[("h0", 0.9)], low=[("l0", 0.1), ("l1", 0.2)])
    ids, _ = refill(pool, set(), 2, seed=0)
    assert ids[0] == "h0"
