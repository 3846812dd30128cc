"""Uncertainty ranking, pool composition, k-means diversity selection and refill."""

from dataclasses import dataclass, field
import math

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True)
class SelectionConfig:
    k_top: int = 500
    k_cluster: int = 6
    high_fraction: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.high_fraction <= 1.0:
            raise ValueError("high_fraction must lie in (0, 1]")
        if self.k_cluster >= self.k_top:
            raise ValueError("k_cluster must be smaller than k_top")
        if self.high_fraction * self.k_top < self.k_cluster:
            raise ValueError("high part of the pool cannot hold k_cluster points")


@dataclass
class Pool:
    """Candidate documents for a labeling cycle, split by uncertainty end.

    ``high`` is sorted by uncertainty descending, ``low`` ascending.
    """

    high: list = field(default_factory=list)  # (doc_id, s_x)
    low: list = field(default_factory=list)

    def doc_ids(self):
        return [d for d, _ in self.high] + [d for d, _ in self.low]


def rank_unlabeled(scored):
    """Order (doc_id, s_x) pairs by uncertainty descending, ties by doc_id."""
    return sorted(scored, key=lambda r: (-r[1], r[0]))


def build_pool(ordering, cfg):
    """Take the most- and least-uncertain ends of a ranked ordering.

    ``ordering`` must already be sorted by uncertainty descending. When fewer
    documents exist than ``k_top`` the whole ordering is taken, keeping the
    high/low proportions with rounding toward the high part.
    """
    n = min(len(ordering), cfg.k_top)
    n_high = math.ceil(cfg.high_fraction * n)
    n_low = n - n_high
    high = list(ordering[:n_high])
    low = list(reversed(ordering[len(ordering) - n_low :])) if n_low else []
    return Pool(high=high, low=low)


def _sq_norms(X):
    return np.asarray(X.multiply(X).sum(axis=1)).ravel()


def _distances_sq(X, x_sq, centroids):
    # ||x - c||^2 = ||x||^2 - 2 x.c + ||c||^2, clipped at 0 for roundoff
    cross = np.asarray(X @ centroids.T)
    c_sq = np.einsum("ij,ij->i", centroids, centroids)
    d = x_sq[:, None] - 2.0 * cross + c_sq[None, :]
    return np.maximum(d, 0.0)


def kmeans(X, k, seed):
    """k-means++ initialization plus Lloyd iterations on sparse rows.

    Runs to an assignment fixpoint or 100 iterations. An emptied cluster is
    repaired by moving in the point currently farthest from its own centroid.
    Returns (labels, centroids, inertia).
    """
    X = sp.csr_matrix(X, dtype=np.float64)
    n = X.shape[0]
    if n < k:
        raise ValueError(f"{n} points cannot form {k} clusters; shrink k")
    rng = np.random.default_rng(seed)
    x_sq = _sq_norms(X)

    # k-means++ seeding
    first = int(rng.integers(n))
    centers = [first]
    d2 = _distances_sq(X, x_sq, X[first].toarray())[:, 0]
    for _ in range(1, k):
        total = d2.sum()
        if total <= 0:
            # remaining points coincide with chosen centers; pick unused ids
            unused = [i for i in range(n) if i not in centers]
            centers.append(unused[0])
        else:
            r = rng.random() * total
            idx = int(np.searchsorted(np.cumsum(d2), r, side="right"))
            idx = min(idx, n - 1)
            centers.append(idx)
        new_d2 = _distances_sq(X, x_sq, X[centers[-1]].toarray())[:, 0]
        d2 = np.minimum(d2, new_d2)
    centroids = np.asarray(X[centers].todense())

    labels = np.full(n, -1)
    prev_inertia = math.inf
    for _ in range(100):
        d = _distances_sq(X, x_sq, centroids)
        new_labels = d.argmin(axis=1)
        # repair empty clusters with the worst-fitting point
        for c in range(k):
            if not (new_labels == c).any():
                worst = int(d[np.arange(n), new_labels].argmax())
                new_labels[worst] = c
                d[worst, :] = math.inf
                d[worst, c] = 0.0
        inertia = float(d[np.arange(n), new_labels].sum())
        assert inertia <= prev_inertia + 1e-9
        prev_inertia = inertia
        if (new_labels == labels).all():
            break
        labels = new_labels
        for c in range(k):
            members = labels == c
            if members.any():
                centroids[c] = np.asarray(X[members].mean(axis=0)).ravel()
    d = _distances_sq(X, x_sq, centroids)
    inertia = float(d[np.arange(n), labels].sum())
    return labels, centroids, inertia


def pick_representatives(doc_ids, X, labels, centroids):
    """Per cluster, the member nearest its centroid; ties go to the lower doc_id.

    Output follows cluster index order.
    """
    X = sp.csr_matrix(X, dtype=np.float64)
    x_sq = _sq_norms(X)
    d = _distances_sq(X, x_sq, centroids)
    reps = []
    for c in range(centroids.shape[0]):
        members = np.flatnonzero(labels == c)
        if members.size == 0:
            continue
        dists = d[members, c]
        best = dists.min()
        tied = members[np.isclose(dists, best, rtol=0.0, atol=1e-12)]
        reps.append(min(doc_ids[i] for i in tied))
    return reps


def refill(pool, already_selected, n, seed):
    """Seeded uniform draw without replacement from the remaining pool.

    High-uncertainty part first, then the low part once exhausted. Returns
    (ids, exhausted) where exhausted flags a draw shorter than ``n``.
    """
    rng = np.random.default_rng(seed)
    picked = []
    for part in (pool.high, pool.low):
        if len(picked) >= n:
            break
        remaining = [d for d, _ in part if d not in already_selected and d not in picked]
        take = min(n - len(picked), len(remaining))
        if take:
            idx = rng.choice(len(remaining), size=take, replace=False)
            picked.extend(remaining[i] for i in sorted(idx))
    return picked, len(picked) < n
