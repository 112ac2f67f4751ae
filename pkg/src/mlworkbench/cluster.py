"""K-means clustering (Lloyd + k-means++ seeding) and the silhouette index."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


class ClusterError(ValueError):
    pass


@dataclass
class ClusteringResult:
    assignments: np.ndarray          # (n,) cluster index per row
    centroids: np.ndarray            # (k, d)
    inertia: float
    n_iter: int
    inertia_history: list            # inertia after each Lloyd iteration
    silhouette_per_sample: Optional[np.ndarray]
    silhouette_mean: Optional[float]
    feature_mins: np.ndarray         # data bounds, kept for radar scaling
    feature_maxs: np.ndarray

    @property
    def k(self) -> int:
        return self.centroids.shape[0]

    def cluster_sizes(self) -> list:
        return [int((self.assignments == c).sum()) for c in range(self.k)]


def _pairwise_sq(X, C):
    # (n, k) squared Euclidean distances.
    return ((X[:, None, :] - C[None, :, :]) ** 2).sum(axis=2)


def _plus_plus_init(X, k, rng):
    n = X.shape[0]
    centroids = np.empty((k, X.shape[1]))
    centroids[0] = X[rng.integers(n)]
    closest = ((X - centroids[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = closest.sum()
        if total <= 0:
            centroids[c] = X[rng.integers(n)]
        else:
            r = rng.uniform() * total
            idx = int(np.searchsorted(np.cumsum(closest), r))
            idx = min(idx, n - 1)
            centroids[c] = X[idx]
        closest = np.minimum(closest, ((X - centroids[c]) ** 2).sum(axis=1))
    return centroids


def kmeans(X, k: int, seed: Optional[int] = 1, init: str = "plus_plus",
           max_iter: int = 300) -> ClusteringResult:
    """Cluster rows of X into k groups.

    Runs Lloyd iterations from k-means++ seeding (or uniform random
    seeding with init="random") until the assignment reaches a fixpoint
    or max_iter passes.  Deterministic for a fixed seed.  An emptied
    cluster is re-seeded at the point farthest from its own centroid.
    The silhouette index is attached whenever 2 <= k < n.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ClusterError("X must be a 2-D matrix")
    n = X.shape[0]
    if k <= 0:
        raise ClusterError(f"k must be positive, got {k}")
    if k > n:
        raise ClusterError(f"k={k} exceeds the number of rows ({n})")
    if not np.isfinite(X).all():
        raise ClusterError("X contains non-finite entries")
    if init not in ("plus_plus", "random"):
        raise ClusterError(f"unknown init {init!r}")

    rng = np.random.default_rng(seed)
    if init == "plus_plus":
        centroids = _plus_plus_init(X, k, rng)
    else:
        centroids = X[rng.choice(n, size=k, replace=False)]

    assignments = np.full(n, -1)
    history = []
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        d2 = _pairwise_sq(X, centroids)
        new_assign = d2.argmin(axis=1)

        # Re-seed empty clusters at the worst-served point.
        for c in range(k):
            if not (new_assign == c).any():
                worst = d2[np.arange(n), new_assign].argmax()
                centroids[c] = X[worst]
                d2 = _pairwise_sq(X, centroids)
                new_assign = d2.argmin(axis=1)

        history.append(float(d2[np.arange(n), new_assign].sum()))
        if (new_assign == assignments).all():
            assignments = new_assign
            break
        assignments = new_assign
        for c in range(k):
            members = X[assignments == c]
            if len(members):        # duplicates can leave a cluster empty
                centroids[c] = members.mean(axis=0)

    inertia = float(((X - centroids[assignments]) ** 2).sum())
    sil_values, sil_mean = None, None
    if 2 <= k < n and len(np.unique(assignments)) >= 2:
        sil_values, sil_mean = silhouette(X, assignments)

    return ClusteringResult(
        assignments=assignments,
        centroids=centroids,
        inertia=inertia,
        n_iter=n_iter,
        inertia_history=history,
        silhouette_per_sample=sil_values,
        silhouette_mean=sil_mean,
        feature_mins=X.min(axis=0),
        feature_maxs=X.max(axis=0),
    )


def silhouette(X, labels):
    """Per-sample silhouette values s = (b - a) / max(a, b) and their mean.

    a is the mean distance to the own cluster (excluding the point), b
    the smallest mean distance to another cluster.  Singleton clusters
    score 0.  Needs at least two clusters.
    """
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels)
    clusters = np.unique(labels)
    if len(clusters) < 2:
        raise ClusterError("silhouette undefined for a single cluster")

    D = np.sqrt(np.maximum(_pairwise_sq(X, X), 0.0))
    n = X.shape[0]
    values = np.zeros(n)
    masks = {c: labels == c for c in clusters}
    sizes = {c: int(masks[c].sum()) for c in clusters}

    for i in range(n):
        own = labels[i]
        if sizes[own] == 1:
            values[i] = 0.0
            continue
        a = D[i, masks[own]].sum() / (sizes[own] - 1)
        b = min(D[i, masks[c]].mean() for c in clusters if c != own)
        denom = max(a, b)
        values[i] = 0.0 if denom == 0 else (b - a) / denom
    return values, float(values.mean())
