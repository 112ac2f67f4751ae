"""Outlier detection, data augmentation, imputation and a quality score.

These operate on plain numeric arrays; missing values are NaN.
"""

from __future__ import annotations

from typing import Union

import numpy as np


class CleaningError(ValueError):
    pass


def detect_outliers_iqr(column) -> set:
    """Indices of values outside [Q1 - 1.5 IQR, Q3 + 1.5 IQR].

    Quartiles use linear interpolation between order statistics.  NaN
    entries are ignored (never flagged); at least 4 finite values are
    required.
    """
    values = np.asarray(column, dtype=float)
    finite = np.isfinite(values)
    if finite.sum() < 4:
        raise CleaningError("insufficient data for quartiles (need >= 4 values)")
    q1, q3 = np.percentile(values[finite], [25, 75])
    iqr = q3 - q1
    lo, hi = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    return {i for i in np.nonzero(finite)[0] if values[i] < lo or values[i] > hi}


def augment_smote(features, labels, k: int, n_synthetic: Union[int, dict],
                  seed: int = 1):
    """Generate synthetic rows by interpolating towards same-class neighbours.

    Each synthetic point is x + u * (neighbour - x) with u uniform in
    [0, 1] and the neighbour drawn from the k nearest same-class points.
    ``n_synthetic`` is either a total count (generated for the minority
    class) or a mapping label -> count.  Returns (rows, labels).
    """
    X = np.asarray(features, dtype=float)
    labels = list(labels)
    if k < 1:
        raise CleaningError("k must be >= 1")
    if len(labels) != X.shape[0]:
        raise CleaningError("features and labels length mismatch")

    by_class: dict = {}
    for i, lab in enumerate(labels):
        by_class.setdefault(lab, []).append(i)

    if isinstance(n_synthetic, dict):
        requested = dict(n_synthetic)
    else:
        minority = min(by_class, key=lambda lab: (len(by_class[lab]), str(lab)))
        requested = {minority: int(n_synthetic)}

    for lab, count in requested.items():
        if lab not in by_class:
            raise CleaningError(f"unknown class {lab!r}")
        if count > 0 and len(by_class[lab]) <= k:
            raise CleaningError(
                f"class {lab!r} has {len(by_class[lab])} members; "
                f"need more than k={k}")

    rng = np.random.default_rng(seed)
    new_rows, new_labels = [], []
    for lab, count in requested.items():
        members = np.asarray(by_class[lab])
        pts = X[members]
        # Pairwise distances inside the class; self excluded from neighbours.
        d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
        np.fill_diagonal(d, np.inf)
        neighbour_ids = np.argsort(d, axis=1, kind="stable")[:, :k]
        for _ in range(count):
            a = rng.integers(len(members))
            b = neighbour_ids[a][rng.integers(k)]
            u = rng.uniform()
            new_rows.append(pts[a] + u * (pts[b] - pts[a]))
            new_labels.append(lab)
    if new_rows:
        return np.vstack(new_rows), new_labels
    return np.empty((0, X.shape[1])), new_labels


def impute_knn(matrix, k: int) -> np.ndarray:
    """Fill NaN cells with the column mean over the k nearest rows.

    Distance is Euclidean over mutually observed coordinates; only rows
    with the target column observed are candidates.  Observed cells are
    never altered.
    """
    X = np.asarray(matrix, dtype=float)
    if k < 1:
        raise CleaningError("k must be >= 1")
    observed = ~np.isnan(X)
    if not observed.any(axis=1).all():
        raise CleaningError("every row must have at least one observed value")
    col_counts = observed.sum(axis=0)
    for j, count in enumerate(col_counts):
        if count == 0:
            raise CleaningError(f"column {j} has no observed values")
        if count < k:
            raise CleaningError(
                f"column {j} has {count} observed values; need at least k={k}")

    out = X.copy()
    for i, j in zip(*np.nonzero(~observed)):
        candidates = [r for r in range(X.shape[0]) if r != i and observed[r, j]]
        dists = []
        for r in candidates:
            shared = observed[i] & observed[r]
            if shared.any():
                d = float(np.sqrt(((X[i, shared] - X[r, shared]) ** 2).sum()))
            else:
                d = np.inf
            dists.append((d, r))
        dists.sort()
        nearest = [r for d, r in dists[:k] if np.isfinite(d)]
        if nearest:
            out[i, j] = X[nearest, j].mean()
        else:
            # No comparable row shares a coordinate; fall back to the column mean.
            out[i, j] = X[observed[:, j], j].mean()
    return out


def weighted_feature_error(original, generated, importances) -> float:
    """Importance-weighted error between original and generated data.

    Per feature: |mean(original) - mean(generated)| scaled by the
    original feature's standard deviation (population); zero-variance
    features contribute 0.  The importances must be non-negative and sum
    to 1.
    """
    A = np.asarray(original, dtype=float)
    B = np.asarray(generated, dtype=float)
    w = np.asarray(importances, dtype=float)
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != B.shape[1]:
        raise CleaningError("matrices must share the column count")
    if w.shape != (A.shape[1],):
        raise CleaningError("one importance weight per feature is required")
    if (w < 0).any() or abs(w.sum() - 1.0) > 1e-9:
        raise CleaningError("importances must be >= 0 and sum to 1")

    std = A.std(axis=0)
    diff = np.abs(A.mean(axis=0) - B.mean(axis=0))
    errors = np.where(std > 0, diff / np.where(std > 0, std, 1.0), 0.0)
    return float((w * errors).sum())
