"""Random-forest feature importance (mean decrease in impurity).

Trees are grown on bootstrap samples with a random feature subset per
node; impurity is Gini for classification and variance for regression.
Per-tree importances are normalised, averaged over the ensemble and
normalised again so they sum to 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ForestError(ValueError):
    pass


@dataclass
class ImportanceResult:
    importances: np.ndarray
    task: str                      # classification | regression


def _gini_from_counts(counts, n):
    p = counts / n
    return 1.0 - (p * p).sum()


def _best_split(X, y, features, task, n_classes):
    """Best (feature, threshold, gain, left_mask) over the feature subset."""
    n = X.shape[0]
    if task == "classification":
        counts = np.bincount(y, minlength=n_classes).astype(float)
        parent = _gini_from_counts(counts, n)
    else:
        parent = float(y.var())
    if parent <= 0:
        return None

    best = None
    for f in features:
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        ys = y[order]
        cut = np.nonzero(xs[:-1] < xs[1:])[0]     # split between i and i+1
        if cut.size == 0:
            continue

        if task == "classification":
            onehot = np.zeros((n, n_classes))
            onehot[np.arange(n), ys] = 1.0
            left_counts = onehot.cumsum(axis=0)[cut]
            nl = (cut + 1).astype(float)
            nr = n - nl
            right_counts = counts - left_counts
            gl = 1.0 - ((left_counts / nl[:, None]) ** 2).sum(axis=1)
            gr = 1.0 - ((right_counts / nr[:, None]) ** 2).sum(axis=1)
            weighted = (nl * gl + nr * gr) / n
        else:
            s = ys.cumsum()[cut]
            s2 = (ys * ys).cumsum()[cut]
            nl = (cut + 1).astype(float)
            nr = n - nl
            tot, tot2 = float(ys.sum()), float((ys * ys).sum())
            vl = s2 / nl - (s / nl) ** 2
            vr = (tot2 - s2) / nr - ((tot - s) / nr) ** 2
            weighted = (nl * np.maximum(vl, 0) + nr * np.maximum(vr, 0)) / n

        gains = parent - weighted
        i = int(gains.argmax())
        if gains[i] > 1e-12 and (best is None or gains[i] > best[2]):
            threshold = 0.5 * (xs[cut[i]] + xs[cut[i] + 1])
            best = (f, threshold, float(gains[i]))
    if best is None:
        return None
    f, threshold, gain = best
    return f, threshold, gain, X[:, f] <= threshold


def _grow_tree(X, y, rng, m_try, task, n_classes, importances, n_total):
    """Depth-first growth; split gains accumulate into `importances`."""
    stack = [np.arange(X.shape[0])]
    while stack:
        idx = stack.pop()
        if idx.size < 2:
            continue
        features = rng.choice(X.shape[1], size=m_try, replace=False)
        found = _best_split(X[idx], y[idx], features, task, n_classes)
        if found is None:
            continue
        f, _threshold, gain, left_mask = found
        importances[f] += idx.size / n_total * gain
        stack.append(idx[left_mask])
        stack.append(idx[~left_mask])


def rf_importance(dataset, task: str = None, n_trees: int = 100,
                  seed: int = 1) -> ImportanceResult:
    """Normalised per-feature importances from a forest of decision trees.

    The task is read off the dataset's target when not given: a class
    column means classification, a regression column means regression.
    Feature subsets per node have size sqrt(d) (classification) or d/3
    (regression).
    """
    X = np.asarray(dataset.feature_matrix, dtype=float)
    n, d = X.shape
    if d < 2:
        raise ForestError("need at least 2 features")

    if task is None:
        if dataset.target_kind in ("class", "onehot"):
            task = "classification"
        elif dataset.target_kind == "regression":
            task = "regression"
        else:
            raise ForestError("dataset has no class or regression field")

    n_classes = 0
    if task == "classification":
        if dataset.target_kind == "onehot":
            y = np.asarray(dataset.target).argmax(axis=1)
            n_classes = len(dataset.class_labels)
        elif dataset.target_kind == "class":
            classes = sorted(set(dataset.target))
            index = {c: i for i, c in enumerate(classes)}
            y = np.array([index[lab] for lab in dataset.target])
            n_classes = len(classes)
        else:
            raise ForestError("dataset has no class field")
        m_try = max(1, int(round(np.sqrt(d))))
    elif task == "regression":
        if dataset.target_kind != "regression":
            raise ForestError("dataset has no regression field")
        y = np.asarray(dataset.target, dtype=float)
        m_try = max(1, int(round(d / 3)))
    else:
        raise ForestError(f"unknown task {task!r}")

    rng = np.random.default_rng(seed)
    total = np.zeros(d)
    for _ in range(n_trees):
        boot = rng.integers(0, n, n)
        tree_imp = np.zeros(d)
        _grow_tree(X[boot], y[boot], rng, m_try, task, n_classes,
                   tree_imp, n_total=n)
        s = tree_imp.sum()
        if s > 0:
            total += tree_imp / s

    s = total.sum()
    if s <= 0:
        importances = np.full(d, 1.0 / d)   # constant target: no signal at all
    else:
        importances = total / s
    return ImportanceResult(importances=importances, task=task)
