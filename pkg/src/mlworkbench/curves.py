"""Cross-validated learning, performance and scalability curves."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .network import NetConfig, fit_network, network_output, _class_labels

DEFAULT_SIZES = (0.1, 0.325, 0.55, 0.775, 1.0)


class CurveError(ValueError):
    pass


@dataclass
class CurveSet:
    train_sizes: np.ndarray        # absolute training-set sizes per grid point
    train_score_mean: np.ndarray
    train_score_std: np.ndarray
    val_score_mean: np.ndarray
    val_score_std: np.ndarray
    fit_time_mean: np.ndarray      # seconds per grid point
    fit_time_std: np.ndarray
    kind: str
    k_folds: int

    def __len__(self):
        return len(self.train_sizes)


def _fold_indices(n, k_folds, rng):
    return np.array_split(rng.permutation(n), k_folds)


def _score(params, X, Y, kind) -> float:
    out = network_output(params, X)
    if kind == "classifier":
        return float((out.argmax(axis=1) == Y).mean())
    ss_res = float(((out - Y) ** 2).sum())
    ss_tot = float(((Y - Y.mean()) ** 2).sum())
    if ss_tot == 0:
        return 0.0 if ss_res > 0 else 1.0
    return 1.0 - ss_res / ss_tot


def learning_curves(dataset, kind: str, k_folds: int = 10,
                    sizes=DEFAULT_SIZES, seed: int = 1,
                    config: Optional[NetConfig] = None) -> CurveSet:
    """K-fold cross-validated scores and fit times per training-set size.

    For each size fraction and each fold, a network is trained on the
    first part of the fold's training pool and scored on the held-out
    fold (accuracy for classifiers, R^2 for regressors).
    """
    if k_folds < 2:
        raise CurveError("k_folds must be >= 2")
    config = config or NetConfig(max_epochs=200)
    X = np.asarray(dataset.feature_matrix, dtype=float)
    n = X.shape[0]
    if n < k_folds:
        raise CurveError(f"need at least {k_folds} rows for {k_folds} folds")

    if kind == "classifier":
        labels = _class_labels(dataset)
        classes = sorted(set(labels))
        index = {c: i for i, c in enumerate(classes)}
        Y = np.array([index[lab] for lab in labels])
        out_dim = len(classes)
    else:
        Y = np.asarray(dataset.target, dtype=float).reshape(-1, 1)
        out_dim = 1

    rng = np.random.default_rng(seed)
    folds = _fold_indices(n, k_folds, rng)

    sizes = list(sizes)
    grid_sizes = []
    train_scores = np.zeros((len(sizes), k_folds))
    val_scores = np.zeros((len(sizes), k_folds))
    fit_times = np.zeros((len(sizes), k_folds))

    for s, fraction in enumerate(sizes):
        if not 0 < fraction <= 1:
            raise CurveError(f"size fractions must be in (0,1], got {fraction}")
        used = []
        for f in range(k_folds):
            val_idx = folds[f]
            pool = np.concatenate([folds[g] for g in range(k_folds) if g != f])
            m = max(1, int(round(fraction * len(pool))))
            if kind == "classifier":
                # Grow tiny subsets until two classes are present.
                while len(np.unique(Y[pool[:m]])) < 2 and m < len(pool):
                    m += 1
            sub = pool[:m]
            used.append(m)

            layer_sizes = [X.shape[1], *config.hidden, out_dim]
            t0 = time.perf_counter()
            params, _ = fit_network(X[sub], Y[sub], kind, layer_sizes,
                                    seed, config)
            fit_times[s, f] = time.perf_counter() - t0
            train_scores[s, f] = _score(params, X[sub], Y[sub], kind)
            val_scores[s, f] = _score(params, X[val_idx], Y[val_idx], kind)
        grid_sizes.append(int(round(np.mean(used))))

    return CurveSet(
        train_sizes=np.array(grid_sizes),
        train_score_mean=train_scores.mean(axis=1),
        train_score_std=train_scores.std(axis=1),
        val_score_mean=val_scores.mean(axis=1),
        val_score_std=val_scores.std(axis=1),
        fit_time_mean=fit_times.mean(axis=1),
        fit_time_std=fit_times.std(axis=1),
        kind=kind,
        k_folds=k_folds,
    )
