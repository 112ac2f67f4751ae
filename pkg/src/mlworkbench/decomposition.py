"""Principal component analysis via eigendecomposition of the covariance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DecompositionError(ValueError):
    pass


@dataclass
class PcaResult:
    components: np.ndarray               # (n_components, d), orthonormal rows
    explained_variance: np.ndarray       # top eigenvalues
    explained_variance_ratio: np.ndarray
    projected: np.ndarray                # (n, n_components)
    covariance: np.ndarray               # (d, d) of the original features
    mean: np.ndarray                     # column means used for centering

    @property
    def n_components(self) -> int:
        return self.components.shape[0]

    def reconstruct(self) -> np.ndarray:
        """Back-project onto the original feature space."""
        return self.projected @ self.components + self.mean


def pca(X, n_components: int) -> PcaResult:
    """Top principal components of the mean-centered data.

    The covariance uses the n-1 divisor; each component's sign is fixed
    so its largest-magnitude coordinate is positive; the explained
    variance ratio is against the total variance over all dimensions.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DecompositionError("X must be a 2-D matrix")
    n, d = X.shape
    limit = min(n - 1, d)
    if not 1 <= n_components <= limit:
        raise DecompositionError(
            f"n_components must be in [1, {limit}], got {n_components}")

    mean = X.mean(axis=0)
    Xc = X - mean
    cov = Xc.T @ Xc / (n - 1)
    eigenvalues, eigenvectors = np.linalg.eigh(cov)
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues = np.maximum(eigenvalues[order], 0.0)
    components = eigenvectors[:, order].T[:n_components].copy()

    for row in components:
        if row[np.abs(row).argmax()] < 0:
            row *= -1

    total = eigenvalues.sum()
    ratio = eigenvalues[:n_components] / total if total > 0 else \
        np.zeros(n_components)

    return PcaResult(
        components=components,
        explained_variance=eigenvalues[:n_components],
        explained_variance_ratio=ratio,
        projected=Xc @ components.T,
        covariance=cov,
        mean=mean,
    )
