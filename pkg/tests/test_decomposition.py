import numpy as np
import pytest

from mlworkbench.decomposition import DecompositionError, pca


def test_rank_one_line():
    t = np.linspace(-3, 3, 40)
    X = np.column_stack([t, t])                  # data on y = x
    result = pca(X, 1)
    assert np.allclose(np.abs(result.components[0]),
                       [1 / np.sqrt(2), 1 / np.sqrt(2)], atol=1e-9)
    assert result.explained_variance_ratio[0] == pytest.approx(1.0)


def test_full_decomposition_ratio_sums_to_one():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(30, 5))
    result = pca(X, 5)
    assert result.explained_variance_ratio.sum() == pytest.approx(1.0, abs=1e-9)


def test_components_orthonormal():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(50, 6))
    result = pca(X, 4)
    gram = result.components @ result.components.T
    assert np.allclose(gram, np.eye(4), atol=1e-8)


def test_ratio_non_increasing():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(40, 5)) * np.array([5, 4, 3, 2, 1])
    result = pca(X, 5)
    ratios = result.explained_variance_ratio
    assert all(ratios[i + 1] <= ratios[i] + 1e-12 for i in range(4))


def test_reconstruction_error_monotone():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(50, 5))
    errors = []
    for m in range(1, 6):
        result = pca(X, m)
        errors.append(float(((result.reconstruct() - X) ** 2).sum()))
    assert all(errors[i + 1] <= errors[i] + 1e-9 for i in range(4))
    assert errors[-1] == pytest.approx(0.0, abs=1e-9)


def test_sign_convention():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(30, 4))
    result = pca(X, 4)
    for row in result.components:
        assert row[np.abs(row).argmax()] > 0


def test_covariance_symmetric():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(25, 4))
    result = pca(X, 2)
    assert np.allclose(result.covariance, result.covariance.T)


def test_component_range_errors():
    X = np.random.default_rng(6).normal(size=(10, 3))
    with pytest.raises(DecompositionError):
        pca(X, 0)
    with pytest.raises(DecompositionError):
        pca(X, 4)


def test_projection_matches_manual():
    rng = np.random.default_rng(7)
    X = rng.normal(size=(20, 3))
    result = pca(X, 2)
    manual = (X - X.mean(axis=0)) @ result.components.T
    assert np.allclose(result.projected, manual)
