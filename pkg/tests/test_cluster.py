import numpy as np
import pytest

from mlworkbench.cluster import ClusterError, kmeans, silhouette


def brute_force_silhouette(X, labels):
    """O(n^2) loop oracle for the silhouette index."""
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels)
    n = len(X)
    values = []
    for i in range(n):
        own = labels[i]
        same = [j for j in range(n) if labels[j] == own and j != i]
        if not same:
            values.append(0.0)
            continue
        a = np.mean([np.linalg.norm(X[i] - X[j]) for j in same])
        b = min(
            np.mean([np.linalg.norm(X[i] - X[j])
                     for j in range(n) if labels[j] == c])
            for c in set(labels) if c != own)
        denom = max(a, b)
        values.append(0.0 if denom == 0 else (b - a) / denom)
    return np.array(values), float(np.mean(values))


def two_blobs(n_per=30, seed=0, centers=((0, 0), (10, 10)), sigma=0.5):
    rng = np.random.default_rng(seed)
    parts = [rng.normal(c, sigma, size=(n_per, 2)) for c in centers]
    return np.vstack(parts)


# --- kmeans ------------------------------------------------------------------

def test_kmeans_separates_blobs():
    X = two_blobs()
    result = kmeans(X, k=2, seed=1)
    first, second = result.assignments[:30], result.assignments[30:]
    assert len(set(first)) == 1 and len(set(second)) == 1
    assert first[0] != second[0]
    assert result.silhouette_mean > 0.7


def test_kmeans_identical_rows_k1():
    X = np.tile([2.0, 3.0], (5, 1))
    result = kmeans(X, k=1, seed=1)
    assert np.allclose(result.centroids[0], [2.0, 3.0])
    assert result.inertia == pytest.approx(0.0)
    assert result.silhouette_mean is None


def test_kmeans_k_equals_rows():
    X = np.array([[0.0], [5.0], [10.0], [20.0]])
    result = kmeans(X, k=4, seed=1)
    assert sorted(result.assignments) == [0, 1, 2, 3]
    assert result.inertia == pytest.approx(0.0)


def test_kmeans_argument_errors():
    X = np.zeros((3, 2))
    with pytest.raises(ClusterError):
        kmeans(X, k=0)
    with pytest.raises(ClusterError):
        kmeans(X, k=4)
    with pytest.raises(ClusterError):
        kmeans(np.array([[np.nan, 0.0]]), k=1)


def test_kmeans_inertia_non_increasing():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(120, 3))
    result = kmeans(X, k=4, seed=2)
    history = result.inertia_history
    assert all(history[i + 1] <= history[i] + 1e-9
               for i in range(len(history) - 1))


def test_kmeans_deterministic():
    X = two_blobs(seed=3)
    a = kmeans(X, k=2, seed=7)
    b = kmeans(X, k=2, seed=7)
    assert np.array_equal(a.assignments, b.assignments)
    assert np.array_equal(a.centroids, b.centroids)


def test_kmeans_centroids_are_cluster_means():
    X = two_blobs(seed=9)
    result = kmeans(X, k=2, seed=4)
    for c in range(2):
        members = X[result.assignments == c]
        assert np.allclose(result.centroids[c], members.mean(axis=0))


# --- silhouette ---------------------------------------------------------------

def test_silhouette_matches_brute_force():
    rng = np.random.default_rng(11)
    for _ in range(25):
        n = int(rng.integers(10, 200))
        k = int(rng.integers(2, 6))
        X = rng.normal(size=(n, 3))
        labels = rng.integers(0, k, n)
        if len(set(labels.tolist())) < 2:
            continue
        values, mean = silhouette(X, labels)
        oracle_values, oracle_mean = brute_force_silhouette(X, labels)
        assert np.allclose(values, oracle_values, atol=1e-9)
        assert mean == pytest.approx(oracle_mean, abs=1e-9)


def test_silhouette_coincident_clusters():
    X = np.array([[0.0, 0.0]] * 3 + [[9.0, 9.0]] * 3)
    labels = [0, 0, 0, 1, 1, 1]
    values, mean = silhouette(X, labels)
    assert np.allclose(values, 1.0)
    assert mean == pytest.approx(1.0)


def test_silhouette_single_cluster():
    with pytest.raises(ClusterError, match="undefined"):
        silhouette(np.zeros((4, 2)), [0, 0, 0, 0])


def test_silhouette_values_in_range():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(60, 2))
    labels = rng.integers(0, 3, 60)
    values, _ = silhouette(X, labels)
    assert (values >= -1).all() and (values <= 1).all()
