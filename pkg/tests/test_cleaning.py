import numpy as np
import pytest

from mlworkbench.cleaning import (
    CleaningError,
    augment_smote,
    detect_outliers_iqr,
    impute_knn,
    weighted_feature_error,
)


# --- IQR outliers ---------------------------------------------------------------

def brute_force_iqr(values):
    """Independent oracle: quartiles by hand via sorted linear interpolation."""
    xs = sorted(values)
    n = len(xs)

    def quantile(q):
        pos = (n - 1) * q
        lo = int(np.floor(pos))
        hi = int(np.ceil(pos))
        return xs[lo] + (pos - lo) * (xs[hi] - xs[lo])

    q1, q3 = quantile(0.25), quantile(0.75)
    iqr = q3 - q1
    return {i for i, v in enumerate(values)
            if v < q1 - 1.5 * iqr or v > q3 + 1.5 * iqr}


def test_iqr_flags_planted_outlier():
    column = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 100]
    assert detect_outliers_iqr(column) == {10}


def test_iqr_constant_column():
    assert detect_outliers_iqr([5, 5, 5, 5, 5]) == set()


def test_iqr_too_few_values():
    with pytest.raises(CleaningError, match="insufficient data"):
        detect_outliers_iqr([1, 2, 3])


def test_iqr_matches_brute_force():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        n = rng.integers(4, 51)
        values = rng.normal(0, 10, n).round(3).tolist()
        assert detect_outliers_iqr(values) == brute_force_iqr(values)


# --- SMOTE ------------------------------------------------------------------------

def test_smote_identical_points():
    X = np.array([[1.0, 2.0], [1.0, 2.0], [5.0, 5.0], [5.0, 5.0], [5.0, 5.0]])
    labels = ["a", "a", "b", "b", "b"]
    rows, labs = augment_smote(X, labels, k=1, n_synthetic=5, seed=0)
    assert labs == ["a"] * 5                     # minority class
    assert np.allclose(rows, [[1.0, 2.0]] * 5)


def test_smote_segment_membership():
    X = np.array([[0.0, 0.0], [1.0, 1.0], [9.0, 9.0], [9.5, 9.5]])
    labels = ["a", "a", "b", "b"]
    rows, _ = augment_smote(X, labels, k=1, n_synthetic={"a": 40}, seed=3)
    assert np.allclose(rows[:, 0], rows[:, 1], atol=1e-9)   # stays on y=x
    assert (rows[:, 0] >= -1e-9).all() and (rows[:, 0] <= 1 + 1e-9).all()


def test_smote_counts_per_class():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(30, 3))
    labels = ["a"] * 20 + ["b"] * 10
    rows, labs = augment_smote(X, labels, k=3, n_synthetic=50, seed=1)
    assert rows.shape == (50, 3)
    assert labs.count("b") == 50                 # minority gets them all
    rows, labs = augment_smote(X, labels, k=3,
                               n_synthetic={"a": 20, "b": 30}, seed=1)
    assert labs.count("a") == 20 and labs.count("b") == 30


def test_smote_class_too_small():
    X = np.zeros((4, 2))
    labels = ["a", "a", "a", "b"]
    with pytest.raises(CleaningError, match="'b'"):
        augment_smote(X, labels, k=2, n_synthetic=3, seed=0)


# --- KNN imputation -----------------------------------------------------------------

def test_impute_identity_on_complete_data():
    X = np.arange(12, dtype=float).reshape(4, 3)
    assert np.array_equal(impute_knn(X, k=2), X)


def test_impute_mean_of_neighbours():
    X = np.array([[0.0, 0.0], [2.0, 2.0], [1.0, np.nan]])
    filled = impute_knn(X, k=2)
    assert filled[2, 1] == pytest.approx(1.0)
    assert np.array_equal(filled[:2], X[:2])     # observed cells untouched


def test_impute_all_missing_column():
    X = np.array([[1.0, np.nan], [2.0, np.nan]])
    with pytest.raises(CleaningError, match="column 1"):
        impute_knn(X, k=1)


def test_impute_bad_k():
    with pytest.raises(CleaningError):
        impute_knn(np.ones((3, 2)), k=0)


# --- weighted feature error ----------------------------------------------------------

def test_error_zero_for_identical_data():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(50, 4))
    w = np.full(4, 0.25)
    assert weighted_feature_error(X, X.copy(), w) == 0.0


def test_error_one_hot_importance_selects_feature():
    A = np.column_stack([np.zeros(100), np.zeros(100)])
    A[:, 0] = np.repeat([0.0, 2.0], 50)          # std 1
    A[:, 1] = np.tile([0.0, 2.0], 50)
    B = A + np.array([0.3, 0.7])
    w = np.array([1.0, 0.0])
    assert weighted_feature_error(A, B, w) == pytest.approx(0.3)


def test_error_uniform_importances():
    # per-feature errors 0.2 and 0.4 with equal weights average to 0.3
    A = np.column_stack([np.repeat([0.0, 2.0], 50), np.tile([0.0, 2.0], 50)])
    B = A + np.array([0.2, 0.4])
    w = np.array([0.5, 0.5])
    assert weighted_feature_error(A, B, w) == pytest.approx(0.3)


def test_error_importances_must_sum_to_one():
    A = np.ones((5, 2))
    with pytest.raises(CleaningError, match="sum to 1"):
        weighted_feature_error(A, A, np.array([0.5, 0.6]))
