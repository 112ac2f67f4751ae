import shutil
from pathlib import Path

import pytest

from mlworkbench.dataset import DatasetSchema

ASSETS = Path(__file__).resolve().parents[1] / "src" / "mlworkbench" / "assets"

IRIS_LABELS = ["Sepal length in cm", "Sepal width in cm",
               "Petal length in cm", "Petal width in cm", "Class"]


@pytest.fixture
def data_dir(tmp_path):
    """Workspace with the raw iris and iris2 sample files."""
    d = tmp_path / "data"
    d.mkdir()
    shutil.copy(ASSETS / "iris.csv", d / "iris.csv")
    shutil.copy(ASSETS / "iris2.csv", d / "iris2.csv")
    return d


def iris_schema():
    return DatasetSchema("iris", "iris dataset", [0, 1, 2, 3, 4],
                         IRIS_LABELS, [1, 1, 1, 1, 3], [1, 1, 1, 1, 1])


def iris2_schema():
    return DatasetSchema("iris2", "iris without the class field",
                         [0, 1, 2, 3], IRIS_LABELS[:4],
                         [1, 1, 1, 2], [1, 1, 1, 1])
