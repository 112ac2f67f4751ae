import json

import numpy as np
import pytest

from mlworkbench.dataset import (
    DatasetError,
    DatasetSchema,
    apply_schema,
    elicit_schema,
    load_preprocessed,
    read_raw_csv,
    resolve_dataset,
    split,
)
from mlworkbench.dialogue import ScriptedDialogue

from conftest import iris_schema


# --- schema -------------------------------------------------------------------

def test_schema_roundtrip(tmp_path):
    schema = iris_schema()
    path = schema.save(tmp_path / "iris.json")
    assert DatasetSchema.load(path) == schema


def test_schema_json_layout(tmp_path):
    path = iris_schema().save(tmp_path / "iris.json")
    data = json.loads(path.read_text())
    assert set(data) == {"dataset_name", "dataset_description", "feat_no",
                         "feat_label", "feat_type", "feat_normalization"}
    assert data["feat_no"][0] == 0
    assert data["feat_type"][0] == "1"          # codes stored as strings
    assert data["feat_normalization"][-1] == "1"


def test_schema_invariants():
    with pytest.raises(DatasetError):
        DatasetSchema("x", "", [0, 1], ["a"], [1], [1])
    with pytest.raises(DatasetError):    # two regression columns
        DatasetSchema("x", "", [0, 1], ["a", "b"], [2, 2], [1, 1])
    with pytest.raises(DatasetError):    # two class columns
        DatasetSchema("x", "", [0, 1], ["a", "b"], [3, 4], [1, 1])
    with pytest.raises(DatasetError):    # feat_no not consecutive
        DatasetSchema("x", "", [0, 2], ["a", "b"], [1, 1], [1, 1])


# --- elicitation ---------------------------------------------------------------

def _iris_dialogue_answers():
    answers = ["This dataset describes iris flowers."]
    for label, ctype in zip(iris_schema().feat_label, [1, 1, 1, 1, 3]):
        answers += [label, str(ctype), "1"]
    return answers


def test_elicit_schema_writes_json(data_dir):
    dialogue = ScriptedDialogue(_iris_dialogue_answers())
    schema = elicit_schema("iris", dialogue, data_dir)
    assert (data_dir / "iris.json").exists()
    assert schema.feat_label[0] == "Sepal length in cm"
    assert schema.feat_type == [1, 1, 1, 1, 3]
    # the first question shows a sample value from the file
    first_field_prompt = dialogue.transcript[2][0]
    assert "(Value example: 5.1)" in first_field_prompt


def test_elicit_schema_reasks_on_invalid_menu(data_dir):
    answers = _iris_dialogue_answers()
    answers.insert(2, "7")          # invalid type for field 0, must be re-asked
    dialogue = ScriptedDialogue(answers)
    schema = elicit_schema("iris", dialogue, data_dir)
    assert schema.feat_type == [1, 1, 1, 1, 3]


def test_elicit_schema_missing_file(tmp_path):
    with pytest.raises(DatasetError, match="not found"):
        elicit_schema("ghost", ScriptedDialogue([]), tmp_path)


def test_elicit_schema_empty_file(tmp_path):
    (tmp_path / "empty.csv").write_text("")
    with pytest.raises(DatasetError, match="no columns"):
        elicit_schema("empty", ScriptedDialogue([]), tmp_path)


# --- apply_schema ---------------------------------------------------------------

def test_minmax_formula():
    schema = DatasetSchema("t", "", [0], ["x"], [1], [2])
    prepared = apply_schema([["2"], ["4"], ["6"]], schema)
    assert np.allclose(prepared.feature_matrix[:, 0], [0.0, 0.5, 1.0])
    assert prepared.feature_norms[0] == (2.0, 6.0)


def test_onehot_rows():
    schema = DatasetSchema("t", "", [0, 1], ["x", "species"], [1, 4], [1, 1])
    rows = [["1", "setosa"], ["2", "versicolor"], ["3", "setosa"]]
    prepared = apply_schema(rows, schema)
    assert prepared.target_kind == "onehot"
    assert prepared.class_labels == ["setosa", "versicolor"]
    assert np.array_equal(prepared.target,
                          [[1, 0], [0, 1], [1, 0]])
    assert (prepared.target.sum(axis=1) == 1).all()


def test_degenerate_minmax_range():
    schema = DatasetSchema("t", "", [0], ["x"], [1], [2])
    with pytest.raises(DatasetError, match="degenerate normalization range"):
        apply_schema([["5"], ["5"], ["5"]], schema)


def test_non_numeric_feature_cell():
    schema = DatasetSchema("t", "", [0], ["x"], [1], [1])
    with pytest.raises(DatasetError, match="row 1.*non-numeric"):
        apply_schema([["1"], ["oops"]], schema)


def test_iris_preprocess_end_to_end(data_dir):
    rows = read_raw_csv(data_dir / "iris.csv")
    prepared = apply_schema(rows, iris_schema(), data_dir=data_dir)
    assert prepared.feature_matrix.shape == (150, 4)
    assert prepared.target_kind == "class"
    assert len(prepared.target) == 150
    assert (data_dir / "iris_preprocessed.csv").exists()
    header = (data_dir / "iris_preprocessed.csv").read_text().splitlines()[0]
    assert header.split(",")[0] == "Sepal length in cm"


def test_preprocessed_file_roundtrip(data_dir):
    schema = iris_schema()
    prepared = apply_schema(read_raw_csv(data_dir / "iris.csv"), schema,
                            data_dir=data_dir)
    again = load_preprocessed(schema, data_dir / "iris_preprocessed.csv")
    assert np.allclose(prepared.feature_matrix, again.feature_matrix)
    assert prepared.target == again.target


def test_minmax_idempotent_on_unit_range():
    """Applying MinMax twice is a no-op for columns already spanning [0,1]."""
    schema = DatasetSchema("t", "", [0], ["x"], [1], [2])
    rows = [["0"], ["0.25"], ["1"]]
    once = apply_schema(rows, schema)
    rows2 = [[str(v)] for v in once.feature_matrix[:, 0]]
    twice = apply_schema(rows2, schema)
    assert np.allclose(once.feature_matrix, twice.feature_matrix)


def test_resolve_dataset_chain(data_dir):
    iris_schema().save(data_dir / "iris.json")
    prepared = resolve_dataset("iris", data_dir)
    assert prepared.n_rows == 150
    assert (data_dir / "iris_preprocessed.csv").exists()
    # without schema or dialogue the dataset cannot be resolved
    with pytest.raises(DatasetError, match="preprocess it first"):
        resolve_dataset("iris2", data_dir)
    with pytest.raises(DatasetError, match="not found"):
        resolve_dataset("ghost", data_dir)


# --- split ----------------------------------------------------------------------

def _tiny_prepared(n=10):
    schema = DatasetSchema("t", "", [0, 1], ["a", "b"], [1, 2], [1, 1])
    rows = [[str(i), str(2 * i)] for i in range(n)]
    return apply_schema(rows, schema)


def test_split_sizes():
    parts = split(_tiny_prepared(10), ratio=0.8, seed=1)
    assert parts.train.n_rows == 8
    assert parts.test.n_rows == 2


def test_split_deterministic():
    a = split(_tiny_prepared(10), ratio=0.8, seed=1)
    b = split(_tiny_prepared(10), ratio=0.8, seed=1)
    assert np.array_equal(a.train_indices, b.train_indices)
    assert np.array_equal(a.test_indices, b.test_indices)


def test_split_is_partition():
    parts = split(_tiny_prepared(23), ratio=0.7, seed=3)
    combined = sorted(list(parts.train_indices) + list(parts.test_indices))
    assert combined == list(range(23))


def test_split_errors():
    with pytest.raises(DatasetError):
        split(_tiny_prepared(10), ratio=1.5, seed=1)
    with pytest.raises(DatasetError):
        split(_tiny_prepared(2).select_rows([0]), ratio=0.5, seed=1)
