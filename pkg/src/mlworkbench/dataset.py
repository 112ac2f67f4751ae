"""Dataset schema elicitation, preprocessing and train/test splitting.

Each dataset is described once through a chatbot dialogue: per column a
label, a role (feature, regression value, class, one-hot class) and a
normalization method (none or min/max).  The description is persisted to
``<name>.json`` and the transformed data to ``<name>_preprocessed.csv``.
Raw CSV files carry no header row; the preprocessed file does.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .dialogue import Dialogue


class DatasetError(ValueError):
    pass


# Column roles (menu numbers shown in the preprocessing dialogue).
FEATURE = 1
REGRESSION = 2
CLASS = 3
CLASS_ONEHOT = 4

NORM_NONE = 1
NORM_MINMAX = 2

_TYPE_MENU = ("1. Feature 2. Predicted value 3. Class  "
              "4. Class (to be converted ONE-HOT for neural network)")
_NORM_MENU = "(1. None 2. MinMax)"


@dataclass
class DatasetSchema:
    """Per-column description of a dataset, persisted as JSON."""

    dataset_name: str
    dataset_description: str
    feat_no: list
    feat_label: list
    feat_type: list            # FEATURE / REGRESSION / CLASS / CLASS_ONEHOT
    feat_normalization: list   # NORM_NONE / NORM_MINMAX

    def __post_init__(self):
        n = len(self.feat_no)
        if not (len(self.feat_label) == len(self.feat_type)
                == len(self.feat_normalization) == n):
            raise DatasetError("schema lists must have equal length")
        if n == 0:
            raise DatasetError("dataset has no columns")
        if list(self.feat_no) != sorted(set(self.feat_no)) or self.feat_no[0] != 0 \
                or self.feat_no != list(range(n)):
            raise DatasetError("feat_no must be 0-based consecutive indices")
        if sum(1 for t in self.feat_type if t == REGRESSION) > 1:
            raise DatasetError("at most one regression value column")
        if sum(1 for t in self.feat_type if t in (CLASS, CLASS_ONEHOT)) > 1:
            raise DatasetError("at most one class column")
        for t in self.feat_type:
            if t not in (FEATURE, REGRESSION, CLASS, CLASS_ONEHOT):
                raise DatasetError(f"unknown column type {t}")
        for m in self.feat_normalization:
            if m not in (NORM_NONE, NORM_MINMAX):
                raise DatasetError(f"unknown normalization {m}")

    def __len__(self):
        return len(self.feat_no)

    def to_json_dict(self) -> dict:
        # Numeric codes are stored as strings, matching the on-disk layout.
        return {
            "dataset_name": self.dataset_name,
            "dataset_description": self.dataset_description,
            "feat_no": list(self.feat_no),
            "feat_label": list(self.feat_label),
            "feat_type": [str(t) for t in self.feat_type],
            "feat_normalization": [str(m) for m in self.feat_normalization],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "DatasetSchema":
        try:
            return cls(
                dataset_name=data["dataset_name"],
                dataset_description=data["dataset_description"],
                feat_no=[int(i) for i in data["feat_no"]],
                feat_label=list(data["feat_label"]),
                feat_type=[int(t) for t in data["feat_type"]],
                feat_normalization=[int(m) for m in data["feat_normalization"]],
            )
        except KeyError as exc:
            raise DatasetError(f"schema file missing field {exc}") from exc

    def save(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_json_dict(), indent=4) + "\n",
                        encoding="utf-8")
        return path

    @classmethod
    def load(cls, path) -> "DatasetSchema":
        path = Path(path)
        if not path.exists():
            raise DatasetError(f"schema file not found: {path}")
        return cls.from_json_dict(json.loads(path.read_text(encoding="utf-8")))


def read_raw_csv(path) -> list:
    """Read a raw (headerless) dataset file into a list of string rows."""
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"dataset file not found: {path}")
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]


def elicit_schema(dataset_name: str, dialogue: Dialogue,
                  data_dir, save: bool = True) -> DatasetSchema:
    """Build a DatasetSchema by asking the user about every column.

    Reads ``<data_dir>/<dataset_name>.csv`` for the column count and a
    sample value per column; invalid menu answers are re-asked.
    """
    data_dir = Path(data_dir)
    rows = read_raw_csv(data_dir / f"{dataset_name}.csv")
    if not rows or len(rows[0]) == 0:
        raise DatasetError("dataset has no columns")
    n_cols = len(rows[0])

    dialogue.say(f"Let us preprocess the {dataset_name} dataset. "
                 "Please, answer the following questions:")
    description = dialogue.ask(
        f"What is the description of the {dataset_name} dataset (ENTER to skip)?")

    labels, types, norms = [], [], []
    for i in range(n_cols):
        sample = rows[0][i]
        label = dialogue.ask(
            f"What is the name of the field {i}? (Value example: {sample})").strip()
        if not label:
            label = f"field {i}"
        types.append(_ask_menu(
            dialogue,
            f"What is the type of field {label}? ({_TYPE_MENU}",
            (FEATURE, REGRESSION, CLASS, CLASS_ONEHOT)))
        norms.append(_ask_menu(
            dialogue,
            f"What is the normalization applied to {label}? {_NORM_MENU}",
            (NORM_NONE, NORM_MINMAX)))
        labels.append(label)

    schema = DatasetSchema(dataset_name, description,
                           list(range(n_cols)), labels, types, norms)
    if save:
        dialogue.say("Saving dataset configuration...")
        path = schema.save(data_dir / f"{dataset_name}.json")
        dialogue.say(f"The configuration is saved to {path.name}")
    return schema


def _ask_menu(dialogue: Dialogue, prompt: str, allowed) -> int:
    while True:
        answer = dialogue.ask(prompt).strip()
        if answer.isdigit() and int(answer) in allowed:
            return int(answer)
        dialogue.say(f"Please answer with one of {', '.join(str(a) for a in allowed)}.")


# ---------------------------------------------------------------------------
# Preprocessing
# ---------------------------------------------------------------------------

@dataclass
class PreparedDataset:
    """Numeric dataset ready for the engines.

    ``feature_matrix`` holds the feature columns; the target (regression
    reals, class labels or a one-hot matrix) sits apart.  MinMax bounds
    are kept per feature so test vectors can be transformed consistently.
    """

    name: str
    feature_matrix: np.ndarray
    feature_names: list
    feature_norms: list                  # per feature: None or (min, max)
    target_kind: str = "none"            # none|regression|class|onehot
    target: Optional[object] = None
    target_name: Optional[str] = None
    target_norm: Optional[tuple] = None
    class_labels: list = field(default_factory=list)

    @property
    def n_rows(self) -> int:
        return self.feature_matrix.shape[0]

    @property
    def n_features(self) -> int:
        return self.feature_matrix.shape[1]

    @property
    def column_names(self) -> list:
        names = list(self.feature_names)
        if self.target_kind == "onehot":
            names += [f"{self.target_name}={c}" for c in self.class_labels]
        elif self.target_kind != "none":
            names.append(self.target_name)
        return names

    def class_vocabulary(self) -> list:
        if self.target_kind == "class":
            return sorted(set(self.target))
        if self.target_kind == "onehot":
            return list(self.class_labels)
        return []

    def transform_vector(self, values) -> np.ndarray:
        """Apply the stored per-feature MinMax bounds to a raw vector."""
        values = np.asarray(values, dtype=float)
        if values.shape != (self.n_features,):
            raise DatasetError(
                f"expected {self.n_features} feature values, got {values.shape[0]}")
        out = values.copy()
        for j, bounds in enumerate(self.feature_norms):
            if bounds is not None:
                lo, hi = bounds
                out[j] = (values[j] - lo) / (hi - lo)
        return out

    def select_rows(self, indices) -> "PreparedDataset":
        indices = np.asarray(indices, dtype=int)
        target = self.target
        if self.target_kind == "class":
            target = [self.target[i] for i in indices]
        elif target is not None:
            target = np.asarray(target)[indices]
        return PreparedDataset(
            name=self.name,
            feature_matrix=self.feature_matrix[indices],
            feature_names=self.feature_names,
            feature_norms=self.feature_norms,
            target_kind=self.target_kind,
            target=target,
            target_name=self.target_name,
            target_norm=self.target_norm,
            class_labels=self.class_labels,
        )


def apply_schema(raw_rows, schema: DatasetSchema,
                 data_dir=None) -> PreparedDataset:
    """Transform raw CSV rows according to the schema.

    MinMax columns are mapped with (x - min) / (max - min); one-hot class
    columns expand to one indicator column per distinct label in
    lexicographic order.  Normalization on class columns is ignored.
    When ``data_dir`` is given the result is persisted as
    ``<name>_preprocessed.csv``.
    """
    n_cols = len(schema)
    if not raw_rows:
        raise DatasetError("dataset has no rows")
    for r, row in enumerate(raw_rows):
        if len(row) != n_cols:
            raise DatasetError(
                f"row {r}: expected {n_cols} columns, got {len(row)}")

    feature_cols, feature_names, feature_norms = [], [], []
    target_kind, target, target_name, target_norm = "none", None, None, None
    class_labels: list = []

    for j in range(n_cols):
        ctype = schema.feat_type[j]
        label = schema.feat_label[j]
        if ctype in (FEATURE, REGRESSION):
            col = _numeric_column(raw_rows, j, label)
            bounds = None
            if schema.feat_normalization[j] == NORM_MINMAX:
                lo, hi = float(col.min()), float(col.max())
                if hi == lo:
                    raise DatasetError(
                        f"column {label!r}: degenerate normalization range "
                        f"(min = max = {lo})")
                col = (col - lo) / (hi - lo)
                bounds = (lo, hi)
            if ctype == FEATURE:
                feature_cols.append(col)
                feature_names.append(label)
                feature_norms.append(bounds)
            else:
                target_kind, target = "regression", col
                target_name, target_norm = label, bounds
        else:
            values = [row[j].strip() for row in raw_rows]
            if ctype == CLASS:
                target_kind, target, target_name = "class", values, label
            else:
                class_labels = sorted(set(values))
                onehot = np.zeros((len(values), len(class_labels)))
                index = {c: i for i, c in enumerate(class_labels)}
                for r, v in enumerate(values):
                    onehot[r, index[v]] = 1.0
                target_kind, target, target_name = "onehot", onehot, label

    if not feature_cols:
        raise DatasetError("schema defines no feature columns")
    prepared = PreparedDataset(
        name=schema.dataset_name,
        feature_matrix=np.column_stack(feature_cols),
        feature_names=feature_names,
        feature_norms=feature_norms,
        target_kind=target_kind,
        target=target,
        target_name=target_name,
        target_norm=target_norm,
        class_labels=class_labels,
    )
    if data_dir is not None:
        write_preprocessed(prepared, Path(data_dir) / f"{schema.dataset_name}_preprocessed.csv")
    return prepared


def _numeric_column(raw_rows, j, label) -> np.ndarray:
    out = np.empty(len(raw_rows))
    for r, row in enumerate(raw_rows):
        cell = row[j].strip()
        if cell == "" or cell.lower() == "nan":
            out[r] = np.nan
            continue
        try:
            out[r] = float(cell)
        except ValueError:
            raise DatasetError(
                f"row {r}, column {label!r}: non-numeric value {cell!r}") from None
    return out


def write_preprocessed(prepared: PreparedDataset, path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(prepared.column_names)
        for i in range(prepared.n_rows):
            row = [_fmt(v) for v in prepared.feature_matrix[i]]
            if prepared.target_kind == "regression":
                row.append(_fmt(prepared.target[i]))
            elif prepared.target_kind == "class":
                row.append(prepared.target[i])
            elif prepared.target_kind == "onehot":
                row.extend(_fmt(v) for v in prepared.target[i])
            writer.writerow(row)
    return path


def _fmt(v: float) -> str:
    return format(float(v), "g")


def load_preprocessed(schema: DatasetSchema, path) -> PreparedDataset:
    """Rebuild a PreparedDataset from a preprocessed CSV.

    Used when the raw file is gone; MinMax bounds are unknown in that
    case and test-vector transformation is unavailable.
    """
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"dataset file not found: {path}")
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [row for row in reader if row]

    feature_labels = [schema.feat_label[j] for j in range(len(schema))
                      if schema.feat_type[j] == FEATURE]
    n_feat = len(feature_labels)
    matrix = np.array([[float(c) for c in row[:n_feat]] for row in rows])

    target_kind, target, target_name = "none", None, None
    class_labels: list = []
    types = schema.feat_type
    if REGRESSION in types:
        j = types.index(REGRESSION)
        target_kind, target_name = "regression", schema.feat_label[j]
        target = np.array([float(row[n_feat]) for row in rows])
    elif CLASS in types:
        j = types.index(CLASS)
        target_kind, target_name = "class", schema.feat_label[j]
        target = [row[n_feat] for row in rows]
    elif CLASS_ONEHOT in types:
        j = types.index(CLASS_ONEHOT)
        target_kind, target_name = "onehot", schema.feat_label[j]
        class_labels = [h.split("=", 1)[1] for h in header[n_feat:]]
        target = np.array([[float(c) for c in row[n_feat:]] for row in rows])

    return PreparedDataset(
        name=schema.dataset_name,
        feature_matrix=matrix,
        feature_names=feature_labels,
        feature_norms=[None] * n_feat,
        target_kind=target_kind,
        target=target,
        target_name=target_name,
        class_labels=class_labels,
    )


def resolve_dataset(name: str, data_dir, dialogue: Optional[Dialogue] = None) -> PreparedDataset:
    """Locate a dataset following the preprocessing decision chain.

    Preferred source is the raw file plus its schema (recomputing the
    preprocessed CSV keeps normalization bounds available); a schema is
    elicited through the dialogue when none exists yet.  With only a
    preprocessed file on disk, that file is loaded as-is.
    """
    data_dir = Path(data_dir)
    schema_path = data_dir / f"{name}.json"
    raw_path = data_dir / f"{name}.csv"
    prep_path = data_dir / f"{name}_preprocessed.csv"

    if schema_path.exists():
        schema = DatasetSchema.load(schema_path)
    elif raw_path.exists():
        if dialogue is None:
            raise DatasetError(
                f"dataset {name!r} has no schema; preprocess it first")
        schema = elicit_schema(name, dialogue, data_dir)
    else:
        raise DatasetError(f"dataset file not found: {raw_path}")

    if raw_path.exists():
        return apply_schema(read_raw_csv(raw_path), schema, data_dir=data_dir)
    if prep_path.exists():
        return load_preprocessed(schema, prep_path)
    raise DatasetError(f"dataset file not found: {raw_path}")


# ---------------------------------------------------------------------------
# Splitting
# ---------------------------------------------------------------------------

@dataclass
class SplitDataset:
    train: PreparedDataset
    test: PreparedDataset
    ratio: float
    seed: int
    full: PreparedDataset = None
    train_indices: np.ndarray = None
    test_indices: np.ndarray = None


def split(prepared: PreparedDataset, ratio: float = 0.8,
          seed: int = 1) -> SplitDataset:
    """Seeded shuffle then partition; identical inputs give identical splits."""
    if not 0.0 < ratio < 1.0:
        raise DatasetError(f"split ratio must be in (0,1), got {ratio}")
    n = prepared.n_rows
    if n < 2:
        raise DatasetError("need at least 2 rows to split")
    order = np.random.default_rng(seed).permutation(n)
    n_train = min(max(int(round(n * ratio)), 1), n - 1)
    train_idx, test_idx = order[:n_train], order[n_train:]
    return SplitDataset(
        train=prepared.select_rows(train_idx),
        test=prepared.select_rows(test_idx),
        ratio=ratio,
        seed=seed,
        full=prepared,
        train_indices=train_idx,
        test_indices=test_idx,
    )
