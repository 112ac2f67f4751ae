"""Footprint forecasting and the pre-launch confirmation gate.

Before a request runs, a regressor trained on the request history
predicts its duration and CO2 emissions, a clustering pass collects
similar past requests, and the user decides whether to launch at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cluster import kmeans
from .dialogue import Dialogue
from .ledger import Ledger
from .network import NetConfig, fit_network, network_output

MIN_TRAINING_RECORDS = 50
PREDICTOR_CONFIG = NetConfig(hidden=(25, 25, 25, 25, 25),
                             learning_rate=3e-3,
                             batch_size=32,
                             max_epochs=400,
                             patience=25)
MAX_SIMILAR = 10
MAX_CLUSTERS = 20


@dataclass
class FootprintEstimate:
    duration_s: float
    emissions_kg: float
    trained_on: int


def _vocabulary(records, extra=None) -> list:
    names = {r.algorithm for r in records}
    if extra:
        names.add(extra)
    return sorted(names)


def _featurise(algorithm, n_rows, n_fields, vocabulary) -> np.ndarray:
    onehot = [1.0 if algorithm == name else 0.0 for name in vocabulary]
    return np.array(onehot + [float(n_rows), float(n_fields)])


def _standardise(matrix):
    mean = matrix.mean(axis=0)
    std = matrix.std(axis=0)
    std = np.where(std > 0, std, 1.0)
    return (matrix - mean) / std, mean, std


def _train_predictor(records):
    vocabulary = _vocabulary(records)
    X = np.vstack([_featurise(r.algorithm, r.n_rows, r.n_fields, vocabulary)
                   for r in records])
    Y = np.array([[r.duration_s, r.emissions_kg] for r in records])
    Xs, x_mean, x_std = _standardise(X)
    Ys, y_mean, y_std = _standardise(Y)
    layer_sizes = [Xs.shape[1], *PREDICTOR_CONFIG.hidden, 2]
    params, _ = fit_network(Xs, Ys, "regressor", layer_sizes, seed=1,
                            config=PREDICTOR_CONFIG)
    return {
        "params": params,
        "vocabulary": vocabulary,
        "x_mean": x_mean, "x_std": x_std,
        "y_mean": y_mean, "y_std": y_std,
        "trained_on": len(records),
    }


def predict_footprint(algorithm: str, n_rows: int, n_fields: int,
                      ledger: Ledger) -> Optional[FootprintEstimate]:
    """Forecast duration and emissions from the request history.

    Returns None (estimate unavailable) while the ledger holds fewer
    than MIN_TRAINING_RECORDS records.  The trained predictor is cached
    on the ledger and invalidated by appends.
    """
    records = ledger.records()
    if len(records) < MIN_TRAINING_RECORDS:
        return None

    model = ledger.cache.get("footprint_predictor")
    if model is None:
        model = _train_predictor(records)
        ledger.cache["footprint_predictor"] = model

    x = _featurise(algorithm, n_rows, n_fields, model["vocabulary"])
    xs = (x - model["x_mean"]) / model["x_std"]
    ys = network_output(model["params"], xs[None, :])[0]
    duration, emissions = ys * model["y_std"] + model["y_mean"]
    return FootprintEstimate(
        duration_s=max(0.0, float(duration)),
        emissions_kg=max(0.0, float(emissions)),
        trained_on=model["trained_on"],
    )


def similar_requests(prospective: tuple, ledger: Ledger,
                     n_clusters: Optional[int] = None) -> list:
    """Past requests landing in the prospective request's cluster.

    `prospective` is (algorithm, dataset_name, n_rows, n_fields).  The
    request vectors (algorithm one-hot, n_rows, n_fields) are z-scored
    and clustered together with the prospective one; members of its
    cluster come back most recent first, capped at MAX_SIMILAR.
    """
    records = ledger.records()
    if not records:
        return []
    algorithm, _dataset, n_rows, n_fields = prospective

    vocabulary = _vocabulary(records, extra=algorithm)
    X = np.vstack(
        [_featurise(r.algorithm, r.n_rows, r.n_fields, vocabulary)
         for r in records]
        + [_featurise(algorithm, n_rows, n_fields, vocabulary)])
    Xs, _, _ = _standardise(X)

    if n_clusters is None:
        n_clusters = math.ceil(math.sqrt(len(records) // 2))
    n_clusters = max(1, min(n_clusters, MAX_CLUSTERS, Xs.shape[0]))

    result = kmeans(Xs, n_clusters, seed=1)
    target = result.assignments[-1]
    hits = [records[i] for i in range(len(records))
            if result.assignments[i] == target]
    hits.reverse()
    return hits[:MAX_SIMILAR]


def gate_lines(estimate: Optional[FootprintEstimate], similar) -> list:
    """The gate text, one line per entry (see the chatbot transcript)."""
    lines = []
    if estimate is not None:
        lines.append(f"Predicted execution time (in sec): {estimate.duration_s:.3f}")
        lines.append(f"Predicted generated GHG: {estimate.emissions_kg:.3e} kg CO2")
    else:
        lines.append("No footprint estimate available yet "
                     "(request history too small).")
    if similar:
        lines.append("")
        lines.append("Here are the most similar requests in case launching "
                     "another request can be avoided. ")
        for record in similar:
            lines.append(f"   Request {record.request_id} "
                         f"using dataset {record.dataset_name}")
    return lines


def confirm_gate(estimate: Optional[FootprintEstimate], similar,
                 dialogue: Dialogue, auto_confirm: bool = False) -> bool:
    """Show the forecast and similar requests, then ask launch y/n.

    Returns True to launch.  Unrecognised input is re-asked;
    auto_confirm skips the prompt entirely (non-interactive runs).
    """
    for line in gate_lines(estimate, similar):
        dialogue.say(line)
    if auto_confirm:
        return True
    while True:
        answer = dialogue.ask("Launch the request (y/n)? ").strip().lower()
        if answer in ("y", "yes"):
            return True
        if answer in ("n", "no"):
            return False
        dialogue.say("Please answer y or n.")
