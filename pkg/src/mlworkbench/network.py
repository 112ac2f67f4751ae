"""Feed-forward neural networks for classification and regression.

Plain numpy implementation: ReLU hidden layers, softmax cross-entropy or
mean squared error at the output, mini-batch training with the Adam
update rule.  The analytic gradients are exposed so they can be checked
against finite differences.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

REPRODUCTIBLE = "REPRODUCTIBLE"
RANDOM = "RANDOM"
REPRODUCTIBLE_SEED = 1


class NetworkError(ValueError):
    pass


@dataclass
class NetConfig:
    hidden: tuple = (32, 32)
    learning_rate: float = 0.01
    batch_size: int = 32
    max_epochs: int = 500
    patience: int = 10      # epochs without loss improvement before stopping
    tol: float = 1e-6


def init_params(layer_sizes, rng) -> list:
    """He-initialised weights, interleaved [W0, b0, W1, ...].

    Biases start at a small positive constant so no rectified unit sits
    exactly on its kink at init (an all-dead sample would otherwise push
    exact zeros through every later layer).
    """
    params = []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        params.append(rng.normal(0.0, np.sqrt(2.0 / fan_in), (fan_in, fan_out)))
        params.append(np.full(fan_out, 0.01))
    return params


def _forward(params, X):
    """Returns (pre-activations, activations); the last layer is linear."""
    zs, activations = [], [X]
    n_layers = len(params) // 2
    a = X
    for layer in range(n_layers):
        W, b = params[2 * layer], params[2 * layer + 1]
        z = a @ W + b
        zs.append(z)
        a = np.maximum(z, 0.0) if layer < n_layers - 1 else z
        activations.append(a)
    return zs, activations


def _softmax(logits):
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def network_output(params, X) -> np.ndarray:
    return _forward(params, np.asarray(X, dtype=float))[1][-1]


def network_loss(params, X, Y, kind: str) -> float:
    out = network_output(params, X)
    if kind == "classifier":
        probs = _softmax(out)
        n = X.shape[0]
        return float(-np.log(probs[np.arange(n), Y] + 1e-12).mean())
    return float(((out - Y) ** 2).mean())


def loss_and_gradients(params, X, Y, kind: str):
    """Loss plus the analytic gradient for every parameter array."""
    X = np.asarray(X, dtype=float)
    zs, activations = _forward(params, X)
    out = activations[-1]
    n = X.shape[0]

    if kind == "classifier":
        probs = _softmax(out)
        loss = float(-np.log(probs[np.arange(n), Y] + 1e-12).mean())
        delta = probs.copy()
        delta[np.arange(n), Y] -= 1.0
        delta /= n
    elif kind == "regressor":
        loss = float(((out - Y) ** 2).mean())
        delta = 2.0 * (out - Y) / out.size
    else:
        raise NetworkError(f"unknown network kind {kind!r}")

    grads = [None] * len(params)
    n_layers = len(params) // 2
    for layer in range(n_layers - 1, -1, -1):
        a_prev = activations[layer]
        grads[2 * layer] = a_prev.T @ delta
        grads[2 * layer + 1] = delta.sum(axis=0)
        if layer > 0:
            delta = delta @ params[2 * layer].T
            delta = delta * (zs[layer - 1] > 0)
    return loss, grads


def numerical_gradients(params, X, Y, kind: str, eps: float = 1e-5) -> list:
    """Central finite differences of the loss; the gradient-check oracle."""
    grads = []
    for p in params:
        g = np.zeros_like(p)
        flat_p, flat_g = p.ravel(), g.ravel()
        for i in range(flat_p.size):
            orig = flat_p[i]
            flat_p[i] = orig + eps
            lp = network_loss(params, X, Y, kind)
            flat_p[i] = orig - eps
            lm = network_loss(params, X, Y, kind)
            flat_p[i] = orig
            flat_g[i] = (lp - lm) / (2 * eps)
        grads.append(g)
    return grads


def _adam_step(params, grads, state, lr, t, beta1=0.9, beta2=0.999, eps=1e-8):
    for i, (p, g) in enumerate(zip(params, grads)):
        m, v = state[i]
        m[:] = beta1 * m + (1 - beta1) * g
        v[:] = beta2 * v + (1 - beta2) * g * g
        m_hat = m / (1 - beta1 ** t)
        v_hat = v / (1 - beta2 ** t)
        p -= lr * m_hat / (np.sqrt(v_hat) + eps)


def fit_network(X, Y, kind: str, layer_sizes, seed: Optional[int],
                config: NetConfig):
    """Mini-batch Adam training; returns (params, loss_history)."""
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    rng = np.random.default_rng(seed)
    params = init_params(layer_sizes, rng)
    state = [(np.zeros_like(p), np.zeros_like(p)) for p in params]

    history = []
    best = np.inf
    stale = 0
    t = 0
    batch = max(1, min(config.batch_size, n))
    for _epoch in range(config.max_epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch):
            idx = order[start:start + batch]
            _, grads = loss_and_gradients(params, X[idx], Y[idx], kind)
            t += 1
            _adam_step(params, grads, state, config.learning_rate, t)
        loss = network_loss(params, X, Y, kind)
        history.append(loss)
        if loss < best - config.tol:
            best = loss
            stale = 0
        else:
            stale += 1
            if stale >= config.patience:
                break
    return params, history


@dataclass
class SupervisedModel:
    kind: str                      # classifier | regressor
    layer_sizes: list
    params: list
    seed_policy: str
    classes: Optional[list] = None
    loss_history: list = field(default_factory=list)
    train_seconds: float = 0.0

    @property
    def input_dim(self) -> int:
        return self.layer_sizes[0]


def _seed_for(policy: str) -> Optional[int]:
    if policy == REPRODUCTIBLE:
        return REPRODUCTIBLE_SEED
    if policy == RANDOM:
        return None
    raise NetworkError(f"unknown seed policy {policy!r}")


def train_supervised(train, kind: str, seed_policy: str = REPRODUCTIBLE,
                     config: Optional[NetConfig] = None) -> SupervisedModel:
    """Train a classifier or regressor on a PreparedDataset.

    REPRODUCTIBLE fixes every stochastic choice from seed 1, making the
    run bit-deterministic; RANDOM draws a fresh seed.
    """
    config = config or NetConfig()
    X = np.asarray(train.feature_matrix, dtype=float)
    if X.size == 0:
        raise NetworkError("training set is empty")
    if not np.isfinite(X).all():
        raise NetworkError("features contain NaN or infinite values")

    classes = None
    if kind == "classifier":
        labels = _class_labels(train)
        classes = sorted(set(labels))
        if len(classes) < 2:
            raise NetworkError("classification needs at least 2 classes")
        index = {c: i for i, c in enumerate(classes)}
        Y = np.array([index[lab] for lab in labels])
        out_dim = len(classes)
    elif kind == "regressor":
        if train.target_kind != "regression":
            raise NetworkError("dataset has no regression value column")
        Y = np.asarray(train.target, dtype=float).reshape(-1, 1)
        out_dim = 1
    else:
        raise NetworkError(f"unknown network kind {kind!r}")

    layer_sizes = [X.shape[1], *config.hidden, out_dim]
    started = time.perf_counter()
    params, history = fit_network(X, Y, kind, layer_sizes,
                                  _seed_for(seed_policy), config)
    return SupervisedModel(
        kind=kind,
        layer_sizes=layer_sizes,
        params=params,
        seed_policy=seed_policy,
        classes=classes,
        loss_history=history,
        train_seconds=time.perf_counter() - started,
    )


def _class_labels(train) -> list:
    if train.target_kind == "class":
        return list(train.target)
    if train.target_kind == "onehot":
        ids = np.asarray(train.target).argmax(axis=1)
        return [train.class_labels[i] for i in ids]
    raise NetworkError("dataset has no class column")


def predict(model: SupervisedModel, test_vector, normalization_params=None):
    """Run one raw vector through the model.

    ``normalization_params`` is the PreparedDataset the model was trained
    from (or None when no normalization applies); its MinMax bounds are
    applied to the vector, and regression outputs are mapped back to the
    original target scale.
    """
    vector = np.asarray(test_vector, dtype=float)
    if vector.ndim != 1 or vector.shape[0] != model.input_dim:
        raise NetworkError(
            f"expected {model.input_dim} feature values, got {vector.shape[0]}")
    if normalization_params is not None:
        vector = normalization_params.transform_vector(vector)
    out = network_output(model.params, vector[None, :])[0]
    if model.kind == "classifier":
        return model.classes[int(out.argmax())]
    value = float(out[0])
    if normalization_params is not None and normalization_params.target_norm:
        lo, hi = normalization_params.target_norm
        value = value * (hi - lo) + lo
    return value


def score(model: SupervisedModel, X, target) -> float:
    """Accuracy for classifiers, R^2 for regressors."""
    out = network_output(model.params, X)
    if model.kind == "classifier":
        predicted = out.argmax(axis=1)
        index = {c: i for i, c in enumerate(model.classes)}
        truth = np.array([index[lab] for lab in target])
        return float((predicted == truth).mean())
    truth = np.asarray(target, dtype=float).reshape(-1, 1)
    ss_res = float(((out - truth) ** 2).sum())
    ss_tot = float(((truth - truth.mean()) ** 2).sum())
    if ss_tot == 0:
        return 0.0 if ss_res > 0 else 1.0
    return 1.0 - ss_res / ss_tot
