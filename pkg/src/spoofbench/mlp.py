"""From-scratch multilayer perceptron for binary spoofing decisions.

Fully connected ReLU hidden layers feed a single logistic output unit; the
training loss is mean squared error between the (0,1) output and the 0/1
label, minimized with Adam. Inputs are standardized with statistics taken
from the training split; training stops early when validation MSE has not
improved for a fixed number of epochs, and the returned model is the
best-validation snapshot. Everything is deterministic given the seed.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

MODEL_FORMAT = "spoofbench-mlp"
MODEL_FORMAT_VERSION = 1

# Hyperparameter search space for full tuning runs.
GRID_LEARNING_RATES = (0.05, 0.01, 0.005, 0.001, 0.0005, 0.0001)
GRID_HIDDEN_LAYERS = (1, 2, 3, 4, 5, 6)
GRID_NEURONS = (8, 16, 32, 64, 96, 128)


@dataclass(frozen=True)
class MlpArchitecture:
    input_width: int
    hidden_layers: int
    neurons_per_hidden: int

    def __post_init__(self):
        if self.input_width < 1 or self.hidden_layers < 1 or self.neurons_per_hidden < 1:
            raise ValueError("architecture sizes must be >= 1")

    def layer_sizes(self) -> list[int]:
        return [self.input_width] + [self.neurons_per_hidden] * self.hidden_layers + [1]

    def parameter_count(self) -> int:
        sizes = self.layer_sizes()
        return sum(a * b + b for a, b in zip(sizes, sizes[1:]))


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float
    max_epochs: int = 500
    patience: int = 15
    batch_size: int = 32
    validation_fraction: float = 0.2
    rng_seed: int = 1

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.max_epochs < 1 or self.patience < 1 or self.batch_size < 1:
            raise ValueError("max_epochs, patience and batch_size must be >= 1")
        if not 0.0 < self.validation_fraction < 1.0:
            raise ValueError("validation_fraction must be in (0, 1)")


@dataclass(frozen=True)
class EpochStats:
    epoch: int  # 1-based
    train_mse: float
    val_mse: float
    val_accuracy: float


@dataclass
class MlpModel:
    architecture: MlpArchitecture
    weights: list[np.ndarray]  # per layer, shape (fan_in, fan_out)
    biases: list[np.ndarray]  # per layer, shape (fan_out,)
    norm_mean: np.ndarray
    norm_std: np.ndarray
    history: list[EpochStats]
    best_epoch: int = 0  # epoch of the snapshot held in weights/biases
    train_config: TrainConfig | None = None

    def __post_init__(self):
        sizes = self.architecture.layer_sizes()
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (sizes[k], sizes[k + 1]) or b.shape != (sizes[k + 1],):
                raise ValueError(f"layer {k} shapes do not chain the architecture")
        if np.any(self.norm_std <= 0):
            raise ValueError("norm_std entries must be > 0")

    @property
    def val_mse(self) -> float:
        return self.history[self.best_epoch - 1].val_mse

    @property
    def val_accuracy(self) -> float:
        return self.history[self.best_epoch - 1].val_accuracy


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    e = np.exp(z[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def init_model(
    architecture: MlpArchitecture,
    rng: np.random.Generator,
    norm_mean: np.ndarray | None = None,
    norm_std: np.ndarray | None = None,
) -> MlpModel:
    """Glorot-uniform weights (limit sqrt(6/(fan_in+fan_out))), zero biases."""
    sizes = architecture.layer_sizes()
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes, sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    if norm_mean is None:
        norm_mean = np.zeros(architecture.input_width)
    if norm_std is None:
        norm_std = np.ones(architecture.input_width)
    return MlpModel(
        architecture=architecture,
        weights=weights,
        biases=biases,
        norm_mean=np.asarray(norm_mean, dtype=float),
        norm_std=np.asarray(norm_std, dtype=float),
        history=[],
    )


def _forward_cached(
    weights: list[np.ndarray], biases: list[np.ndarray], x_norm: np.ndarray
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Pre-activations and activations per layer for normalized inputs."""
    zs: list[np.ndarray] = []
    activations = [x_norm]
    a = x_norm
    last = len(weights) - 1
    for k, (w, b) in enumerate(zip(weights, biases)):
        z = a @ w + b
        zs.append(z)
        a = _sigmoid(z) if k == last else np.maximum(z, 0.0)
        activations.append(a)
    return zs, activations


def _predict_norm(weights, biases, x_norm: np.ndarray) -> np.ndarray:
    _, activations = _forward_cached(weights, biases, x_norm)
    return activations[-1][:, 0]


def normalize(model: MlpModel, inputs: np.ndarray) -> np.ndarray:
    return (np.asarray(inputs, dtype=float) - model.norm_mean) / model.norm_std


def forward_batch(model: MlpModel, inputs: np.ndarray) -> np.ndarray:
    """Spoofing probabilities, one per input row."""
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    if inputs.shape[1] != model.architecture.input_width:
        raise ValueError(
            f"input width {inputs.shape[1]} != model width {model.architecture.input_width}"
        )
    return _predict_norm(model.weights, model.biases, normalize(model, inputs))


def forward(model: MlpModel, x) -> float:
    """Probability in (0, 1) that a single feature vector is spoofed."""
    return float(forward_batch(model, np.asarray(x, dtype=float).reshape(1, -1))[0])


def loss_mse(predictions, labels) -> float:
    p = np.asarray(predictions, dtype=float)
    y = np.asarray(labels, dtype=float)
    if len(p) == 0 or len(p) != len(y):
        raise ValueError("predictions and labels must be equal-length and non-empty")
    return float(np.mean((y - p) ** 2))


def accuracy(predictions, labels, cut: float = 0.5) -> float:
    """Fraction of correct spoofed/legitimate calls; positive means spoofed."""
    p = np.asarray(predictions, dtype=float)
    y = np.asarray(labels, dtype=float)
    if len(p) == 0 or len(p) != len(y):
        raise ValueError("predictions and labels must be equal-length and non-empty")
    return float(np.mean((p >= cut) == (y >= 0.5)))


def confusion_matrix(predictions, labels, cut: float = 0.5) -> dict[str, int]:
    p = np.asarray(predictions, dtype=float) >= cut
    y = np.asarray(labels, dtype=float) >= 0.5
    return {
        "tp": int(np.sum(p & y)),
        "fp": int(np.sum(p & ~y)),
        "fn": int(np.sum(~p & y)),
        "tn": int(np.sum(~p & ~y)),
    }


def backprop_gradients(
    model: MlpModel, inputs: np.ndarray, labels: np.ndarray
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Analytic gradients of the batch MSE w.r.t. every weight and bias.

    The ReLU subgradient at exactly 0 is taken as 0.
    """
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    y = np.asarray(labels, dtype=float)
    if len(y) == 0:
        raise ValueError("empty batch")
    x_norm = normalize(model, inputs)
    return _gradients(model.weights, model.biases, x_norm, y)


def _gradients(weights, biases, x_norm, y):
    zs, activations = _forward_cached(weights, biases, x_norm)
    y_hat = activations[-1][:, 0]
    n = len(y)
    # d(mean squared error)/d(logit) through the logistic output
    delta = (2.0 * (y_hat - y) / n * y_hat * (1.0 - y_hat))[:, None]
    grads_w = [np.empty(0)] * len(weights)
    grads_b = [np.empty(0)] * len(weights)
    for k in range(len(weights) - 1, -1, -1):
        grads_w[k] = activations[k].T @ delta
        grads_b[k] = delta.sum(axis=0)
        if k > 0:
            delta = (delta @ weights[k].T) * (zs[k - 1] > 0.0)
    return grads_w, grads_b


def _check_training_labels(labels: np.ndarray) -> None:
    values = set(np.unique(labels).tolist())
    if not values <= {0.0, 1.0}:
        raise ValueError(f"labels must be 0/1, got {sorted(values)}")
    if len(values) < 2:
        raise ValueError("dataset has a single class; cannot train a detector")


def train(
    architecture: MlpArchitecture,
    inputs: np.ndarray,
    labels: np.ndarray,
    config: TrainConfig,
) -> MlpModel:
    """Adam training with early stopping on validation MSE.

    Splits off config.validation_fraction of the rows for validation,
    standardizes inputs with training-split statistics, and returns the
    model snapshot from the epoch with the lowest validation MSE. The full
    per-epoch history stays attached to the returned model.
    """
    X = np.asarray(inputs, dtype=float)
    y = np.asarray(labels, dtype=float)
    if X.ndim != 2 or len(X) != len(y):
        raise ValueError("inputs must be (n, d) with one label per row")
    _check_training_labels(y)
    if X.shape[1] != architecture.input_width:
        raise ValueError(
            f"dataset width {X.shape[1]} != architecture input width {architecture.input_width}"
        )
    rng = np.random.default_rng(config.rng_seed)
    perm = rng.permutation(len(X))
    n_val = max(1, int(round(config.validation_fraction * len(X))))
    if n_val >= len(X):
        raise ValueError("validation split leaves no training rows")
    val_idx, train_idx = perm[:n_val], perm[n_val:]
    X_train, y_train = X[train_idx], y[train_idx]
    X_val, y_val = X[val_idx], y[val_idx]

    norm_mean = X_train.mean(axis=0)
    norm_std = X_train.std(axis=0)
    norm_std[norm_std == 0.0] = 1.0
    Xt = (X_train - norm_mean) / norm_std
    Xv = (X_val - norm_mean) / norm_std

    model = init_model(architecture, rng, norm_mean, norm_std)
    weights, biases = model.weights, model.biases
    m_w = [np.zeros_like(w) for w in weights]
    v_w = [np.zeros_like(w) for w in weights]
    m_b = [np.zeros_like(b) for b in biases]
    v_b = [np.zeros_like(b) for b in biases]
    step = 0

    history: list[EpochStats] = []
    best_val = np.inf
    best_epoch = 0
    best_weights = [w.copy() for w in weights]
    best_biases = [b.copy() for b in biases]
    bad_epochs = 0

    for epoch in range(1, config.max_epochs + 1):
        order = rng.permutation(len(Xt))
        for lo in range(0, len(order), config.batch_size):
            batch = order[lo : lo + config.batch_size]
            grads_w, grads_b = _gradients(weights, biases, Xt[batch], y_train[batch])
            step += 1
            corr1 = 1.0 - ADAM_BETA1**step
            corr2 = 1.0 - ADAM_BETA2**step
            for k in range(len(weights)):
                for p, g, m, v in (
                    (weights[k], grads_w[k], m_w[k], v_w[k]),
                    (biases[k], grads_b[k], m_b[k], v_b[k]),
                ):
                    m *= ADAM_BETA1
                    m += (1.0 - ADAM_BETA1) * g
                    v *= ADAM_BETA2
                    v += (1.0 - ADAM_BETA2) * g * g
                    p -= config.learning_rate * (m / corr1) / (np.sqrt(v / corr2) + ADAM_EPS)

        train_pred = _predict_norm(weights, biases, Xt)
        val_pred = _predict_norm(weights, biases, Xv)
        val_mse = loss_mse(val_pred, y_val)
        history.append(
            EpochStats(
                epoch=epoch,
                train_mse=loss_mse(train_pred, y_train),
                val_mse=val_mse,
                val_accuracy=accuracy(val_pred, y_val),
            )
        )
        if val_mse < best_val:
            best_val = val_mse
            best_epoch = epoch
            best_weights = [w.copy() for w in weights]
            best_biases = [b.copy() for b in biases]
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs >= config.patience:
                break

    return MlpModel(
        architecture=architecture,
        weights=best_weights,
        biases=best_biases,
        norm_mean=norm_mean,
        norm_std=norm_std,
        history=history,
        best_epoch=best_epoch,
        train_config=config,
    )


@dataclass(frozen=True)
class GridResult:
    learning_rate: float
    hidden_layers: int
    neurons: int
    param_count: int
    epochs_run: int
    best_epoch: int
    val_mse: float
    val_accuracy: float


@dataclass
class TuneResult:
    best_model: MlpModel
    best_index: int
    results: list[GridResult]


def selection_key(result: GridResult) -> tuple:
    """Lower is better: validation MSE, then accuracy (desc), then size."""
    return (result.val_mse, -result.val_accuracy, result.param_count)


def tune(
    inputs: np.ndarray,
    labels: np.ndarray,
    base_config: TrainConfig,
    learning_rates=GRID_LEARNING_RATES,
    hidden_layers=GRID_HIDDEN_LAYERS,
    neurons=GRID_NEURONS,
    jobs: int = 1,
) -> TuneResult:
    """Train every (learning rate, depth, width) combination and keep the
    best by validation MSE; ties go to the higher validation accuracy, then
    to the smaller parameter count, then to grid order."""
    X = np.asarray(inputs, dtype=float)
    combos = [
        (lr, depth, width)
        for lr in learning_rates
        for depth in hidden_layers
        for width in neurons
    ]
    if not combos:
        raise ValueError("empty hyperparameter grid")

    def run(combo):
        lr, depth, width = combo
        arch = MlpArchitecture(X.shape[1], depth, width)
        model = train(arch, X, labels, replace(base_config, learning_rate=lr))
        result = GridResult(
            learning_rate=lr,
            hidden_layers=depth,
            neurons=width,
            param_count=arch.parameter_count(),
            epochs_run=len(model.history),
            best_epoch=model.best_epoch,
            val_mse=model.val_mse,
            val_accuracy=model.val_accuracy,
        )
        return result, model

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = pool.map(run, combos)
            results = []
            best_model, best_index = None, -1
            for i, (result, model) in enumerate(outcomes):
                results.append(result)
                if best_index < 0 or selection_key(result) < selection_key(results[best_index]):
                    best_model, best_index = model, i
    else:
        results = []
        best_model, best_index = None, -1
        for i, combo in enumerate(combos):
            result, model = run(combo)
            results.append(result)
            if best_index < 0 or selection_key(result) < selection_key(results[best_index]):
                best_model, best_index = model, i
    return TuneResult(best_model=best_model, best_index=best_index, results=results)


def save_model(model: MlpModel, path, meta: dict | None = None) -> None:
    """Versioned JSON: architecture, row-major weights, normalization stats,
    per-epoch history and any caller metadata."""
    doc = {
        "format": MODEL_FORMAT,
        "format_version": MODEL_FORMAT_VERSION,
        "architecture": asdict(model.architecture),
        "weights": [w.tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
        "norm_mean": model.norm_mean.tolist(),
        "norm_std": model.norm_std.tolist(),
        "best_epoch": model.best_epoch,
        "train_config": asdict(model.train_config) if model.train_config else None,
        "history": [
            [s.epoch, s.train_mse, s.val_mse, s.val_accuracy] for s in model.history
        ],
        "meta": meta or {},
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")


def load_model(path) -> tuple[MlpModel, dict]:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError(f"{path}: not a {MODEL_FORMAT} file")
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported format version {doc.get('format_version')}")
    model = MlpModel(
        architecture=MlpArchitecture(**doc["architecture"]),
        weights=[np.asarray(w, dtype=float) for w in doc["weights"]],
        biases=[np.asarray(b, dtype=float) for b in doc["biases"]],
        norm_mean=np.asarray(doc["norm_mean"], dtype=float),
        norm_std=np.asarray(doc["norm_std"], dtype=float),
        history=[
            EpochStats(epoch=int(e), train_mse=t, val_mse=v, val_accuracy=a)
            for e, t, v, a in doc["history"]
        ],
        best_epoch=int(doc["best_epoch"]),
        train_config=TrainConfig(**doc["train_config"]) if doc.get("train_config") else None,
    )
    return model, doc.get("meta", {})


def write_history_csv(history: list[EpochStats], path) -> None:
    lines = ["epoch,train_mse,val_mse,val_accuracy"]
    for s in history:
        lines.append(f"{s.epoch},{s.train_mse!r},{s.val_mse!r},{s.val_accuracy!r}")
    Path(path).write_text("\n".join(lines) + "\n")
