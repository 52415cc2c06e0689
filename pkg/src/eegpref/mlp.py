"""Dense feed-forward network for binary classification, from scratch.

Architecture: relu hidden layers (128 and 32 units by default) feeding a
single sigmoid output trained with mean binary cross-entropy. Everything
is float64 numpy with seeded, sequential updates, so a fixed seed and
config give bit-identical parameters, history, and predictions. Backprop
is validated against central finite differences by `grad_check`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    BadParameterError,
    CorruptModelError,
    DivergenceError,
    EmptyTrainSetError,
    NonFiniteError,
    ShapeError,
    VersionMismatchError,
)
from .rng import Rng64
from .signals import Label

MODEL_FORMAT_VERSION = 1
PROB_CLIP = 1e-7
_GRAD_CHECK_MAX_PARAMS = 10_000

_ACTIVATIONS = ("relu", "sigmoid")


@dataclass(frozen=True)
class LayerSpec:
    input_dim: int
    output_dim: int
    activation: str

    def __post_init__(self) -> None:
        if self.input_dim < 1 or self.output_dim < 1:
            raise BadParameterError(
                f"layer dims must be >= 1, got {self.input_dim}->{self.output_dim}"
            )
        if self.activation not in _ACTIVATIONS:
            raise BadParameterError(f"unknown activation {self.activation!r}")


def _sigmoid(z: np.ndarray) -> np.ndarray:
    # Piecewise form avoids overflow in exp for large |z|.
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _apply_activation(z: np.ndarray, activation: str) -> np.ndarray:
    if activation == "relu":
        return np.maximum(z, 0.0)
    return _sigmoid(z)


class MlpModel:
    """Layer specs plus per-layer weight matrices (out x in) and biases.

    Immutable in spirit: inference never mutates parameters, so a shared
    model is safe to use from multiple threads. Training works on its own
    copy.
    """

    def __init__(
        self,
        layers: list[LayerSpec],
        weights: list[np.ndarray],
        biases: list[np.ndarray],
        format_version: int = MODEL_FORMAT_VERSION,
    ) -> None:
        if not layers:
            raise BadParameterError("model needs at least one layer")
        if len(weights) != len(layers) or len(biases) != len(layers):
            raise ShapeError("one weight matrix and bias vector per layer required")
        for i, (spec, w, b) in enumerate(zip(layers, weights, biases)):
            if w.shape != (spec.output_dim, spec.input_dim):
                raise ShapeError(
                    f"layer {i}: weight shape {w.shape} != "
                    f"({spec.output_dim}, {spec.input_dim})"
                )
            if b.shape != (spec.output_dim,):
                raise ShapeError(f"layer {i}: bias shape {b.shape}")
            if i > 0 and spec.input_dim != layers[i - 1].output_dim:
                raise ShapeError(
                    f"layer {i}: input dim {spec.input_dim} does not chain from "
                    f"previous output dim {layers[i - 1].output_dim}"
                )
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise NonFiniteError(f"layer {i}: non-finite parameter")
        if layers[-1].output_dim != 1 or layers[-1].activation != "sigmoid":
            raise BadParameterError("final layer must be a single sigmoid unit")
        self.layers = list(layers)
        self.weights = [np.asarray(w, dtype=np.float64) for w in weights]
        self.biases = [np.asarray(b, dtype=np.float64) for b in biases]
        self.format_version = format_version

    @property
    def input_dim(self) -> int:
        return self.layers[0].input_dim

    @property
    def parameter_count(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def copy(self) -> "MlpModel":
        return MlpModel(
            layers=list(self.layers),
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            format_version=self.format_version,
        )

    def _check_batch(self, batch: np.ndarray) -> np.ndarray:
        x = np.asarray(batch, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.input_dim:
            raise ShapeError(
                f"batch must be (n, {self.input_dim}), got {x.shape}"
            )
        if not np.all(np.isfinite(x)):
            raise NonFiniteError("non-finite value in input batch")
        return x

    def _activations(self, batch: np.ndarray) -> list[np.ndarray]:
        """Forward pass keeping every layer's activation (index 0: input)."""
        acts = [batch]
        for spec, w, b in zip(self.layers, self.weights, self.biases):
            z = acts[-1] @ w.T + b
            acts.append(_apply_activation(z, spec.activation))
        return acts

    def forward(self, batch) -> np.ndarray:
        """Probabilities in (0, 1), one per batch row."""
        x = self._check_batch(batch)
        probs = self._activations(x)[-1][:, 0]
        if not np.all(np.isfinite(probs)):
            raise NonFiniteError("non-finite activation in forward pass")
        return probs

    def predict_labels(self, batch, threshold: float = 0.5) -> list[Label]:
        """Threshold rule: p >= threshold is Like (ties go to Like)."""
        probs = self.forward(batch)
        return [Label.LIKE if p >= threshold else Label.DISLIKE for p in probs]


def init_mlp(input_dim: int, hidden: list[int], seed: int) -> MlpModel:
    """He-normal weights for relu layers, Xavier for the sigmoid output,
    zero biases; all draws come from the seeded fixed generator."""
    if input_dim < 1:
        raise BadParameterError(f"input_dim must be >= 1, got {input_dim}")
    if any(h < 1 for h in hidden):
        raise BadParameterError(f"hidden dims must be >= 1, got {hidden}")
    dims = [input_dim] + list(hidden) + [1]
    layers = [
        LayerSpec(dims[i], dims[i + 1], "relu" if i < len(hidden) else "sigmoid")
        for i in range(len(dims) - 1)
    ]
    rng = Rng64(seed)
    weights, biases = [], []
    for spec in layers:
        gain = 2.0 if spec.activation == "relu" else 1.0
        std = math.sqrt(gain / spec.input_dim)
        draws = rng.normals(spec.output_dim * spec.input_dim)
        weights.append(
            std * np.asarray(draws).reshape(spec.output_dim, spec.input_dim)
        )
        biases.append(np.zeros(spec.output_dim))
    return MlpModel(layers=layers, weights=weights, biases=biases)


def _clip_probs(probs: np.ndarray) -> np.ndarray:
    return np.clip(probs, PROB_CLIP, 1.0 - PROB_CLIP)


def bce_loss(probabilities, targets) -> float:
    """Mean binary cross-entropy with probabilities clipped away from 0/1."""
    p = np.asarray(probabilities, dtype=np.float64)
    y = np.asarray(targets, dtype=np.float64)
    if p.shape != y.shape or p.ndim != 1:
        raise ShapeError(f"probabilities {p.shape} vs targets {y.shape}")
    if p.size == 0:
        raise ShapeError("empty batch")
    p = _clip_probs(p)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


def backward(
    model: MlpModel, batch, targets
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Exact gradients of mean BCE w.r.t. every weight and bias.

    Returns one (dW, db) pair per layer. The sigmoid output folds with
    the loss, so the output preactivation gradient is (p - y) / n.
    """
    x = model._check_batch(batch)
    y = np.asarray(targets, dtype=np.float64).reshape(-1)
    if y.size != x.shape[0]:
        raise ShapeError(f"{x.shape[0]} rows but {y.size} targets")
    acts = model._activations(x)
    n = x.shape[0]

    delta = (acts[-1] - y[:, None]) / n  # (p - y)/n at the output preactivation
    grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(model.layers)
    for i in range(len(model.layers) - 1, -1, -1):
        grads[i] = (delta.T @ acts[i], delta.sum(axis=0))
        if i > 0:
            delta = delta @ model.weights[i]
            prev_act = acts[i]
            if model.layers[i - 1].activation == "relu":
                delta = delta * (prev_act > 0.0)
            else:
                delta = delta * prev_act * (1.0 - prev_act)
    return grads


def grad_check(model: MlpModel, batch, targets, h: float = 1e-5) -> float:
    """Max relative error between backprop and central finite differences.

    Relative error per parameter is |ga - gn| / max(|ga|, |gn|, 1e-8).
    Guarded to models of at most 10^4 parameters.
    """
    if model.parameter_count > _GRAD_CHECK_MAX_PARAMS:
        raise BadParameterError(
            f"grad_check is for small models (<= {_GRAD_CHECK_MAX_PARAMS} params)"
        )
    x = model._check_batch(batch)
    y = np.asarray(targets, dtype=np.float64).reshape(-1)
    analytic = backward(model, x, y)
    probe = model.copy()

    worst = 0.0
    for i in range(len(probe.layers)):
        for arrays, grad in ((probe.weights, analytic[i][0]), (probe.biases, analytic[i][1])):
            arr = arrays[i]
            flat = arr.reshape(-1)
            gflat = grad.reshape(-1)
            for j in range(flat.size):
                original = flat[j]
                flat[j] = original + h
                loss_hi = bce_loss(probe.forward(x), y)
                flat[j] = original - h
                loss_lo = bce_loss(probe.forward(x), y)
                flat[j] = original
                numeric = (loss_hi - loss_lo) / (2.0 * h)
                denom = max(abs(gflat[j]), abs(numeric), 1e-8)
                worst = max(worst, abs(gflat[j] - numeric) / denom)
    return worst


@dataclass(frozen=True)
class TrainConfig:
    """Optimization knobs. The defaults are Adam(0.9, 0.999, 1e-8),
    lr 1e-3, batch 32, 100 epochs, early-stop patience 10."""

    learning_rate: float = 1e-3
    epochs: int = 100
    batch_size: int = 32
    optimizer: str = "adam"
    momentum: float = 0.0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    early_stop_patience: int = 10
    seed: int = 0

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise BadParameterError("learning_rate must be positive")
        if self.epochs < 1 or self.batch_size < 1:
            raise BadParameterError("epochs and batch_size must be >= 1")
        if self.optimizer not in ("adam", "sgd"):
            raise BadParameterError(f"unknown optimizer {self.optimizer!r}")
        if not (0.0 <= self.momentum < 1.0):
            raise BadParameterError("momentum must be in [0, 1)")
        if self.early_stop_patience < 0:
            raise BadParameterError("early_stop_patience must be >= 0")


@dataclass
class TrainHistory:
    """Per-epoch curves; best_epoch is a 0-based index into them."""

    train_loss: list[float] = field(default_factory=list)
    train_accuracy: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    val_accuracy: list[float] = field(default_factory=list)
    best_epoch: int = 0

    def to_dict(self) -> dict:
        return {
            "train_loss": self.train_loss,
            "train_accuracy": self.train_accuracy,
            "val_loss": self.val_loss,
            "val_accuracy": self.val_accuracy,
            "best_epoch": self.best_epoch,
        }


def _accuracy(probs: np.ndarray, y: np.ndarray) -> float:
    return float(np.mean((probs >= 0.5) == (y >= 0.5)))


class _Optimizer:
    def __init__(self, model: MlpModel, config: TrainConfig) -> None:
        self.config = config
        params = [(w, b) for w, b in zip(model.weights, model.biases)]
        self.slot1 = [
            (np.zeros_like(w), np.zeros_like(b)) for w, b in params
        ]  # sgd velocity / adam first moment
        if config.optimizer == "adam":
            self.slot2 = [(np.zeros_like(w), np.zeros_like(b)) for w, b in params]
        self.t = 0

    def step(self, model: MlpModel, grads) -> None:
        cfg = self.config
        if cfg.optimizer == "sgd":
            for i, (gw, gb) in enumerate(grads):
                vw, vb = self.slot1[i]
                vw *= cfg.momentum
                vw += gw
                vb *= cfg.momentum
                vb += gb
                model.weights[i] -= cfg.learning_rate * vw
                model.biases[i] -= cfg.learning_rate * vb
            return
        self.t += 1
        bias1 = 1.0 - cfg.beta1**self.t
        bias2 = 1.0 - cfg.beta2**self.t
        for i, (gw, gb) in enumerate(grads):
            mw, mb = self.slot1[i]
            vw, vb = self.slot2[i]
            mw *= cfg.beta1
            mw += (1.0 - cfg.beta1) * gw
            mb *= cfg.beta1
            mb += (1.0 - cfg.beta1) * gb
            vw *= cfg.beta2
            vw += (1.0 - cfg.beta2) * gw * gw
            vb *= cfg.beta2
            vb += (1.0 - cfg.beta2) * gb * gb
            model.weights[i] -= cfg.learning_rate * (mw / bias1) / (
                np.sqrt(vw / bias2) + cfg.eps
            )
            model.biases[i] -= cfg.learning_rate * (mb / bias1) / (
                np.sqrt(vb / bias2) + cfg.eps
            )


def train(
    model: MlpModel,
    train_set: tuple[np.ndarray, np.ndarray],
    val_set: tuple[np.ndarray, np.ndarray] | None,
    config: TrainConfig,
) -> tuple[MlpModel, TrainHistory]:
    """Seeded mini-batch training; returns the trained model and history.

    The input model is never mutated. With early stopping enabled
    (patience > 0, requires a validation set) the returned parameters are
    the ones from the best validation-loss epoch.
    """
    x_train = np.asarray(train_set[0], dtype=np.float64)
    y_train = np.asarray(train_set[1], dtype=np.float64).reshape(-1)
    if x_train.ndim != 2 or x_train.shape[0] == 0:
        raise EmptyTrainSetError("training set is empty")
    if y_train.size != x_train.shape[0]:
        raise ShapeError(f"{x_train.shape[0]} rows but {y_train.size} targets")

    have_val = val_set is not None and np.asarray(val_set[0]).size > 0
    if have_val:
        x_val = np.asarray(val_set[0], dtype=np.float64)
        y_val = np.asarray(val_set[1], dtype=np.float64).reshape(-1)
        if y_val.size != x_val.shape[0]:
            raise ShapeError("validation rows/targets mismatch")
    patience = config.early_stop_patience
    if patience > 0 and not have_val:
        raise BadParameterError(
            "early stopping needs a validation set (or set patience to 0)"
        )

    model = model.copy()
    optimizer = _Optimizer(model, config)
    rng = Rng64(config.seed)
    history = TrainHistory()
    n = x_train.shape[0]

    best_val_loss = math.inf
    best_params: tuple[list[np.ndarray], list[np.ndarray]] | None = None
    wait = 0

    for epoch in range(config.epochs):
        order = list(range(n))
        rng.shuffle(order)
        for start in range(0, n, config.batch_size):
            rows = order[start : start + config.batch_size]
            grads = backward(model, x_train[rows], y_train[rows])
            optimizer.step(model, grads)

        try:
            train_probs = model.forward(x_train)
        except NonFiniteError as exc:
            raise DivergenceError(f"training diverged at epoch {epoch}: {exc}") from exc
        epoch_loss = bce_loss(train_probs, y_train)
        history.train_loss.append(epoch_loss)
        history.train_accuracy.append(_accuracy(train_probs, y_train))
        if not math.isfinite(epoch_loss):
            raise DivergenceError(f"non-finite training loss at epoch {epoch}")

        if have_val:
            try:
                val_probs = model.forward(x_val)
            except NonFiniteError as exc:
                raise DivergenceError(
                    f"validation diverged at epoch {epoch}: {exc}"
                ) from exc
            val_loss = bce_loss(val_probs, y_val)
            history.val_loss.append(val_loss)
            history.val_accuracy.append(_accuracy(val_probs, y_val))
            if not math.isfinite(val_loss):
                raise DivergenceError(f"non-finite validation loss at epoch {epoch}")
            if val_loss < best_val_loss:
                best_val_loss = val_loss
                history.best_epoch = epoch
                wait = 0
                if patience > 0:
                    best_params = (
                        [w.copy() for w in model.weights],
                        [b.copy() for b in model.biases],
                    )
            else:
                wait += 1
                if patience > 0 and wait >= patience:
                    break
        else:
            history.best_epoch = epoch

    if patience > 0 and best_params is not None:
        model.weights = best_params[0]
        model.biases = best_params[1]
    return model, history


def save_model(model: MlpModel, path: Path | str) -> None:
    """Serialize to the versioned JSON format at full float precision."""
    doc = {
        "format_version": model.format_version,
        "layers": [
            {
                "rows": spec.output_dim,
                "cols": spec.input_dim,
                "activation": spec.activation,
                "w": [float(v) for v in w.reshape(-1)],  # row-major
                "b": [float(v) for v in b],
            }
            for spec, w, b in zip(model.layers, model.weights, model.biases)
        ],
    }
    Path(path).write_text(json.dumps(doc, separators=(",", ":")), encoding="utf-8")


def load_model(path: Path | str) -> MlpModel:
    """Read a model file back; never returns a partial model."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CorruptModelError(f"{path}: unreadable model file: {exc}") from exc
    if not isinstance(doc, dict) or "format_version" not in doc:
        raise CorruptModelError(f"{path}: missing format_version")
    if doc["format_version"] != MODEL_FORMAT_VERSION:
        raise VersionMismatchError(
            f"{path}: format_version {doc['format_version']!r}, "
            f"this build reads {MODEL_FORMAT_VERSION}"
        )
    try:
        layers, weights, biases = [], [], []
        for entry in doc["layers"]:
            rows, cols = int(entry["rows"]), int(entry["cols"])
            w = np.asarray(entry["w"], dtype=np.float64)
            b = np.asarray(entry["b"], dtype=np.float64)
            if w.size != rows * cols or b.size != rows:
                raise CorruptModelError(
                    f"{path}: layer parameter counts do not match rows/cols"
                )
            layers.append(LayerSpec(cols, rows, str(entry["activation"])))
            weights.append(w.reshape(rows, cols))
            biases.append(b)
        return MlpModel(layers=layers, weights=weights, biases=biases)
    except CorruptModelError:
        raise
    except (KeyError, TypeError, ValueError, BadParameterError, ShapeError,
            NonFiniteError) as exc:
        raise CorruptModelError(f"{path}: invalid model structure: {exc}") from exc
