"""Stratified splitting, classification metrics, and the two-arm comparison.

The comparison trains two feature pipelines on the identical split:

    baseline  z-score normalize -> smooth -> MLP
    full      smooth (un-normalized) -> nonlinear transform
              -> bootstrap (training rows only) -> MLP

Both arms are plain configurations of the same ArmConfig machinery, so
the baseline is literally the full arm with the transform and bootstrap
stages switched off and normalization switched on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .augment import BootstrapConfig, TransformKind, bootstrap_dataset, nonlinear_transform
from .errors import BadParameterError, MissingClassError, ShapeError
from .mlp import MlpModel, TrainConfig, TrainHistory, init_mlp, train
from .rng import Rng64
from .signals import Dataset, Label, normalize_zscore, resample_values
from .smoothing import LowFreqComponent, SmootherConfig, smooth_whittaker


@dataclass(frozen=True)
class SplitConfig:
    """Train fraction (exclusive bounds) and shuffle seed."""

    train_fraction: float = 0.8
    seed: int = 0

    def __post_init__(self) -> None:
        if not (0.0 < self.train_fraction < 1.0):
            raise BadParameterError(
                f"train_fraction must be strictly inside (0, 1), got "
                f"{self.train_fraction}"
            )


def stratified_split(dataset: Dataset, config: SplitConfig) -> tuple[Dataset, Dataset]:
    """Per-class seeded shuffle; floor(fraction x class size) go to train.

    The two parts are disjoint by id and jointly exhaustive.
    """
    rng = Rng64(config.seed)
    train_signals, val_signals = [], []
    for label in (Label.LIKE, Label.DISLIKE):
        pool = list(dataset.by_label(label))
        if len(pool) < 2:
            raise MissingClassError(
                f"need at least 2 {label} signals to split, got {len(pool)}"
            )
        rng.shuffle(pool)
        n_train = int(np.floor(config.train_fraction * len(pool)))
        train_signals.extend(pool[:n_train])
        val_signals.extend(pool[n_train:])
    return (
        Dataset(signals=tuple(train_signals), source=f"{dataset.source}//train"),
        Dataset(signals=tuple(val_signals), source=f"{dataset.source}//val"),
    )


@dataclass(frozen=True)
class Metrics:
    """Confusion counts with Like as the positive class, plus the usual
    derived rates. Zero-denominator precision/recall are defined as 0."""

    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.total if self.total else 0.0

    @property
    def precision(self) -> float:
        denom = self.tp + self.fp
        return self.tp / denom if denom else 0.0

    @property
    def recall(self) -> float:
        denom = self.tp + self.fn
        return self.tp / denom if denom else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2.0 * p * r / (p + r) if (p + r) else 0.0

    def to_dict(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "tn": self.tn,
            "fn": self.fn,
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }


def compute_metrics(predictions, truths) -> Metrics:
    """Count the four confusion cells from paired label sequences."""
    predictions = list(predictions)
    truths = list(truths)
    if len(predictions) != len(truths):
        raise ShapeError(
            f"{len(predictions)} predictions vs {len(truths)} truths"
        )
    if not predictions:
        raise ShapeError("cannot compute metrics on zero pairs")
    tp = fp = tn = fn = 0
    for pred, truth in zip(predictions, truths):
        if truth is Label.LIKE:
            if pred is Label.LIKE:
                tp += 1
            else:
                fn += 1
        else:
            if pred is Label.LIKE:
                fp += 1
            else:
                tn += 1
    return Metrics(tp=tp, fp=fp, tn=tn, fn=fn)


@dataclass(frozen=True)
class ArmConfig:
    """One pipeline arm. transform/bootstrap of None mean the stage is
    skipped (identity); normalize toggles the z-score stage."""

    name: str
    smoother: SmootherConfig
    input_dim: int
    hidden: tuple[int, ...]
    train: TrainConfig
    init_seed: int
    normalize: bool = False
    transform: TransformKind | None = None
    bootstrap: BootstrapConfig | None = None

    def describe(self) -> dict:
        return {
            "name": self.name,
            "normalize": self.normalize,
            "transform": str(self.transform) if self.transform else None,
            "bootstrap_multiplier": self.bootstrap.multiplier if self.bootstrap else None,
            "lambda": self.smoother.lam,
            "input_dim": self.input_dim,
            "hidden": list(self.hidden),
        }


@dataclass(frozen=True)
class ArmResult:
    name: str
    metrics: Metrics
    history: TrainHistory
    model: MlpModel

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "metrics": self.metrics.to_dict(),
            "history": self.history.to_dict(),
        }


@dataclass(frozen=True)
class ComparisonReport:
    split: SplitConfig
    train_size: int
    val_size: int
    baseline: ArmResult
    full: ArmResult

    def to_dict(self) -> dict:
        return {
            "split": {
                "train_fraction": self.split.train_fraction,
                "seed": self.split.seed,
                "train_size": self.train_size,
                "val_size": self.val_size,
            },
            "arms": [self.baseline.to_dict(), self.full.to_dict()],
        }


def _arm_components(arm: ArmConfig, dataset: Dataset) -> list[LowFreqComponent]:
    components = []
    for sig in dataset:
        values = normalize_zscore(sig.samples) if arm.normalize else sig.samples
        smoothed = smooth_whittaker(values, arm.smoother)
        if arm.transform is not None:
            smoothed = nonlinear_transform(smoothed, arm.transform)
        components.append(
            LowFreqComponent(id=sig.id, label=sig.label, values=smoothed)
        )
    return components


def _features(
    components: list[LowFreqComponent], input_dim: int
) -> tuple[np.ndarray, np.ndarray]:
    x = np.stack([resample_values(c.values, input_dim) for c in components])
    y = np.asarray([c.label.encoded for c in components], dtype=np.float64)
    return x, y


def run_arm(arm: ArmConfig, train_ds: Dataset, val_ds: Dataset) -> ArmResult:
    """Featurize, optionally augment the training side, train, evaluate."""
    train_comps = _arm_components(arm, train_ds)
    if arm.bootstrap is not None:
        train_comps = bootstrap_dataset(train_comps, arm.bootstrap)
    x_train, y_train = _features(train_comps, arm.input_dim)

    val_comps = _arm_components(arm, val_ds)
    x_val, y_val = _features(val_comps, arm.input_dim)

    model = init_mlp(arm.input_dim, list(arm.hidden), arm.init_seed)
    trained, history = train(model, (x_train, y_train), (x_val, y_val), arm.train)
    predictions = trained.predict_labels(x_val)
    metrics = compute_metrics(predictions, [c.label for c in val_comps])
    return ArmResult(name=arm.name, metrics=metrics, history=history, model=trained)


def compare_pipelines(
    dataset: Dataset,
    baseline_cfg: ArmConfig,
    full_cfg: ArmConfig,
    split_cfg: SplitConfig,
) -> ComparisonReport:
    """Train both arms on the identical stratified split."""
    train_ds, val_ds = stratified_split(dataset, split_cfg)
    return ComparisonReport(
        split=split_cfg,
        train_size=len(train_ds),
        val_size=len(val_ds),
        baseline=run_arm(baseline_cfg, train_ds, val_ds),
        full=run_arm(full_cfg, train_ds, val_ds),
    )
