"""Training-set augmentation: nonlinear transforms and stratified bootstrap.

The transform is applied elementwise to un-normalized low-frequency
components; every variant is an odd, strictly monotone, continuous map
fixing 0, so it compresses dynamic range without destroying sign or
ordering. The bootstrap resamples whole components with replacement,
per class, to M times the class size. Both are seeded and deterministic.
Bootstrap belongs on training data only; resampling validation data
would leak duplicates of training rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadParameterError, MissingClassError, NonFiniteError
from .rng import Rng64
from .smoothing import LowFreqComponent
from .signals import Label

_TRANSFORM_NAMES = ("signed-log", "cube-root", "tanh")


@dataclass(frozen=True)
class TransformKind:
    """One of signed-log, cube-root, or tanh with a positive scale."""

    name: str
    scale: float = 1.0

    def __post_init__(self) -> None:
        if self.name not in _TRANSFORM_NAMES:
            raise BadParameterError(
                f"unknown transform {self.name!r}; expected one of "
                f"{', '.join(_TRANSFORM_NAMES)}"
            )
        if not (math.isfinite(self.scale) and self.scale > 0.0):
            raise BadParameterError(f"transform scale must be positive, got {self.scale}")

    @classmethod
    def parse(cls, text: str) -> "TransformKind":
        """Parse CLI syntax: ``signed-log``, ``cube-root``, or ``tanh:<s>``."""
        text = text.strip().lower()
        if text.startswith("tanh:"):
            try:
                return cls("tanh", float(text.split(":", 1)[1]))
            except ValueError as exc:
                raise BadParameterError(f"bad tanh scale in {text!r}") from exc
        if text == "tanh":
            return cls("tanh", 1.0)
        return cls(text)

    def __str__(self) -> str:
        if self.name == "tanh":
            return f"tanh:{self.scale!r}"
        return self.name


SIGNED_LOG = TransformKind("signed-log")
CUBE_ROOT = TransformKind("cube-root")


def tanh_scaled(scale: float) -> TransformKind:
    return TransformKind("tanh", scale)


def nonlinear_transform(values, kind: TransformKind) -> np.ndarray:
    """Apply the transform elementwise.

    signed-log: sign(x) * ln(1 + |x|)
    cube-root:  sign(x) * |x|^(1/3)
    tanh:       tanh(x / scale)
    """
    x = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise NonFiniteError("non-finite value in transform input")
    if kind.name == "signed-log":
        return np.sign(x) * np.log1p(np.abs(x))
    if kind.name == "cube-root":
        return np.cbrt(x)
    return np.tanh(x / kind.scale)


@dataclass(frozen=True)
class BootstrapConfig:
    """Resample each class pool to multiplier x (class size), seeded."""

    multiplier: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.multiplier < 1:
            raise BadParameterError(
                f"bootstrap multiplier must be >= 1, got {self.multiplier}"
            )


def bootstrap_indices(n: int, m: int, rng: Rng64) -> np.ndarray:
    """m independent uniform draws from {0, ..., n-1}."""
    if n < 1:
        raise BadParameterError("cannot bootstrap from an empty pool")
    return np.fromiter((rng.below(n) for _ in range(m)), dtype=np.int64, count=m)


def bootstrap_dataset(
    components: list[LowFreqComponent], config: BootstrapConfig
) -> list[LowFreqComponent]:
    """Stratified bootstrap: per class, draw M x (class size) replicates.

    Output ids carry a replicate suffix (``<source id>-r<k>``) so the
    result has unique ids and zero id overlap with any validation set.
    Class proportions are preserved exactly. Values are taken by
    reference from the inputs, never recomputed or perturbed.
    """
    pools = {
        Label.LIKE: [c for c in components if c.label is Label.LIKE],
        Label.DISLIKE: [c for c in components if c.label is Label.DISLIKE],
    }
    for label, pool in pools.items():
        if not pool:
            raise MissingClassError(f"no {label} components to bootstrap from")

    rng = Rng64(config.seed)
    out: list[LowFreqComponent] = []
    for label in (Label.LIKE, Label.DISLIKE):
        pool = pools[label]
        draws = bootstrap_indices(len(pool), config.multiplier * len(pool), rng)
        for k, idx in enumerate(draws):
            source = pool[idx]
            out.append(
                LowFreqComponent(
                    id=f"{source.id}-r{k}", label=label, values=source.values
                )
            )
    return out
