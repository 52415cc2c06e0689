"""End-to-end pipeline runs and their on-disk artifacts.

A run resolves its configuration (CLI flags over config file over
defaults), derives stage seeds from the master seed by fixed offsets,
trains the baseline and full arms on one split, and writes:

    lowfreq.csv         un-normalized low-frequency components (canonical CSV)
    model.json          the full arm's trained model
    report.json         config echo, seeds, class stats, per-arm metrics+history
    fig1_signals.*      sample like/dislike raw signals (csv + svg)
    fig2_lowfreq.*      the same samples with their low-frequency components
    fig3_accuracy.*     per-epoch train/val accuracy for both arms
    run-manifest.toml   fully resolved config; rerunning from it is
                        byte-identical

Artifacts are staged in a scratch directory and moved into place only
after every one of them has been written, so a failed run leaves no
partial outputs.
"""

from __future__ import annotations

import dataclasses
import json
import shutil
import tempfile
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib as _toml
except ModuleNotFoundError:  # Python 3.10
    import tomli as _toml

from .augment import BootstrapConfig, TransformKind
from .dataio import (
    ingest_raw,
    read_canonical_csv,
    sniff_input_kind,
    write_canonical_csv,
)
from .errors import BadParameterError, ManifestError
from .evaluate import (
    ArmConfig,
    ComparisonReport,
    SplitConfig,
    compare_pipelines,
)
from .mlp import TrainConfig, save_model
from .plots import PlotSeries, emit_plot, series_from_values
from .signals import (
    DEFAULT_SAMPLING_RATE_HZ,
    DEFAULT_SIGNAL_LENGTH,
    Dataset,
    Label,
    class_variance_stats,
    resample_to_length,
)
from .smoothing import DEFAULT_LAMBDA, SmootherConfig, smooth_whittaker

RUN_MANIFEST_NAME = "run-manifest.toml"

# Stage seeds are the master seed plus fixed offsets, so one flag pins
# the whole run.
SEED_OFFSET_SPLIT = 1
SEED_OFFSET_BOOTSTRAP = 2
SEED_OFFSET_INIT = 3
SEED_OFFSET_SHUFFLE = 4


@dataclass(frozen=True)
class PipelineConfig:
    """Fully resolved knobs for one pipeline or comparison run."""

    input: str
    out: str
    length: int = DEFAULT_SIGNAL_LENGTH
    input_dim: int = 128
    smoothing_lambda: float = DEFAULT_LAMBDA
    transform: str = "signed-log"
    boot_mult: int = 3
    split_fraction: float = 0.8
    seed: int = 0
    sampling_rate_hz: float = DEFAULT_SAMPLING_RATE_HZ
    hidden1: int = 128
    hidden2: int = 32
    learning_rate: float = 1e-3
    epochs: int = 100
    batch_size: int = 32
    optimizer: str = "adam"
    momentum: float = 0.0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    patience: int = 10

    def __post_init__(self) -> None:
        if self.length < 8:
            raise BadParameterError(f"length must be >= 8, got {self.length}")
        if self.input_dim < 2:
            raise BadParameterError(f"input_dim must be >= 2, got {self.input_dim}")
        if self.boot_mult < 1:
            raise BadParameterError(f"boot_mult must be >= 1, got {self.boot_mult}")
        TransformKind.parse(self.transform)  # validates the spelling

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            learning_rate=self.learning_rate,
            epochs=self.epochs,
            batch_size=self.batch_size,
            optimizer=self.optimizer,
            momentum=self.momentum,
            beta1=self.beta1,
            beta2=self.beta2,
            eps=self.eps,
            early_stop_patience=self.patience,
            seed=self.seed + SEED_OFFSET_SHUFFLE,
        )

    def baseline_arm(self) -> ArmConfig:
        return ArmConfig(
            name="baseline",
            smoother=SmootherConfig(self.smoothing_lambda),
            input_dim=self.input_dim,
            hidden=(self.hidden1, self.hidden2),
            train=self.train_config(),
            init_seed=self.seed + SEED_OFFSET_INIT,
            normalize=True,
            transform=None,
            bootstrap=None,
        )

    def full_arm(self) -> ArmConfig:
        return ArmConfig(
            name="full",
            smoother=SmootherConfig(self.smoothing_lambda),
            input_dim=self.input_dim,
            hidden=(self.hidden1, self.hidden2),
            train=self.train_config(),
            init_seed=self.seed + SEED_OFFSET_INIT,
            normalize=False,
            transform=TransformKind.parse(self.transform),
            bootstrap=BootstrapConfig(
                multiplier=self.boot_mult, seed=self.seed + SEED_OFFSET_BOOTSTRAP
            ),
        )

    def split_config(self) -> SplitConfig:
        return SplitConfig(
            train_fraction=self.split_fraction, seed=self.seed + SEED_OFFSET_SPLIT
        )


# Config-file keys are the CLI flag spellings.
_KEY_TO_FIELD = {
    "input": "input",
    "out": "out",
    "length": "length",
    "input-dim": "input_dim",
    "lambda": "smoothing_lambda",
    "transform": "transform",
    "boot-mult": "boot_mult",
    "split": "split_fraction",
    "seed": "seed",
    "fs": "sampling_rate_hz",
    "hidden1": "hidden1",
    "hidden2": "hidden2",
    "lr": "learning_rate",
    "epochs": "epochs",
    "batch-size": "batch_size",
    "optimizer": "optimizer",
    "momentum": "momentum",
    "beta1": "beta1",
    "beta2": "beta2",
    "eps": "eps",
    "patience": "patience",
}
_FIELD_TO_KEY = {field: key for key, field in _KEY_TO_FIELD.items()}


def read_config_file(path: Path | str) -> dict:
    """Parse a flat TOML config file into {field_name: value}."""
    path = Path(path)
    try:
        doc = _toml.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ManifestError(f"{path}: cannot read config: {exc}") from exc
    except _toml.TOMLDecodeError as exc:
        raise ManifestError(f"{path}: bad TOML: {exc}") from exc
    resolved = {}
    for key, value in doc.items():
        if key not in _KEY_TO_FIELD:
            raise BadParameterError(f"{path}: unknown config key {key!r}")
        resolved[_KEY_TO_FIELD[key]] = value
    return resolved


def resolve_config(
    overrides: dict, config_path: Path | str | None = None
) -> PipelineConfig:
    """Precedence: CLI overrides > config file > dataclass defaults."""
    merged: dict = {}
    if config_path is not None:
        merged.update(read_config_file(config_path))
    merged.update({k: v for k, v in overrides.items() if v is not None})
    if "input" not in merged:
        raise BadParameterError("an input path is required (flag --in or config key 'input')")
    if "out" not in merged:
        raise BadParameterError("an output directory is required (--out or config key 'out')")
    try:
        return PipelineConfig(**merged)
    except TypeError as exc:
        raise BadParameterError(f"bad configuration: {exc}") from exc


def _toml_scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    text = str(value).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{text}"'


def write_run_manifest(config: PipelineConfig, path: Path | str) -> None:
    """Echo the fully resolved config (defaults included) as flat TOML."""
    lines = []
    for field in dataclasses.fields(config):
        key = _FIELD_TO_KEY[field.name]
        lines.append(f"{key} = {_toml_scalar(getattr(config, field.name))}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_input_dataset(config: PipelineConfig) -> Dataset:
    """Read the input (manifest or canonical CSV); manifests are resampled
    to the configured fixed length."""
    kind = sniff_input_kind(config.input)
    if kind == "manifest":
        dataset = ingest_raw(config.input, sampling_rate_hz=config.sampling_rate_hz)
        resampled = tuple(resample_to_length(s, config.length) for s in dataset)
        return Dataset(signals=resampled, source=dataset.source)
    return read_canonical_csv(config.input, sampling_rate_hz=config.sampling_rate_hz)


def _class_stats_dict(dataset: Dataset) -> dict:
    stats = class_variance_stats(dataset)
    return {
        str(label): dataclasses.asdict(stats.summary(label))
        for label in (Label.LIKE, Label.DISLIKE)
    }


def build_report(config: PipelineConfig, dataset: Dataset, comparison: ComparisonReport) -> dict:
    return {
        "config": {
            _FIELD_TO_KEY[f.name]: getattr(config, f.name)
            for f in dataclasses.fields(config)
        },
        "seeds": {
            "master": config.seed,
            "split": config.seed + SEED_OFFSET_SPLIT,
            "bootstrap": config.seed + SEED_OFFSET_BOOTSTRAP,
            "init": config.seed + SEED_OFFSET_INIT,
            "shuffle": config.seed + SEED_OFFSET_SHUFFLE,
        },
        "dataset": {
            "source": dataset.source,
            "n_signals": len(dataset),
            "class_stats": _class_stats_dict(dataset),
        },
        **comparison.to_dict(),
    }


def _sample_pair(dataset: Dataset):
    like = dataset.by_label(Label.LIKE)
    dislike = dataset.by_label(Label.DISLIKE)
    return (like[0] if like else None, dislike[0] if dislike else None)


def _figure_series(config: PipelineConfig, dataset: Dataset, comparison: ComparisonReport):
    like, dislike = _sample_pair(dataset)
    smoother = SmootherConfig(config.smoothing_lambda)

    fig1, fig2 = [], []
    for sig in (like, dislike):
        if sig is None:
            continue
        t = [i / sig.sampling_rate_hz for i in range(len(sig))]
        raw = PlotSeries(
            str(sig.label), tuple(zip(t, (float(v) for v in sig.samples)))
        )
        fig1.append(raw)
        fig2.append(raw)
        low = smooth_whittaker(sig.samples, smoother)
        fig2.append(
            PlotSeries(f"{sig.label}-lowfreq", tuple(zip(t, (float(v) for v in low))))
        )

    fig3 = []
    for arm in (comparison.baseline, comparison.full):
        fig3.append(series_from_values(f"{arm.name}-train-acc", arm.history.train_accuracy))
        fig3.append(series_from_values(f"{arm.name}-val-acc", arm.history.val_accuracy))
    return fig1, fig2, fig3


def _stage_and_publish(out: Path | str, writer) -> None:
    """Run ``writer(staging_dir)`` then move its files into ``out``.

    The output directory never holds a partial artifact set: on any
    failure the staging directory is discarded and ``out`` is untouched.
    """
    out_dir = Path(out)
    out_dir.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=".staging-", dir=out_dir.parent))
    try:
        writer(staging)
        out_dir.mkdir(parents=True, exist_ok=True)
        for item in sorted(staging.iterdir()):
            item.replace(out_dir / item.name)
    finally:
        shutil.rmtree(staging, ignore_errors=True)


def run_compare(config: PipelineConfig) -> dict:
    """Train both arms and write report.json plus the run manifest."""
    dataset = load_input_dataset(config)
    comparison = compare_pipelines(
        dataset,
        config.baseline_arm(),
        config.full_arm(),
        config.split_config(),
    )
    report = build_report(config, dataset, comparison)

    def writer(staging: Path) -> None:
        (staging / "report.json").write_text(
            json.dumps(report, indent=2) + "\n", encoding="utf-8"
        )
        write_run_manifest(config, staging / RUN_MANIFEST_NAME)

    _stage_and_publish(config.out, writer)
    return report


def run_pipeline(config: PipelineConfig) -> dict:
    """Execute a full run; returns the report dict after writing artifacts."""
    dataset = load_input_dataset(config)
    comparison = compare_pipelines(
        dataset,
        config.baseline_arm(),
        config.full_arm(),
        config.split_config(),
    )
    report = build_report(config, dataset, comparison)
    fig1, fig2, fig3 = _figure_series(config, dataset, comparison)

    components = [
        (s.id, s.label, smooth_whittaker(s.samples, SmootherConfig(config.smoothing_lambda)))
        for s in dataset
    ]

    def writer(staging: Path) -> None:
        write_canonical_csv(staging / "lowfreq.csv", components)
        save_model(comparison.full.model, staging / "model.json")
        (staging / "report.json").write_text(
            json.dumps(report, indent=2) + "\n", encoding="utf-8"
        )
        figures = (("fig1_signals", fig1), ("fig2_lowfreq", fig2), ("fig3_accuracy", fig3))
        for name, series in figures:
            emit_plot(series, "csv", staging / f"{name}.csv")
            emit_plot(series, "svg", staging / f"{name}.svg")
        write_run_manifest(config, staging / RUN_MANIFEST_NAME)

    _stage_and_publish(config.out, writer)
    return report
