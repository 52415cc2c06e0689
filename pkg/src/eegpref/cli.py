"""Command-line interface.

Single-purpose stage commands (synth, ingest, filter, transform, train,
eval, plot) communicate through the canonical fixed-length CSV, so each
stage is independently scriptable; `pipeline` and `compare` run the whole
comparison in one process and write a run manifest that reproduces them
byte for byte.

Exit codes: 0 success, 2 usage or input error, 1 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .augment import BootstrapConfig, TransformKind, bootstrap_dataset, nonlinear_transform
from .dataio import (
    dataset_to_records,
    ingest_raw,
    read_canonical_csv,
    write_canonical_csv,
)
from .errors import DivergenceError, PipelineError, SolverError
from .evaluate import SplitConfig, compute_metrics, stratified_split
from .mlp import TrainConfig, init_mlp, load_model, save_model, train
from .pipeline import (
    SEED_OFFSET_BOOTSTRAP,
    SEED_OFFSET_INIT,
    SEED_OFFSET_SHUFFLE,
    SEED_OFFSET_SPLIT,
    PipelineConfig,
    resolve_config,
    run_compare,
    run_pipeline,
)
from .plots import emit_plot, read_series_csv
from .signals import (
    DEFAULT_SAMPLING_RATE_HZ,
    DEFAULT_SIGNAL_LENGTH,
    Dataset,
    generate_synthetic,
    normalize_zscore,
    resample_to_length,
    resample_values,
)
from .smoothing import (
    DEFAULT_LAMBDA,
    LowFreqComponent,
    SmootherConfig,
    extract_lowfreq_dataset,
    smooth_whittaker,
)


def _add_io(parser: argparse.ArgumentParser, need_in: bool = True) -> None:
    if need_in:
        parser.add_argument("--in", dest="input", required=True, help="input CSV path")
    parser.add_argument("--out", required=True, help="output path")


def _add_common_knobs(parser: argparse.ArgumentParser) -> None:
    """Knobs shared by pipeline and compare; None means 'not given'."""
    parser.add_argument("--in", dest="input", help="input manifest or canonical CSV")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--config", help="TOML config file (flags take precedence)")
    parser.add_argument("--seed", type=int, help="master seed (stage seeds derive from it)")
    parser.add_argument("--lambda", dest="smoothing_lambda", type=float, help="smoothing penalty")
    parser.add_argument("--transform", help="signed-log | cube-root | tanh:<scale>")
    parser.add_argument("--boot-mult", type=int, help="bootstrap multiplier (>= 1)")
    parser.add_argument("--split", dest="split_fraction", type=float, help="train fraction in (0,1)")
    parser.add_argument("--length", type=int, help="resample length for raw signals")
    parser.add_argument("--input-dim", type=int, help="classifier input width")
    parser.add_argument("--fs", dest="sampling_rate_hz", type=float, help="sampling rate in Hz")
    parser.add_argument("--hidden1", type=int, help="first hidden layer width")
    parser.add_argument("--hidden2", type=int, help="second hidden layer width")
    parser.add_argument("--lr", dest="learning_rate", type=float, help="learning rate")
    parser.add_argument("--epochs", type=int, help="training epochs")
    parser.add_argument("--batch-size", type=int, help="minibatch size")
    parser.add_argument("--optimizer", choices=("adam", "sgd"), help="optimizer")
    parser.add_argument("--patience", type=int, help="early-stop patience (0 disables)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eegpref",
        description="Single-channel EEG preference classification pipeline.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a seeded synthetic dataset (canonical CSV)")
    p.add_argument("--n", type=int, required=True, help="number of signals")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--balance", type=float, default=0.5, help="fraction labeled like")
    p.add_argument("--length", type=int, default=DEFAULT_SIGNAL_LENGTH)
    p.add_argument("--fs", dest="sampling_rate_hz", type=float, default=DEFAULT_SAMPLING_RATE_HZ)
    p.add_argument("--out", required=True, help="canonical CSV to write")

    p = sub.add_parser("ingest", help="manifest CSV of raw recordings -> canonical CSV")
    _add_io(p)
    p.add_argument("--length", type=int, default=DEFAULT_SIGNAL_LENGTH)
    p.add_argument("--fs", dest="sampling_rate_hz", type=float, default=DEFAULT_SAMPLING_RATE_HZ)

    p = sub.add_parser("filter", help="extract low-frequency components (canonical CSV in/out)")
    _add_io(p)
    p.add_argument("--lambda", dest="smoothing_lambda", type=float, default=DEFAULT_LAMBDA)
    p.add_argument("--normalize", action="store_true", help="z-score each signal first")

    p = sub.add_parser("transform", help="apply a nonlinear transform (canonical CSV in/out)")
    _add_io(p)
    p.add_argument("--transform", default="signed-log", help="signed-log | cube-root | tanh:<scale>")

    p = sub.add_parser("train", help="split, optionally bootstrap, train; writes model JSON")
    _add_io(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--split", dest="split_fraction", type=float, default=0.8)
    p.add_argument("--boot-mult", type=int, default=1, help="1 = no augmentation")
    p.add_argument("--input-dim", type=int, default=128)
    p.add_argument("--hidden1", type=int, default=128)
    p.add_argument("--hidden2", type=int, default=32)
    p.add_argument("--lr", dest="learning_rate", type=float, default=1e-3)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--optimizer", choices=("adam", "sgd"), default="adam")
    p.add_argument("--patience", type=int, default=10)

    p = sub.add_parser("eval", help="evaluate a model JSON against a canonical CSV")
    p.add_argument("--model", required=True, help="model JSON path")
    p.add_argument("--in", dest="input", required=True, help="canonical CSV path")
    p.add_argument("--out", help="write metrics JSON here instead of stdout")

    p = sub.add_parser("compare", help="baseline vs full pipeline on one split; writes report.json")
    _add_common_knobs(p)

    p = sub.add_parser("plot", help="render a series CSV (series,x,y) to SVG or CSV")
    _add_io(p)
    p.add_argument("--format", choices=("svg", "csv"), default="svg")

    p = sub.add_parser("pipeline", help="full run: components, model, report, figures")
    _add_common_knobs(p)

    return parser


def _cmd_synth(args: argparse.Namespace) -> int:
    dataset = generate_synthetic(
        args.n,
        balance=args.balance,
        seed=args.seed,
        length=args.length,
        sampling_rate_hz=args.sampling_rate_hz,
    )
    write_canonical_csv(args.out, dataset_to_records(dataset))
    print(f"wrote {len(dataset)} signals to {args.out}")
    return 0


def _cmd_ingest(args: argparse.Namespace) -> int:
    raw = ingest_raw(args.input, sampling_rate_hz=args.sampling_rate_hz)
    resampled = Dataset(
        signals=tuple(resample_to_length(s, args.length) for s in raw),
        source=raw.source,
    )
    write_canonical_csv(args.out, dataset_to_records(resampled))
    print(f"ingested {len(resampled)} signals to {args.out}")
    return 0


def _cmd_filter(args: argparse.Namespace) -> int:
    dataset = read_canonical_csv(args.input)
    config = SmootherConfig(args.smoothing_lambda)
    if args.normalize:
        components = [
            (s.id, s.label, smooth_whittaker(normalize_zscore(s.samples), config))
            for s in dataset
        ]
    else:
        components = [
            (c.id, c.label, c.values) for c in extract_lowfreq_dataset(dataset, config)
        ]
    write_canonical_csv(args.out, components)
    print(f"filtered {len(components)} signals to {args.out}")
    return 0


def _cmd_transform(args: argparse.Namespace) -> int:
    kind = TransformKind.parse(args.transform)
    dataset = read_canonical_csv(args.input)
    records = [
        (s.id, s.label, nonlinear_transform(s.samples, kind)) for s in dataset
    ]
    write_canonical_csv(args.out, records)
    print(f"transformed {len(records)} signals to {args.out}")
    return 0


def _features(components, input_dim: int):
    x = np.stack([resample_values(c.values, input_dim) for c in components])
    y = np.asarray([c.label.encoded for c in components], dtype=np.float64)
    return x, y


def _cmd_train(args: argparse.Namespace) -> int:
    dataset = read_canonical_csv(args.input)
    split = SplitConfig(
        train_fraction=args.split_fraction, seed=args.seed + SEED_OFFSET_SPLIT
    )
    train_ds, val_ds = stratified_split(dataset, split)
    train_comps = [LowFreqComponent(s.id, s.label, s.samples) for s in train_ds]
    if args.boot_mult > 1:
        boot = BootstrapConfig(
            multiplier=args.boot_mult, seed=args.seed + SEED_OFFSET_BOOTSTRAP
        )
        train_comps = bootstrap_dataset(train_comps, boot)
    val_comps = [LowFreqComponent(s.id, s.label, s.samples) for s in val_ds]

    x_train, y_train = _features(train_comps, args.input_dim)
    x_val, y_val = _features(val_comps, args.input_dim)
    model = init_mlp(
        args.input_dim, [args.hidden1, args.hidden2], args.seed + SEED_OFFSET_INIT
    )
    config = TrainConfig(
        learning_rate=args.learning_rate,
        epochs=args.epochs,
        batch_size=args.batch_size,
        optimizer=args.optimizer,
        early_stop_patience=args.patience,
        seed=args.seed + SEED_OFFSET_SHUFFLE,
    )
    trained, history = train(model, (x_train, y_train), (x_val, y_val), config)
    save_model(trained, args.out)
    best = history.best_epoch
    print(
        f"trained {len(history.train_loss)} epochs; "
        f"best epoch {best} val accuracy {history.val_accuracy[best]:.4f}; "
        f"model at {args.out}"
    )
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    dataset = read_canonical_csv(args.input)
    input_dim = model.weights[0].shape[1]
    comps = [LowFreqComponent(s.id, s.label, s.samples) for s in dataset]
    x, _ = _features(comps, input_dim)
    predictions = model.predict_labels(x)
    metrics = compute_metrics(predictions, [c.label for c in comps])
    text = json.dumps(metrics.to_dict(), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"metrics at {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_plot(args: argparse.Namespace) -> int:
    series = read_series_csv(args.input)
    emit_plot(series, args.format, args.out)
    print(f"plotted {len(series)} series to {args.out}")
    return 0


_OVERRIDE_FIELDS = (
    "input",
    "out",
    "seed",
    "smoothing_lambda",
    "transform",
    "boot_mult",
    "split_fraction",
    "length",
    "input_dim",
    "sampling_rate_hz",
    "hidden1",
    "hidden2",
    "learning_rate",
    "epochs",
    "batch_size",
    "optimizer",
    "patience",
)


def _resolved(args: argparse.Namespace) -> PipelineConfig:
    overrides = {name: getattr(args, name) for name in _OVERRIDE_FIELDS}
    return resolve_config(overrides, args.config)


def _print_report_summary(report: dict) -> None:
    for arm in report["arms"]:
        metrics = arm["metrics"]
        print(
            f"{arm['name']}: accuracy {metrics['accuracy']:.4f} "
            f"precision {metrics['precision']:.4f} "
            f"recall {metrics['recall']:.4f} f1 {metrics['f1']:.4f}"
        )


def _cmd_compare(args: argparse.Namespace) -> int:
    report = run_compare(_resolved(args))
    _print_report_summary(report)
    print(f"report at {Path(report['config']['out']) / 'report.json'}")
    return 0


def _cmd_pipeline(args: argparse.Namespace) -> int:
    report = run_pipeline(_resolved(args))
    _print_report_summary(report)
    print(f"artifacts at {report['config']['out']}")
    return 0


_COMMANDS = {
    "synth": _cmd_synth,
    "ingest": _cmd_ingest,
    "filter": _cmd_filter,
    "transform": _cmd_transform,
    "train": _cmd_train,
    "eval": _cmd_eval,
    "compare": _cmd_compare,
    "plot": _cmd_plot,
    "pipeline": _cmd_pipeline,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (SolverError, DivergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - safety net
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
