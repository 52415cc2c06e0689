"""Dataset file formats: manifest CSV, signal files, canonical fixed-length CSV.

Formats:
  manifest CSV   header ``id,label,file``; `file` is relative to the manifest
  signal file    plain text, one finite decimal sample per line
  canonical CSV  header ``id,label,v0,...,v{L-1}``, one row per signal
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import (
    BadParameterError,
    DuplicateIdError,
    EmptyDatasetError,
    ManifestError,
    NonFiniteError,
    PipelineError,
)
from .signals import DEFAULT_SAMPLING_RATE_HZ, Dataset, Label, Signal

MANIFEST_HEADER = ["id", "label", "file"]


def read_signal_file(path: Path | str) -> np.ndarray:
    """Read one plain-text signal file (one decimal per line)."""
    path = Path(path)
    values: list[float] = []
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ManifestError(f"{path}: cannot read signal file: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            continue
        try:
            value = float(text)
        except ValueError as exc:
            raise ManifestError(f"{path}:{lineno}: not a decimal: {text!r}") from exc
        if not np.isfinite(value):
            raise ManifestError(f"{path}:{lineno}: non-finite sample {text!r}")
        values.append(value)
    return np.asarray(values, dtype=np.float64)


def ingest_raw(
    manifest_path: Path | str,
    sampling_rate_hz: float = DEFAULT_SAMPLING_RATE_HZ,
) -> Dataset:
    """Load a dataset from a manifest CSV; row order is preserved."""
    manifest_path = Path(manifest_path)
    try:
        handle = manifest_path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"{manifest_path}: cannot open manifest: {exc}") from exc

    signals: list[Signal] = []
    seen: set[str] = set()
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDatasetError(f"{manifest_path}: manifest has no header")
        if [h.strip() for h in header] != MANIFEST_HEADER:
            raise ManifestError(
                f"{manifest_path}: header must be {','.join(MANIFEST_HEADER)!r}, "
                f"got {','.join(header)!r}"
            )
        for row_num, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 3:
                raise ManifestError(
                    f"{manifest_path}:{row_num}: expected 3 columns, got {len(row)}"
                )
            sig_id, label_text, file_text = (cell.strip() for cell in row)
            if not sig_id:
                raise ManifestError(f"{manifest_path}:{row_num}: empty id")
            if sig_id in seen:
                raise DuplicateIdError(
                    f"{manifest_path}:{row_num}: duplicate id {sig_id!r}"
                )
            seen.add(sig_id)
            try:
                label = Label.parse(label_text)
            except BadParameterError as exc:
                raise ManifestError(f"{manifest_path}:{row_num}: {exc}") from exc
            samples = read_signal_file(manifest_path.parent / file_text)
            try:
                signals.append(
                    Signal(
                        id=sig_id,
                        label=label,
                        samples=samples,
                        sampling_rate_hz=sampling_rate_hz,
                    )
                )
            except PipelineError as exc:
                raise ManifestError(f"{manifest_path}:{row_num}: {exc}") from exc

    if not signals:
        raise EmptyDatasetError(f"{manifest_path}: manifest has no data rows")
    return Dataset(signals=tuple(signals), source=str(manifest_path))


def write_canonical_csv(
    path: Path | str, records: Iterable[tuple[str, Label, np.ndarray]]
) -> None:
    """Write fixed-length rows as ``id,label,v0,...,v{L-1}``.

    Floats are written with their shortest round-trip representation, so
    a write/read cycle is value-exact and the bytes are deterministic.
    """
    records = list(records)
    if not records:
        raise EmptyDatasetError("refusing to write an empty canonical CSV")
    length = len(records[0][2])
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["id", "label"] + [f"v{i}" for i in range(length)])
        for sig_id, label, values in records:
            if len(values) != length:
                raise ManifestError(
                    f"row {sig_id!r}: length {len(values)} != {length}"
                )
            if not np.all(np.isfinite(values)):
                raise NonFiniteError(f"row {sig_id!r}: non-finite value")
            writer.writerow([sig_id, str(label)] + [repr(float(v)) for v in values])


def dataset_to_records(dataset: Dataset) -> list[tuple[str, Label, np.ndarray]]:
    return [(s.id, s.label, s.samples) for s in dataset]


def read_canonical_csv(
    path: Path | str,
    sampling_rate_hz: float = DEFAULT_SAMPLING_RATE_HZ,
) -> Dataset:
    """Read a canonical fixed-length CSV back into a Dataset."""
    path = Path(path)
    try:
        handle = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"{path}: cannot open: {exc}") from exc

    signals: list[Signal] = []
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDatasetError(f"{path}: no header")
        if len(header) < 3 or header[:2] != ["id", "label"]:
            raise ManifestError(f"{path}: not a canonical CSV header")
        expected = [f"v{i}" for i in range(len(header) - 2)]
        if header[2:] != expected:
            raise ManifestError(f"{path}: value columns must be v0..v{len(expected)-1}")
        length = len(expected)
        for row_num, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != length + 2:
                raise ManifestError(
                    f"{path}:{row_num}: expected {length + 2} cells, got {len(row)}"
                )
            try:
                label = Label.parse(row[1])
                values = np.asarray([float(v) for v in row[2:]], dtype=np.float64)
            except (BadParameterError, ValueError) as exc:
                raise ManifestError(f"{path}:{row_num}: {exc}") from exc
            try:
                signals.append(
                    Signal(
                        id=row[0],
                        label=label,
                        samples=values,
                        sampling_rate_hz=sampling_rate_hz,
                    )
                )
            except PipelineError as exc:
                raise ManifestError(f"{path}:{row_num}: {exc}") from exc

    if not signals:
        raise EmptyDatasetError(f"{path}: no data rows")
    return Dataset(signals=tuple(signals), source=str(path))


def sniff_input_kind(path: Path | str) -> str:
    """Classify an input CSV as 'manifest' or 'canonical' by its header."""
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as handle:
            header = next(csv.reader(handle), None)
    except OSError as exc:
        raise ManifestError(f"{path}: cannot open: {exc}") from exc
    if header is None:
        raise EmptyDatasetError(f"{path}: empty file")
    header = [h.strip() for h in header]
    if header == MANIFEST_HEADER:
        return "manifest"
    if len(header) >= 3 and header[:2] == ["id", "label"] and header[2] == "v0":
        return "canonical"
    raise ManifestError(f"{path}: unrecognized header {','.join(header)!r}")
