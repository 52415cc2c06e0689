"""Core domain types and per-signal operations.

A Signal is one labeled single-channel EEG time series; a Dataset is the
unit every pipeline stage maps over. Also here: z-score normalization,
linear-interpolation resampling, DFT band powers over the canonical
brainwave bands, per-class variance statistics, and the seeded synthetic
generator used for desk-scale runs and the end-to-end acceptance gate.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadParameterError,
    DuplicateIdError,
    NonFiniteError,
    TooShortError,
)
from .rng import Rng64

MIN_SIGNAL_SAMPLES = 8
MIN_BANDPOWER_SAMPLES = 16
DEFAULT_SAMPLING_RATE_HZ = 128.0
DEFAULT_SIGNAL_LENGTH = 512


class Label(enum.Enum):
    """Binary preference label. Like is the positive class."""

    DISLIKE = 0
    LIKE = 1

    @classmethod
    def parse(cls, text: str) -> "Label":
        """Parse a label case-insensitively ('Like', 'LIKE', 'like', ...)."""
        normalized = text.strip().lower()
        if normalized == "like":
            return cls.LIKE
        if normalized == "dislike":
            return cls.DISLIKE
        raise BadParameterError(f"unknown label {text!r} (expected like/dislike)")

    @property
    def encoded(self) -> int:
        """0/1 encoding used as the training target."""
        return self.value

    def __str__(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class Signal:
    """One labeled single-channel time series in device units."""

    id: str
    label: Label
    samples: np.ndarray
    sampling_rate_hz: float = DEFAULT_SAMPLING_RATE_HZ

    def __post_init__(self) -> None:
        samples = np.array(self.samples, dtype=np.float64, copy=True)
        if samples.ndim != 1:
            raise BadParameterError(f"signal {self.id!r}: samples must be 1-D")
        if samples.size < MIN_SIGNAL_SAMPLES:
            raise TooShortError(
                f"signal {self.id!r}: {samples.size} samples, need at least "
                f"{MIN_SIGNAL_SAMPLES}"
            )
        if not np.all(np.isfinite(samples)):
            raise NonFiniteError(f"signal {self.id!r}: non-finite sample")
        if not (math.isfinite(self.sampling_rate_hz) and self.sampling_rate_hz > 0):
            raise BadParameterError(
                f"signal {self.id!r}: sampling rate must be a positive real"
            )
        samples.setflags(write=False)  # share-safe: treat as immutable
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return self.samples.size


@dataclass(frozen=True)
class Dataset:
    """A collection of signals plus a provenance tag."""

    signals: tuple[Signal, ...]
    source: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "signals", tuple(self.signals))
        seen: set[str] = set()
        for sig in self.signals:
            if sig.id in seen:
                raise DuplicateIdError(f"duplicate signal id {sig.id!r}")
            seen.add(sig.id)

    def __len__(self) -> int:
        return len(self.signals)

    def __iter__(self):
        return iter(self.signals)

    def by_label(self, label: Label) -> tuple[Signal, ...]:
        return tuple(s for s in self.signals if s.label is label)


@dataclass(frozen=True)
class BandDefinition:
    """A named frequency band, half-open: [f_lo_hz, f_hi_hz)."""

    name: str
    f_lo_hz: float
    f_hi_hz: float

    def __post_init__(self) -> None:
        if not (0 <= self.f_lo_hz < self.f_hi_hz):
            raise BadParameterError(
                f"band {self.name!r}: need 0 <= f_lo < f_hi, got "
                f"[{self.f_lo_hz}, {self.f_hi_hz})"
            )


def canonical_bands(nyquist_hz: float) -> tuple[BandDefinition, ...]:
    """The five canonical brainwave bands; gamma runs up to Nyquist.

    The 22-32 Hz stretch is deliberately unassigned. Requires a Nyquist
    frequency above 32 Hz so that gamma is non-empty.
    """
    if nyquist_hz <= 32.0:
        raise BadParameterError(
            f"Nyquist {nyquist_hz} Hz too low for the canonical gamma band (>32 Hz)"
        )
    return (
        BandDefinition("delta", 1.0, 4.0),
        BandDefinition("theta", 4.0, 8.0),
        BandDefinition("alpha", 8.0, 13.0),
        BandDefinition("beta", 13.0, 22.0),
        BandDefinition("gamma", 32.0, nyquist_hz),
    )


@dataclass(frozen=True)
class ClassSummary:
    """Variance/amplitude statistics for one class; None when count is 0."""

    count: int
    mean_variance: float | None = None
    min_variance: float | None = None
    max_variance: float | None = None
    mean_amplitude: float | None = None


@dataclass(frozen=True)
class ClassStats:
    like: ClassSummary
    dislike: ClassSummary

    def summary(self, label: Label) -> ClassSummary:
        return self.like if label is Label.LIKE else self.dislike


def normalize_zscore(values) -> np.ndarray:
    """Z-score a sequence using the population standard deviation.

    Near-constant input (population sigma below 1e-12) maps to all zeros
    instead of blowing up.
    """
    x = np.asarray(values, dtype=np.float64)
    if x.size == 0:
        raise BadParameterError("cannot normalize an empty sequence")
    if not np.all(np.isfinite(x)):
        raise NonFiniteError("non-finite value in normalize input")
    sigma = float(x.std())
    if sigma < 1e-12:
        return np.zeros_like(x)
    return (x - x.mean()) / sigma


def resample_values(values, length: int) -> np.ndarray:
    """Linearly interpolate a sequence onto `length` uniform points.

    The output grid spans [0, n-1], so the endpoints are preserved
    exactly; interior values are clipped to the input's [min, max] to
    guard against last-ulp rounding above the hull.
    """
    if length < 2:
        raise TooShortError(f"target length {length} < 2")
    x = np.asarray(values, dtype=np.float64)
    if x.size < 2:
        raise TooShortError("need at least 2 samples to resample")
    if not np.all(np.isfinite(x)):
        raise NonFiniteError("non-finite value in resample input")
    if x.size == length:
        return x.copy()
    positions = np.linspace(0.0, x.size - 1, length)
    out = np.interp(positions, np.arange(x.size), x)
    np.clip(out, x.min(), x.max(), out=out)
    return out


def resample_to_length(signal: Signal, length: int) -> Signal:
    """Resample a signal to a fixed length (sampling-rate tag unchanged)."""
    return Signal(
        id=signal.id,
        label=signal.label,
        samples=resample_values(signal.samples, length),
        sampling_rate_hz=signal.sampling_rate_hz,
    )


def band_powers(
    signal: Signal, bands: tuple[BandDefinition, ...] | None = None
) -> dict[str, float]:
    """Spectral power per band from the DFT of the mean-removed signal.

    Power in a band is the sum of |X_k|^2 over one-sided DFT bins whose
    frequency falls in [f_lo, f_hi); the DC bin never counts.
    """
    n = len(signal)
    if n < MIN_BANDPOWER_SAMPLES:
        raise TooShortError(
            f"signal {signal.id!r}: band powers need at least "
            f"{MIN_BANDPOWER_SAMPLES} samples, got {n}"
        )
    if bands is None:
        bands = canonical_bands(signal.sampling_rate_hz / 2.0)
    x = signal.samples - signal.samples.mean()
    power = np.abs(np.fft.rfft(x)) ** 2
    freqs = np.fft.rfftfreq(n, d=1.0 / signal.sampling_rate_hz)
    out: dict[str, float] = {}
    for band in bands:
        mask = (freqs >= band.f_lo_hz) & (freqs < band.f_hi_hz) & (freqs > 0.0)
        out[band.name] = float(power[mask].sum())
    return out


def total_nondc_power(signal: Signal) -> float:
    """Sum of |X_k|^2 over every non-DC one-sided bin (Parseval budget)."""
    x = signal.samples - signal.samples.mean()
    power = np.abs(np.fft.rfft(x)) ** 2
    return float(power[1:].sum())


def _summarize(signals: tuple[Signal, ...]) -> ClassSummary:
    if not signals:
        return ClassSummary(count=0)
    variances = [float(np.var(s.samples, ddof=1)) for s in signals]
    amplitudes = [float(s.samples.mean()) for s in signals]
    return ClassSummary(
        count=len(signals),
        mean_variance=float(np.mean(variances)),
        min_variance=min(variances),
        max_variance=max(variances),
        mean_amplitude=float(np.mean(amplitudes)),
    )


def class_variance_stats(dataset: Dataset) -> ClassStats:
    """Per-class count and per-signal variance statistics.

    An absent class is reported with count 0 and no variance fields.
    """
    if len(dataset) == 0:
        raise BadParameterError("dataset is empty")
    return ClassStats(
        like=_summarize(dataset.by_label(Label.LIKE)),
        dislike=_summarize(dataset.by_label(Label.DISLIKE)),
    )


# Synthetic generator constants. The class signal lives in the trend
# RMS: Dislike trends are scaled by a near-ratio-preserving factor of
# the noise multiplier, so z-scoring nearly erases the separation while
# the raw low-frequency amplitude keeps it. Trend frequencies stay well
# below the default smoother cutoff so extraction is nearly lossless.
_TREND_BASE_RMS = 0.5
_TREND_RMS_JITTER = 0.15
_TREND_FREQ_LO_HZ = 0.3
_TREND_FREQ_HI_HZ = 1.5
_NOISE_SIGMA = 0.5
_TREND_GAIN_SLOPE = 0.85


def _dislike_trend_mult(dislike_sigma_mult: float) -> float:
    return 1.0 + _TREND_GAIN_SLOPE * (dislike_sigma_mult - 1.0)


def generate_synthetic(
    n: int,
    balance: float = 0.5,
    dislike_sigma_mult: float = 2.0,
    seed: int = 0,
    *,
    length: int = DEFAULT_SIGNAL_LENGTH,
    sampling_rate_hz: float = DEFAULT_SAMPLING_RATE_HZ,
) -> Dataset:
    """Seeded class-conditional dataset: low-frequency trend plus noise.

    Each signal is a sum of 2-4 sinusoids below 2 Hz, normalized to a
    per-signal trend RMS, plus white noise. Dislike signals get
    `dislike_sigma_mult` times the noise sigma and a correspondingly
    scaled trend RMS, which reproduces the "dislike has more variance"
    structure of the real data. Bit-for-bit reproducible for fixed
    arguments.
    """
    if n < 2:
        raise BadParameterError(f"need n >= 2 signals, got {n}")
    if not (0.0 < balance < 1.0):
        raise BadParameterError(f"balance must be in (0, 1), got {balance}")
    if dislike_sigma_mult < 1.0:
        raise BadParameterError(
            f"dislike_sigma_mult must be >= 1, got {dislike_sigma_mult}"
        )
    if length < MIN_SIGNAL_SAMPLES:
        raise TooShortError(f"length {length} < {MIN_SIGNAL_SAMPLES}")

    n_like = int(balance * n + 0.5)
    n_like = min(max(n_like, 1), n - 1)  # both classes always present
    rng = Rng64(seed)
    t = np.arange(length) / sampling_rate_hz
    trend_mult = _dislike_trend_mult(dislike_sigma_mult)
    width = max(4, len(str(n - 1)))

    signals = []
    for i in range(n):
        label = Label.LIKE if i < n_like else Label.DISLIKE
        is_dislike = label is Label.DISLIKE
        amp_scale = trend_mult if is_dislike else 1.0
        sigma = _NOISE_SIGMA * (dislike_sigma_mult if is_dislike else 1.0)

        target_rms = (_TREND_BASE_RMS + _TREND_RMS_JITTER * rng.uniform()) * amp_scale
        trend = np.zeros(length)
        for _ in range(2 + rng.below(3)):  # 2..4 sinusoids
            amp = 0.5 + rng.uniform()
            freq = _TREND_FREQ_LO_HZ + (
                _TREND_FREQ_HI_HZ - _TREND_FREQ_LO_HZ
            ) * rng.uniform()
            phase = 2.0 * math.pi * rng.uniform()
            trend += amp * np.sin(2.0 * math.pi * freq * t + phase)
        trend *= target_rms / math.sqrt(float(np.mean(trend * trend)))
        noise = sigma * np.asarray(rng.normals(length))

        signals.append(
            Signal(
                id=f"synth-{i:0{width}d}",
                label=label,
                samples=trend + noise,
                sampling_rate_hz=sampling_rate_hz,
            )
        )
    return Dataset(signals=tuple(signals), source=f"synthetic(seed={seed})")
