"""Dataset ingestion, decimation, and synthetic sEMG generation.

On-disk layout: a JSON manifest plus one CSV per trial.

    manifest.json   {"classes": [...], "sampling_rate_hz": ...,
                     "trials": [{"path", "label", "subject", "group",
                                 "channels": [...]}, ...]}
    trial CSV       first row channel names, then one sample per channel per
                    row, rendered at full precision so save -> load is
                    bit-exact.

The synthetic generator stands in for real recordings: per class and channel
it shapes white Gaussian noise with a band-pass filter and scales it to the
class RMS amplitude, giving stationary trials whose spectra and levels are
controllable enough to separate classes.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import signal as sps

from .signals import Signal


class DatasetError(Exception):
    """A manifest or trial file failed validation."""


@dataclass
class Trial:
    """One labeled multi-channel recording."""

    trial_id: str
    label: str
    subject: str
    group: str
    channels: list[str]
    data: np.ndarray  # (n_samples, n_channels)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.data.ndim != 2 or self.data.shape[1] != len(self.channels):
            raise ValueError("trial data must be (n_samples, n_channels)")

    def signal(self, channel: int, rate: float) -> Signal:
        return Signal(samples=self.data[:, channel], rate=rate)


@dataclass
class Dataset:
    """In-memory dataset: class list, shared sampling rate, and trials."""

    classes: list[str]
    rate: float
    trials: list[Trial]

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError("sampling rate must be positive")
        ids = [t.trial_id for t in self.trials]
        if len(set(ids)) != len(ids):
            raise ValueError("trial ids must be unique")
        for t in self.trials:
            if t.label not in self.classes:
                raise ValueError(f"trial {t.trial_id} has unknown label {t.label!r}")
            if t.channels != self.trials[0].channels:
                raise ValueError(
                    f"trial {t.trial_id} channels {t.channels} differ from "
                    f"{self.trials[0].channels}; datasets need a uniform layout"
                )

    @property
    def channel_count(self) -> int:
        return len(self.trials[0].channels) if self.trials else 0


def load_dataset(manifest_path) -> Dataset:
    """Load and validate a dataset from its manifest.

    Distinct failures raise DatasetError naming the problem: missing trial
    file, per-trial rate differing from the dataset rate, a label outside the
    declared class set, channel names in a CSV not matching the manifest, or
    a non-numeric sample.
    """
    manifest_path = Path(manifest_path)
    if not manifest_path.exists():
        raise DatasetError(f"manifest not found: {manifest_path}")
    try:
        manifest = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise DatasetError(f"manifest is not valid JSON: {exc}") from exc

    for key in ("classes", "sampling_rate_hz", "trials"):
        if key not in manifest:
            raise DatasetError(f"manifest missing required key {key!r}")
    classes = list(manifest["classes"])
    rate = float(manifest["sampling_rate_hz"])
    base = manifest_path.parent

    trials = []
    for entry in manifest["trials"]:
        path = base / entry["path"]
        label = entry["label"]
        if label not in classes:
            raise DatasetError(
                f"trial {entry['path']}: unknown label {label!r} "
                f"(declared classes: {classes})"
            )
        declared_rate = entry.get("sampling_rate_hz")
        if declared_rate is not None and float(declared_rate) != rate:
            raise DatasetError(
                f"trial {entry['path']}: rate mismatch "
                f"({declared_rate} Hz declared vs {rate} Hz dataset)"
            )
        if not path.exists():
            raise DatasetError(f"missing trial file: {path}")
        channels, data = _read_trial_csv(path)
        if channels != list(entry["channels"]):
            raise DatasetError(
                f"trial {entry['path']}: channel names {channels} "
                f"do not match manifest {entry['channels']}"
            )
        trials.append(Trial(
            trial_id=Path(entry["path"]).stem,
            label=label,
            subject=entry.get("subject", ""),
            group=entry.get("group", ""),
            channels=channels,
            data=data,
        ))
    return Dataset(classes=classes, rate=rate, trials=trials)


def _read_trial_csv(path: Path):
    lines = path.read_text().splitlines()
    if not lines:
        raise DatasetError(f"trial file is empty: {path}")
    channels = lines[0].split(",")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        cells = line.split(",")
        if len(cells) != len(channels):
            raise DatasetError(
                f"{path}:{lineno}: expected {len(channels)} values, got {len(cells)}"
            )
        try:
            rows.append([float(c) for c in cells])
        except ValueError as exc:
            raise DatasetError(f"{path}:{lineno}: non-numeric sample: {exc}") from exc
    if not rows:
        raise DatasetError(f"trial file has no samples: {path}")
    return channels, np.array(rows, dtype=float)


def save_dataset(dataset: Dataset, out_dir) -> Path:
    """Write manifest.json plus one CSV per trial; returns the manifest path.

    Samples are rendered with shortest round-trip precision, so loading the
    written files reproduces the arrays bit-exactly.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for trial in dataset.trials:
        fname = f"{trial.trial_id}.csv"
        lines = [",".join(trial.channels)]
        lines.extend(",".join(repr(float(v)) for v in row) for row in trial.data)
        (out_dir / fname).write_text("\n".join(lines) + "\n")
        entries.append({
            "path": fname,
            "label": trial.label,
            "subject": trial.subject,
            "group": trial.group,
            "channels": trial.channels,
        })
    manifest = {
        "classes": dataset.classes,
        "sampling_rate_hz": dataset.rate,
        "trials": entries,
    }
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest_path


def decimate(signal: Signal, factor: int) -> Signal:
    """Anti-alias low-pass then keep every factor-th sample.

    The FIR filter is linear phase (applied centered, so no net delay) with
    passband edge at 0.8x the new Nyquist and >= 60 dB attenuation at and
    beyond the new Nyquist, which is where aliases would fold from.
    """
    factor = int(factor)
    if factor < 1:
        raise ValueError("decimation factor must be >= 1")
    if factor == 1:
        return Signal(samples=signal.samples.copy(), rate=signal.rate)
    new_nyq = signal.rate / factor / 2.0
    width = 0.2 * new_nyq
    numtaps, beta = sps.kaiserord(65.0, width / (signal.rate / 2.0))
    numtaps |= 1  # odd length -> symmetric taps, integer group delay
    if len(signal) < numtaps:
        raise ValueError(
            f"signal too short to decimate: {len(signal)} samples, "
            f"anti-alias filter needs {numtaps}"
        )
    taps = sps.firwin(numtaps, 0.9 * new_nyq, window=("kaiser", beta), fs=signal.rate)
    filtered = np.convolve(signal.samples, taps, mode="same")
    return Signal(samples=filtered[::factor], rate=signal.rate / factor)


# Default gesture vocabulary for synthetic classes.
_MOTION_NAMES = [
    "hand_open", "hand_close", "wrist_flexion", "wrist_extension",
    "forearm_pronation", "forearm_supination", "rest",
]


@dataclass(frozen=True)
class ClassSpec:
    """Spectral shape and level of one synthetic class: band (Hz) and RMS (mV)."""

    name: str
    band: tuple[float, float]
    amplitude: float
    group: str = "strong"

    def __post_init__(self):
        lo, hi = self.band
        if not (lo < hi):
            raise ValueError(f"class {self.name}: degenerate band {self.band}")
        if not (10.0 <= lo and hi <= 500.0):
            raise ValueError(f"class {self.name}: band {self.band} outside 10-500 Hz")
        if not self.amplitude > 0:
            raise ValueError(f"class {self.name}: amplitude must be positive")


def default_class_specs(n_classes: int, low: float = 30.0,
                        high: float = 450.0) -> list[ClassSpec]:
    """Disjoint bands spread over [low, high] with alternating strong/weak levels."""
    if n_classes < 1:
        raise ValueError("need at least one class")
    span = (high - low) / n_classes
    gap = min(20.0, 0.2 * span)
    specs = []
    for i in range(n_classes):
        name = _MOTION_NAMES[i] if i < len(_MOTION_NAMES) else f"gesture_{i + 1}"
        band = (low + i * span, low + (i + 1) * span - gap)
        if i % 2 == 0:
            amplitude, group = 100.0 - 5.0 * (i // 2), "strong"
        else:
            amplitude, group = 25.0 - 2.5 * (i // 2), "weak"
        specs.append(ClassSpec(name=name, band=band, amplitude=amplitude, group=group))
    return specs


@dataclass(frozen=True)
class SynthConfig:
    """Shape of a synthetic dataset."""

    classes: tuple[ClassSpec, ...]
    channels: int = 2
    trials_per_class: int = 6
    trial_ms: float = 3000.0
    rate: float = 1000.0
    seed: int = 0

    def __post_init__(self):
        if not self.classes:
            raise ValueError("need at least one class spec")
        if self.channels < 1 or self.trials_per_class < 1:
            raise ValueError("channels and trials_per_class must be >= 1")
        if not (self.trial_ms > 0 and self.rate > 0):
            raise ValueError("trial_ms and rate must be positive")
        for spec in self.classes:
            if spec.band[1] >= self.rate / 2.0:
                raise ValueError(
                    f"class {spec.name}: band edge {spec.band[1]} Hz reaches "
                    f"Nyquist ({self.rate / 2.0} Hz)"
                )


def synthesize_emg(cfg: SynthConfig) -> Dataset:
    """Generate a labeled dataset of band-limited Gaussian trials.

    Each (class, trial, channel) stream is seeded independently from the base
    seed, so the dataset is bit-reproducible and channels are uncorrelated.
    Trials are normalized to the class RMS amplitude.
    """
    n = int(round(cfg.trial_ms * cfg.rate / 1000.0))
    if n < 2:
        raise ValueError("trial_ms too short for the sampling rate")
    pad = max(n // 2, 256)  # settle the filter before the kept span
    trials = []
    for c_idx, spec in enumerate(cfg.classes):
        sos = sps.butter(4, spec.band, btype="bandpass", fs=cfg.rate, output="sos")
        for t_idx in range(cfg.trials_per_class):
            data = np.empty((n, cfg.channels))
            for ch in range(cfg.channels):
                rng = np.random.default_rng([cfg.seed, c_idx, t_idx, ch])
                white = rng.standard_normal(n + 2 * pad)
                shaped = sps.sosfiltfilt(sos, white)[pad:pad + n]
                data[:, ch] = shaped * (spec.amplitude / math.sqrt(np.mean(shaped ** 2)))
            trials.append(Trial(
                trial_id=f"{spec.name}_{t_idx + 1:02d}",
                label=spec.name,
                subject="synthetic",
                group=spec.group,
                channels=[f"ch{ch + 1}" for ch in range(cfg.channels)],
                data=data,
            ))
    return Dataset(classes=[s.name for s in cfg.classes], rate=cfg.rate, trials=trials)
