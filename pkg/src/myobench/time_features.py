"""Time-domain sEMG feature extractors.

Thirteen amplitude- and event-based features computed over one window of
samples x_1..x_N. All functions take a 1-D array and return a scalar, except
``mavslp`` (k-1 slope values) and ``hemg`` (one count per histogram bin).

Threshold units are the same as the sample units (mV as stored); the usual
working range for the event counters is 10-50 mV depending on amplifier gain.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Robustness-suite defaults: ZC and WAMP work best gated at 10 mV, SSC at 30 mV.
DEFAULT_ZC_THRESHOLD = 10.0
DEFAULT_SSC_THRESHOLD = 30.0
DEFAULT_WAMP_THRESHOLD = 10.0
DEFAULT_MAVSLP_SEGMENTS = 3
DEFAULT_HEMG_BINS = 3


@dataclass(frozen=True)
class ThresholdParams:
    """Amplitude gates (mV) for the three event counters."""

    zc: float = DEFAULT_ZC_THRESHOLD
    ssc: float = DEFAULT_SSC_THRESHOLD
    wamp: float = DEFAULT_WAMP_THRESHOLD

    def __post_init__(self):
        if self.zc < 0 or self.ssc < 0 or self.wamp < 0:
            raise ValueError("thresholds must be non-negative")


def _window(x, min_len: int = 1) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < min_len:
        raise ValueError(f"need a 1-D window of at least {min_len} samples")
    return x


def iemg(window) -> float:
    """Integrated EMG: sum of absolute sample values."""
    x = _window(window)
    return float(np.sum(np.abs(x)))


def mav(window) -> float:
    """Mean absolute value: iemg / N."""
    x = _window(window)
    return float(np.mean(np.abs(x)))


def mmav1(window) -> float:
    """MAV with a stepped weighting window.

    Samples in the central half of the window (0.25N <= n <= 0.75N, 1-based)
    get weight 1, the rest weight 0.5.
    """
    x = _window(window, min_len=4)
    n = x.size
    idx = np.arange(1, n + 1, dtype=float)
    w = np.where((0.25 * n <= idx) & (idx <= 0.75 * n), 1.0, 0.5)
    return float(np.mean(w * np.abs(x)))


def mmav2(window) -> float:
    """MAV with a continuous (ramped) weighting window.

    Central half weighted 1; the leading quarter ramps up as 4n/N and the
    trailing quarter ramps down as 4(N-n)/N, so weights stay non-negative and
    taper smoothly to the window edges.
    """
    x = _window(window, min_len=4)
    n = x.size
    idx = np.arange(1, n + 1, dtype=float)
    w = np.where(
        (0.25 * n <= idx) & (idx <= 0.75 * n),
        1.0,
        np.where(idx < 0.25 * n, 4.0 * idx / n, 4.0 * (n - idx) / n),
    )
    return float(np.mean(w * np.abs(x)))


def mavslp(window, segments: int = DEFAULT_MAVSLP_SEGMENTS) -> np.ndarray:
    """Differences between MAVs of consecutive equal sub-segments.

    The window is split into ``segments`` equal parts (its length must divide
    evenly); returns the segments-1 values MAV_{i+1} - MAV_i.
    """
    x = _window(window)
    k = int(segments)
    if k < 2:
        raise ValueError("mavslp needs at least 2 segments")
    if x.size % k != 0:
        raise ValueError(
            f"window of {x.size} samples does not divide into {k} equal segments"
        )
    mavs = np.abs(x).reshape(k, -1).mean(axis=1)
    return np.diff(mavs)


def ssi(window) -> float:
    """Simple square integral: total energy sum(x_n^2)."""
    x = _window(window)
    return float(np.sum(x * x))


def var(window) -> float:
    """Signal power as sum(x_n^2) / (N-1); no mean subtraction (EMG is ~zero-mean)."""
    x = _window(window, min_len=2)
    return float(np.sum(x * x) / (x.size - 1))


def rms(window) -> float:
    """Root mean square amplitude."""
    x = _window(window)
    return float(np.sqrt(np.mean(x * x)))


def wl(window) -> float:
    """Waveform length: cumulative absolute sample-to-sample change."""
    x = _window(window, min_len=2)
    return float(np.sum(np.abs(np.diff(x))))


def zc(window, threshold: float = DEFAULT_ZC_THRESHOLD) -> int:
    """Zero crossings: sign changes whose jump clears the threshold.

    Counts n where x_n * x_{n+1} < 0 and |x_n - x_{n+1}| >= threshold; the
    amplitude gate suppresses crossings caused by background noise.
    """
    x = _window(window, min_len=2)
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    prod = x[:-1] * x[1:]
    jump = np.abs(np.diff(x))
    return int(np.count_nonzero((prod < 0) & (jump >= threshold)))


def ssc(window, threshold: float = DEFAULT_SSC_THRESHOLD) -> int:
    """Slope sign changes among consecutive sample triples.

    Counts interior n where (x_n - x_{n-1}) * (x_n - x_{n+1}) >= threshold,
    i.e. local turns whose curvature product clears the gate.
    """
    x = _window(window, min_len=3)
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    left = x[1:-1] - x[:-2]
    right = x[1:-1] - x[2:]
    return int(np.count_nonzero(left * right >= threshold))


def wamp(window, threshold: float = DEFAULT_WAMP_THRESHOLD) -> int:
    """Willison amplitude: adjacent-sample differences at or above the threshold."""
    x = _window(window, min_len=2)
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    return int(np.count_nonzero(np.abs(np.diff(x)) >= threshold))


def hemg(window, bins: int = DEFAULT_HEMG_BINS, limit: float = 1.0) -> np.ndarray:
    """Amplitude histogram: sample counts in equal-width bins over [-limit, +limit].

    The symmetric range is supplied rather than taken per window so counts
    stay comparable across windows; samples outside it are clamped into the
    nearest edge bin, so the counts always sum to N.
    """
    x = _window(window)
    b = int(bins)
    if b < 1:
        raise ValueError("hemg needs at least 1 bin")
    if not limit > 0:
        raise ValueError("hemg range limit must be positive")
    width = 2.0 * limit / b
    idx = np.clip(np.floor((x + limit) / width).astype(int), 0, b - 1)
    return np.bincount(idx, minlength=b)
