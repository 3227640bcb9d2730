"""Frequency-domain sEMG features: AR coefficients and spectral moments.

The autoregressive model follows the convention

    x_n = -sum_{i=1..p} a_i * x_{n-i} + w_n

so a process generated as x_n = phi * x_{n-1} + w_n estimates a_1 ~ -phi.
Coefficients come from the autocorrelation (Yule-Walker) equations solved with
the Levinson-Durbin recursion, which keeps the fitted model stationary.

The four spectral moments are the mean and median frequency computed on the
power spectrum (mnf, mdf) and their modified counterparts computed on the
amplitude spectrum (mmnf, mmdf). The amplitude-based pair is the
noise-robust variant: squaring the spectrum amplifies bin-to-bin variation,
so moments of A_j move less under broadband noise than moments of A_j^2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .signals import PowerSpectrum, Signal, Spectrum, amplitude_spectrum, power_spectrum


@dataclass
class ArModel:
    """Fitted AR model: order, coefficients a_1..a_p, and residual variance."""

    order: int
    coefficients: np.ndarray
    noise_variance: float

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        if self.order < 1 or self.coefficients.size != self.order:
            raise ValueError("coefficient count must equal a positive order")
        if self.noise_variance < 0:
            raise ValueError("noise variance must be non-negative")

    def is_stationary(self) -> bool:
        """True when all characteristic roots lie inside the unit circle."""
        roots = np.roots(np.concatenate(([1.0], self.coefficients)))
        return bool(np.all(np.abs(roots) < 1.0))


def ar_coefficients(window, order: int = 1) -> ArModel:
    """Fit an AR(order) model by Yule-Walker / Levinson-Durbin.

    Uses the biased autocorrelation estimate r_k = sum(x_n x_{n+k}) / N with
    no mean removal, so for order 1 the result is exactly a_1 = -r_1/r_0.
    Raises on an identically-zero window (singular autocorrelation) and when
    order >= window length.
    """
    x = np.asarray(window, dtype=float)
    p = int(order)
    if x.ndim != 1:
        raise ValueError("need a 1-D window")
    if p < 1:
        raise ValueError("AR order must be >= 1")
    if p >= x.size:
        raise ValueError(f"AR order {p} needs more than {x.size} samples")
    n = x.size
    r = np.array([np.dot(x[: n - k], x[k:]) for k in range(p + 1)]) / n
    if r[0] <= 0:
        raise ValueError("window is identically zero; autocorrelation is singular")

    phi = np.zeros(p)
    energy = r[0]
    for i in range(1, p + 1):
        acc = r[i] - np.dot(phi[: i - 1], r[1:i][::-1])
        if energy <= 0:
            raise ValueError("prediction error collapsed to zero; window is degenerate")
        k = acc / energy
        phi[: i - 1] = phi[: i - 1] - k * phi[: i - 1][::-1]
        phi[i - 1] = k
        energy *= 1.0 - k * k
    return ArModel(order=p, coefficients=-phi, noise_variance=float(max(energy, 0.0)))


def _moment_arrays(freqs, weights, include_dc: bool):
    freqs = np.asarray(freqs, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if not include_dc:
        keep = freqs != 0.0
        freqs, weights = freqs[keep], weights[keep]
    total = np.sum(weights)
    if not total > 0:
        raise ValueError("spectrum has no mass; mean/median frequency undefined")
    return freqs, weights, total


def _centroid(freqs, weights, include_dc: bool) -> float:
    freqs, weights, total = _moment_arrays(freqs, weights, include_dc)
    return float(np.sum(freqs * weights) / total)


def _median_bin(freqs, weights, include_dc: bool) -> float:
    # Discrete rule: smallest bin whose cumulative weight reaches half the
    # total; exact half-splits land on the lower-frequency candidate.
    freqs, weights, total = _moment_arrays(freqs, weights, include_dc)
    cum = np.cumsum(weights)
    idx = int(np.searchsorted(cum, 0.5 * total, side="left"))
    return float(freqs[min(idx, freqs.size - 1)])


def mnf(spectrum: PowerSpectrum, include_dc: bool = True) -> float:
    """Mean frequency: power-weighted centroid sum(f_j P_j) / sum(P_j)."""
    return _centroid(spectrum.freqs, spectrum.powers, include_dc)


def mdf(spectrum: PowerSpectrum, include_dc: bool = True) -> float:
    """Median frequency: bin splitting the cumulative power in half."""
    return _median_bin(spectrum.freqs, spectrum.powers, include_dc)


def mmnf(spectrum: Spectrum, include_dc: bool = True) -> float:
    """Modified mean frequency: amplitude-weighted centroid sum(f_j A_j) / sum(A_j)."""
    return _centroid(spectrum.freqs, spectrum.amplitudes, include_dc)


def mmdf(spectrum: Spectrum, include_dc: bool = True) -> float:
    """Modified median frequency: bin splitting the cumulative amplitude in half."""
    return _median_bin(spectrum.freqs, spectrum.amplitudes, include_dc)


@dataclass(frozen=True)
class SpectralMoments:
    """The four moments of one window's spectrum, all in Hz."""

    mnf: float
    mdf: float
    mmnf: float
    mmdf: float


def spectral_moments(window, rate: float | None = None,
                     include_dc: bool = True) -> SpectralMoments:
    """All four moments from a single spectrum computation."""
    if isinstance(window, Signal):
        spec = amplitude_spectrum(window)
    else:
        spec = amplitude_spectrum(window, rate)
    ps = power_spectrum(spec)
    return SpectralMoments(
        mnf=mnf(ps, include_dc),
        mdf=mdf(ps, include_dc),
        mmnf=mmnf(spec, include_dc),
        mmdf=mmdf(spec, include_dc),
    )
