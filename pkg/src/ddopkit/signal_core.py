"""Sampled-signal containers and discrete Fourier arithmetic.

Conventions used throughout the package:

* A ``TimeGrid`` places sample k at ``start_time + (k + 0.5) * sample_interval``
  (midpoint rule). Energies and inner products are midpoint Riemann sums, so
  removable singularities and support edges stay off the sample points on the
  default grids.
* ``dft_spectrum`` scales the FFT by the sample interval and anchors the phase
  at the true time of the first sample. The discrete Parseval identity is then
  exact to rounding for any zero-pad factor, and a signal starting at t0
  carries the continuous-time factor exp(-2j*pi*f*t0).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "InvalidInputError",
    "GridMismatchError",
    "DegenerateInputError",
    "InvalidGridError",
    "TimeGrid",
    "SampledSignal",
    "Spectrum",
    "energy",
    "spectral_energy",
    "inner_product",
    "dft_spectrum",
]


class InvalidInputError(ValueError):
    """An argument violates an operation's precondition."""


class GridMismatchError(ValueError):
    """Two signals that must share a grid do not."""


class DegenerateInputError(ValueError):
    """Zero-energy signal or empty analysis band."""


class InvalidGridError(ValueError):
    """A grid cannot hold the requested construction."""


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid; sample k lives at start_time + (k + 1/2) * sample_interval."""

    start_time: float
    sample_interval: float
    num_samples: int

    def __post_init__(self) -> None:
        if not self.sample_interval > 0:
            raise InvalidInputError(f"sample_interval must be > 0, got {self.sample_interval}")
        if self.num_samples < 2:
            raise InvalidInputError(f"num_samples must be >= 2, got {self.num_samples}")

    @property
    def sample_rate(self) -> float:
        return 1.0 / self.sample_interval

    @property
    def duration(self) -> float:
        return self.num_samples * self.sample_interval

    @property
    def end_time(self) -> float:
        return self.start_time + self.duration

    def times(self) -> np.ndarray:
        """Midpoint sample times."""
        k = np.arange(self.num_samples)
        return self.start_time + (k + 0.5) * self.sample_interval


@dataclass(frozen=True)
class SampledSignal:
    """Complex samples on a TimeGrid."""

    grid: TimeGrid
    samples: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.complex128)
        if samples.ndim != 1:
            raise InvalidInputError(f"samples must be 1-d, got shape {samples.shape}")
        if samples.shape[0] != self.grid.num_samples:
            raise InvalidInputError(
                f"sample count {samples.shape[0]} does not match grid ({self.grid.num_samples})"
            )
        object.__setattr__(self, "samples", samples)


@dataclass(frozen=True)
class Spectrum:
    """Complex spectral values on a uniform frequency grid (bin k at start_freq + k * freq_interval)."""

    start_freq: float
    freq_interval: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if not self.freq_interval > 0:
            raise InvalidInputError(f"freq_interval must be > 0, got {self.freq_interval}")
        values = np.asarray(self.values, dtype=np.complex128)
        if values.ndim != 1 or values.shape[0] < 2:
            raise InvalidInputError("values must be a 1-d array with at least 2 bins")
        object.__setattr__(self, "values", values)

    def frequencies(self) -> np.ndarray:
        return self.start_freq + np.arange(self.values.shape[0]) * self.freq_interval


def energy(signal: SampledSignal) -> float:
    """Midpoint Riemann sum of |g(t)|^2."""
    if signal.samples.size == 0:
        raise InvalidInputError("empty signal")
    mags = np.abs(signal.samples)
    return float(np.dot(mags, mags) * signal.grid.sample_interval)


def spectral_energy(spectrum: Spectrum) -> float:
    """Riemann sum of |G(f)|^2 over the spectrum's grid."""
    mags = np.abs(spectrum.values)
    return float(np.dot(mags, mags) * spectrum.freq_interval)


def inner_product(x: SampledSignal, y: SampledSignal) -> complex:
    """Riemann sum of x(t) * conj(y(t)) * dt. Grids must be identical."""
    if x.grid != y.grid:
        raise GridMismatchError(f"grids differ: {x.grid} vs {y.grid}")
    return complex(np.vdot(y.samples, x.samples) * x.grid.sample_interval)


def dft_spectrum(signal: SampledSignal, zero_pad_factor: int = 4) -> Spectrum:
    """Discrete approximation of the continuous Fourier transform.

    Parameters
    ----------
    signal : SampledSignal
    zero_pad_factor : int
        The transform length is zero_pad_factor * num_samples, so the bin
        spacing is sample_rate / (zero_pad_factor * num_samples).

    Returns
    -------
    Spectrum
        Bin values approximate G(f) = integral g(t) exp(-2j*pi*f*t) dt at the
        bin frequencies; Parseval holds to rounding for any zero_pad_factor.
    """
    if int(zero_pad_factor) != zero_pad_factor or zero_pad_factor < 1:
        raise InvalidInputError(f"zero_pad_factor must be a positive integer, got {zero_pad_factor}")
    dt = signal.grid.sample_interval
    n = signal.grid.num_samples
    length = int(zero_pad_factor) * n
    raw = np.fft.fftshift(np.fft.fft(signal.samples, length))
    freqs = np.fft.fftshift(np.fft.fftfreq(length, d=dt))
    # Anchor the phase at the first sample's true time; the aliased negative
    # frequencies pick up exp(2j*pi*fs*j*dt) = 1 at integer j, so this is
    # consistent with the unshifted transform.
    t_first = signal.grid.start_time + 0.5 * dt
    values = raw * dt * np.exp(-2j * np.pi * freqs * t_first)
    return Spectrum(start_freq=float(freqs[0]), freq_interval=1.0 / (length * dt), values=values)
