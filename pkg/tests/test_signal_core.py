"""Grid, signal, and transform layer."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ddopkit.signal_core import (
    GridMismatchError,
    InvalidInputError,
    SampledSignal,
    Spectrum,
    TimeGrid,
    dft_spectrum,
    energy,
    inner_product,
    spectral_energy,
)


def gaussian_signal(half_span=8.0, n=4096):
    grid = TimeGrid(start_time=-half_span, sample_interval=2 * half_span / n, num_samples=n)
    t = grid.times()
    return SampledSignal(grid=grid, samples=np.exp(-np.pi * t * t))


class TestTimeGrid:
    def test_midpoint_times(self):
        grid = TimeGrid(start_time=0.0, sample_interval=0.5, num_samples=4)
        assert np.allclose(grid.times(), [0.25, 0.75, 1.25, 1.75])

    def test_derived_quantities(self):
        grid = TimeGrid(start_time=-1.0, sample_interval=0.25, num_samples=8)
        assert grid.duration == 2.0
        assert grid.end_time == 1.0
        assert grid.sample_rate == 4.0

    @pytest.mark.parametrize("dt", [0.0, -1.0])
    def test_rejects_bad_interval(self, dt):
        with pytest.raises(InvalidInputError):
            TimeGrid(start_time=0.0, sample_interval=dt, num_samples=4)

    def test_rejects_too_few_samples(self):
        with pytest.raises(InvalidInputError):
            TimeGrid(start_time=0.0, sample_interval=0.1, num_samples=1)


class TestSampledSignal:
    def test_length_mismatch(self):
        grid = TimeGrid(start_time=0.0, sample_interval=0.1, num_samples=4)
        with pytest.raises(InvalidInputError):
            SampledSignal(grid=grid, samples=np.zeros(5))

    def test_rejects_2d(self):
        grid = TimeGrid(start_time=0.0, sample_interval=0.1, num_samples=4)
        with pytest.raises(InvalidInputError):
            SampledSignal(grid=grid, samples=np.zeros((2, 2)))

    def test_coerces_complex(self):
        grid = TimeGrid(start_time=0.0, sample_interval=0.1, num_samples=4)
        sig = SampledSignal(grid=grid, samples=np.ones(4))
        assert sig.samples.dtype == np.complex128


class TestSpectrum:
    def test_minimum_bins(self):
        with pytest.raises(InvalidInputError):
            Spectrum(start_freq=0.0, freq_interval=1.0, values=np.ones(1))

    def test_frequencies(self):
        sp = Spectrum(start_freq=-1.0, freq_interval=0.5, values=np.ones(4))
        assert np.allclose(sp.frequencies(), [-1.0, -0.5, 0.0, 0.5])


class TestEnergy:
    def test_rectangle(self):
        grid = TimeGrid(start_time=0.0, sample_interval=0.01, num_samples=100)
        sig = SampledSignal(grid=grid, samples=2.0 * np.ones(100))
        assert energy(sig) == pytest.approx(4.0)

    def test_gaussian_unit(self):
        # int exp(-2 pi t^2) dt = 1/sqrt(2)
        assert energy(gaussian_signal()) == pytest.approx(2 ** -0.5, rel=1e-12)


class TestInnerProduct:
    def test_conjugate_symmetry_and_linearity(self):
        grid = TimeGrid(start_time=0.0, sample_interval=0.1, num_samples=64)
        rng = np.random.default_rng(7)
        x = SampledSignal(grid=grid, samples=rng.normal(size=64) + 1j * rng.normal(size=64))
        y = SampledSignal(grid=grid, samples=rng.normal(size=64) + 1j * rng.normal(size=64))
        assert inner_product(x, y) == pytest.approx(np.conj(inner_product(y, x)))
        two_x = SampledSignal(grid=grid, samples=2.0 * x.samples)
        assert inner_product(two_x, y) == pytest.approx(2.0 * inner_product(x, y))
        assert inner_product(x, x).real == pytest.approx(energy(x))

    def test_grid_mismatch(self):
        g1 = TimeGrid(start_time=0.0, sample_interval=0.1, num_samples=4)
        g2 = TimeGrid(start_time=0.5, sample_interval=0.1, num_samples=4)
        with pytest.raises(GridMismatchError):
            inner_product(SampledSignal(grid=g1, samples=np.ones(4)),
                          SampledSignal(grid=g2, samples=np.ones(4)))


class TestDftSpectrum:
    def test_gaussian_transform_pairs(self):
        """exp(-pi t^2) transforms to exp(-pi f^2); check on a few bins."""
        sp = dft_spectrum(gaussian_signal(), zero_pad_factor=2)
        f = sp.frequencies()
        for target in (0.0, 0.5, 1.0, 2.0):
            k = int(np.argmin(np.abs(f - target)))
            assert abs(sp.values[k]) == pytest.approx(np.exp(-np.pi * f[k] ** 2), abs=1e-9)

    def test_frequency_grid(self):
        sig = gaussian_signal(n=256)
        sp = dft_spectrum(sig, zero_pad_factor=4)
        length = 4 * 256
        assert sp.values.shape[0] == length
        assert sp.freq_interval == pytest.approx(1.0 / (length * sig.grid.sample_interval))
        # fftshifted grid is symmetric about 0 up to one bin
        f = sp.frequencies()
        assert f[0] == pytest.approx(-0.5 * sig.grid.sample_rate)

    def test_time_shift_changes_only_phase(self):
        sig = gaussian_signal(n=1024)
        moved = SampledSignal(
            grid=TimeGrid(start_time=sig.grid.start_time + 3.0,
                          sample_interval=sig.grid.sample_interval,
                          num_samples=sig.grid.num_samples),
            samples=sig.samples,
        )
        a = dft_spectrum(sig, zero_pad_factor=2)
        b = dft_spectrum(moved, zero_pad_factor=2)
        assert np.allclose(np.abs(a.values), np.abs(b.values), atol=1e-12)
        f = a.frequencies()
        k = int(np.argmin(np.abs(f - 0.25)))
        expected = a.values[k] * np.exp(-2j * np.pi * f[k] * 3.0)
        assert b.values[k] == pytest.approx(expected, rel=1e-9)

    def test_rejects_bad_pad(self):
        with pytest.raises(InvalidInputError):
            dft_spectrum(gaussian_signal(n=64), zero_pad_factor=0)


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**31),
    n=st.integers(min_value=8, max_value=400),
    zero_pad=st.integers(min_value=1, max_value=6),
)
def test_parseval_any_padding(seed, n, zero_pad):
    """Time-domain and spectral energies agree for any signal and pad factor."""
    rng = np.random.default_rng(seed)
    grid = TimeGrid(start_time=float(rng.normal()), sample_interval=float(rng.uniform(0.01, 1.0)),
                    num_samples=n)
    sig = SampledSignal(grid=grid, samples=rng.normal(size=n) + 1j * rng.normal(size=n))
    e = energy(sig)
    se = spectral_energy(dft_spectrum(sig, zero_pad_factor=zero_pad))
    assert se == pytest.approx(e, rel=1e-12)
