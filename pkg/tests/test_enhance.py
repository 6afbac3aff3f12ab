import numpy as np
import pytest

from neuroseg.enhance import (
    WindowLevel,
    bandpass,
    hamming_lowpass,
    sobel,
    window_level,
)
from neuroseg.errors import ValidationError


class TestWindowLevel:
    def test_min_max_stretch(self, rng):
        data = rng.random((16, 16)) * 100
        lo, hi = data.min(), data.max()
        out = window_level(data, WindowLevel(hi - lo, (hi + lo) / 2))
        assert out[np.unravel_index(data.argmin(), data.shape)] == 0
        assert out[np.unravel_index(data.argmax(), data.shape)] == 255

    def test_zero_window_threshold(self):
        out = window_level(np.array([[5.0, 15.0]]), WindowLevel(0, 10))
        assert out.tolist() == [[0, 255]]

    def test_center_maps_to_128(self):
        # direct formula: 255 * 0.5 = 127.5, round half up
        out = window_level(np.array([[10.0]]), WindowLevel(20, 10))
        assert out[0, 0] == 128

    def test_monotone(self, rng):
        data = np.sort(rng.random(64) * 50).reshape(1, 64)
        out = window_level(data, WindowLevel(30, 25)).ravel()
        assert np.all(np.diff(out.astype(int)) >= 0)

    def test_negative_window_rejected(self):
        with pytest.raises(ValidationError):
            WindowLevel(-1, 0)


class TestBandpass:
    def test_full_band_identity(self, rng):
        data = rng.random((24, 20)) * 10
        out = bandpass(data, 0.0, 1.0)
        assert np.max(np.abs(out - data)) < 1e-6 * 10

    def test_dc_removed(self):
        data = np.full((16, 16), 3.0)
        out = bandpass(data, 0.1, 1.0)
        assert np.max(np.abs(out)) < 1e-9

    def test_sinusoid_band_selection(self):
        # DFT construction oracle: pure sinusoid at radial frequency 0.25
        n = 64
        u = np.arange(n)
        freq = 0.25 * 0.5  # cycles/sample at r = 0.25
        data = np.cos(2 * np.pi * freq * u)[:, None] * np.ones((1, n))
        kept = bandpass(data, 0.2, 0.3)
        assert np.allclose(kept, data, atol=1e-9)
        cut = bandpass(data, 0.4, 0.6)
        assert np.max(np.abs(cut)) < 0.01 * np.max(np.abs(data))

    def test_linearity(self, rng):
        x = rng.random((12, 12))
        y = rng.random((12, 12))
        lhs = bandpass(2 * x + 3 * y, 0.1, 0.7)
        rhs = 2 * bandpass(x, 0.1, 0.7) + 3 * bandpass(y, 0.1, 0.7)
        assert np.allclose(lhs, rhs, atol=1e-6)

    def test_lo_above_hi(self):
        with pytest.raises(ValidationError):
            bandpass(np.zeros((4, 4)), 0.5, 0.2)


class TestSobel:
    def test_constant_zero(self):
        assert np.all(sobel(np.full((8, 8), 4.0)) == 0)

    def test_vertical_step_response(self):
        # hand convolution oracle: step of height 3 between columns 3 and 4
        data = np.zeros((8, 8))
        data[:, 4:] = 3.0
        out = sobel(data)
        assert np.allclose(out[:, 3], 12.0)
        assert np.allclose(out[:, 4], 12.0)
        assert np.allclose(out[:, :3], 0.0)
        assert np.allclose(out[:, 5:], 0.0)

    def test_too_small(self):
        with pytest.raises(ValidationError):
            sobel(np.zeros((2, 2)))

    def test_rotation_symmetry(self, rng):
        data = rng.random((16, 16))
        assert np.allclose(sobel(data.T), sobel(data).T)


class TestHammingLowpass:
    def test_dc_preserved_exactly(self):
        data = np.full((10, 14), 6.25)
        out = hamming_lowpass(data, 0.3)
        assert np.allclose(out, data, atol=1e-12)

    def test_zero_slice(self):
        assert np.all(hamming_lowpass(np.zeros((8, 8)), 0.5) == 0)

    def test_checkerboard_attenuated(self):
        # DFT oracle: checkerboard is pure Nyquist content
        n = 16
        data = ((np.arange(n)[:, None] + np.arange(n)[None, :]) % 2).astype(float)
        data = 2 * data - 1
        out = hamming_lowpass(data, 0.2)
        assert np.max(np.abs(out)) < 0.01

    def test_linearity(self, rng):
        x = rng.random((10, 10))
        y = rng.random((10, 10))
        lhs = hamming_lowpass(x + 2 * y, 0.4)
        rhs = hamming_lowpass(x, 0.4) + 2 * hamming_lowpass(y, 0.4)
        assert np.allclose(lhs, rhs, atol=1e-6)

    def test_invalid_cutoff(self):
        with pytest.raises(ValidationError):
            hamming_lowpass(np.zeros((4, 4)), 0.0)
