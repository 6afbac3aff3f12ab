"""Slice-level display and preprocessing filters.

These operate on plain 2D float arrays and never mutate stored volumes;
callers apply them to display or derived copies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import ValidationError


@dataclass(frozen=True)
class WindowLevel:
    """Linear intensity-to-display mapping: center `level`, width `window`."""

    window: float
    level: float

    def __post_init__(self):
        if self.window < 0:
            raise ValidationError(f"window must be >= 0, got {self.window}")


def window_level(data: np.ndarray, wl: WindowLevel) -> np.ndarray:
    """Map intensities to 8-bit display values (round-half-up)."""
    data = np.asarray(data, dtype=np.float64)
    if data.size == 0:
        raise ValidationError("empty slice")
    if wl.window == 0:
        return np.where(data >= wl.level, 255, 0).astype(np.uint8)
    lo = wl.level - wl.window / 2.0
    scaled = 255.0 * (data - lo) / wl.window
    return np.clip(np.floor(scaled + 0.5), 0, 255).astype(np.uint8)


def _radial_frequency(shape) -> np.ndarray:
    # Normalized so the per-axis Nyquist is 1; the combined radius is capped
    # at 1 so a [0, 1] band keeps every coefficient.
    fu = np.fft.fftfreq(shape[0]) / 0.5
    fv = np.fft.fftfreq(shape[1]) / 0.5
    r = np.hypot(fu[:, None], fv[None, :])
    return np.minimum(r, 1.0)


def bandpass(data: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Ideal annulus band-pass in the 2D frequency domain."""
    if lo > hi:
        raise ValidationError(f"band lo {lo} exceeds hi {hi}")
    if not (0 <= lo <= 1 and 0 <= hi <= 1):
        raise ValidationError(f"band limits must lie in [0, 1], got ({lo}, {hi})")
    data = np.asarray(data, dtype=np.float64)
    spectrum = np.fft.fft2(data)
    r = _radial_frequency(data.shape)
    spectrum[(r < lo) | (r > hi)] = 0
    return np.real(np.fft.ifft2(spectrum))


def sobel(data: np.ndarray) -> np.ndarray:
    """Gradient magnitude with the standard 3x3 kernels, replicate borders."""
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] < 3 or data.shape[1] < 3:
        raise ValidationError(f"sobel needs a slice of at least 3x3, got {data.shape}")
    kx = np.array([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])
    gx = ndimage.correlate(data, kx, mode="nearest")
    gy = ndimage.correlate(data, kx.T, mode="nearest")
    return np.hypot(gx, gy)


def hamming_lowpass(data: np.ndarray, cutoff: float) -> np.ndarray:
    """Raised-cosine low-pass: w(r) = 0.54 + 0.46 cos(pi r / cutoff), DC gain 1."""
    if not 0 < cutoff <= 1:
        raise ValidationError(f"cutoff must lie in (0, 1], got {cutoff}")
    data = np.asarray(data, dtype=np.float64)
    spectrum = np.fft.fft2(data)
    r = _radial_frequency(data.shape)
    w = np.where(r <= cutoff, 0.54 + 0.46 * np.cos(np.pi * r / cutoff), 0.0)
    return np.real(np.fft.ifft2(spectrum * w))
