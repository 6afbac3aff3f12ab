"""Semi-automatic brain extraction: adjustable threshold, morphology,
largest component, hole fill.

The extractor is a named, swappable backend so a learned model can be
plugged in later behind the same contract.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import EmptyExtractionError, UnimodalInputError
from .segment import LabelMap
from .volume import Volume3D, histogram, histogram_edges


@dataclass(frozen=True)
class ExtractParams:
    """threshold_offset shifts the automatic threshold in intensity units;
    morph_radius_mm sizes the opening/closing ball."""

    threshold_offset: float = 0.0
    morph_radius_mm: float = 2.0

    def __post_init__(self):
        if self.morph_radius_mm < 0:
            raise ValueError(f"morph radius must be >= 0, got {self.morph_radius_mm}")


def otsu_threshold(counts, edges) -> float:
    """Threshold maximizing between-class variance; ties go low."""
    counts = np.asarray(counts, dtype=np.float64)
    edges = np.asarray(edges, dtype=np.float64)
    if np.count_nonzero(counts) < 2:
        raise UnimodalInputError("histogram has fewer than two occupied bins")
    centers = (edges[:-1] + edges[1:]) / 2.0
    total = counts.sum()
    w0 = np.cumsum(counts)[:-1]
    w1 = total - w0
    m0 = np.cumsum(counts * centers)[:-1]
    m1 = counts @ centers - m0
    valid = (w0 > 0) & (w1 > 0)
    variance = np.full(len(w0), -np.inf)
    variance[valid] = (w0[valid] * w1[valid]
                       * (m0[valid] / w0[valid] - m1[valid] / w1[valid]) ** 2)
    best = int(np.argmax(variance))  # argmax returns the first (lowest) tie
    return float(edges[best + 1])


def _ball(radii) -> np.ndarray:
    shape = [2 * int(np.floor(r)) + 1 for r in radii]
    grids = np.meshgrid(*[np.arange(n) - n // 2 for n in shape], indexing="ij")
    dist = sum((g / max(r, 1e-9)) ** 2 for g, r in zip(grids, radii))
    return dist <= 1.0


def extract_brain(vol: Volume3D, params: ExtractParams = ExtractParams()) -> LabelMap:
    """Binary brain mask (label 1) from a classical threshold pipeline."""
    data = np.asarray(vol.frame(0))
    if float(data.min()) == float(data.max()):
        raise UnimodalInputError("volume is constant; no threshold exists")
    counts = histogram(data, 256)
    edges = histogram_edges(data, 256)
    threshold = otsu_threshold(counts, edges) + params.threshold_offset
    mask = data > threshold
    if not mask.any():
        raise EmptyExtractionError(
            f"nothing above threshold {threshold:g}; lower the offset")
    radii = [params.morph_radius_mm / s for s in vol.spacing]
    if any(r >= 1 for r in radii):
        ball = _ball(radii)
        mask = ndimage.binary_opening(mask, structure=ball)
        if not mask.any():
            raise EmptyExtractionError(
                "mask vanished during opening; lower the offset")
        mask = ndimage.binary_closing(mask, structure=ball)
    six = ndimage.generate_binary_structure(3, 1)
    comp, n = ndimage.label(mask, structure=six)
    if n > 1:
        sizes = ndimage.sum_labels(np.ones_like(comp), comp, range(1, n + 1))
        mask = comp == (int(np.argmax(sizes)) + 1)
    mask = ndimage.binary_fill_holes(mask, structure=six)
    return LabelMap(mask.astype(np.int32))
