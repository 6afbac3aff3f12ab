"""Core voxel-grid types: volumes, planes, color schemes and coordinate maps.

The in-memory convention is RAS-oriented, x-fastest storage. Arrays are
indexed ``[x, y, z]`` (plus a trailing frame axis for 4D data) and
intensities are promoted to float32; the original storage type is kept in
``dtype_tag`` so files can be written back faithfully.
"""

from __future__ import annotations

import colorsys
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateAffineError,
    DegenerateOrientationError,
    RangeError,
    ValidationError,
)

PLANES = ("axial", "coronal", "sagittal")

# Axis held constant by each plane (canonical RAS indexing).
PLANE_FIXED_AXIS = {"axial": 2, "coronal": 1, "sagittal": 0}

# In-plane (u, v) axes for each plane.
PLANE_FREE_AXES = {"axial": (0, 1), "coronal": (0, 2), "sagittal": (1, 2)}

_AXIS_LETTERS = {
    "R": (0, 1), "L": (0, -1),
    "A": (1, 1), "P": (1, -1),
    "S": (2, 1), "I": (2, -1),
}
_POS_LETTER = "RAS"
_NEG_LETTER = "LPI"


def check_plane(plane: str) -> str:
    if plane not in PLANES:
        raise ValidationError(f"unknown plane '{plane}', expected one of {PLANES}")
    return plane


@dataclass(frozen=True)
class Slice2D:
    """A copied 2D slice with its in-plane pixel spacing, indexed [u, v]."""

    data: np.ndarray
    spacing: tuple[float, float]


class Volume3D:
    """Immutable scalar voxel grid with spacing, affine and metadata."""

    def __init__(self, data, spacing=(1.0, 1.0, 1.0), affine=None,
                 dtype_tag="float32", metadata=None):
        data = np.asarray(data, dtype=np.float32)
        if data.ndim not in (3, 4):
            raise ValidationError(f"volume data must be 3D or 4D, got {data.ndim}D")
        if any(n < 1 for n in data.shape):
            raise ValidationError(f"all dims must be >= 1, got {data.shape}")
        spacing = tuple(float(s) for s in spacing)
        if len(spacing) != 3 or any(s <= 0 for s in spacing):
            raise ValidationError(f"spacing must be 3 positive values, got {spacing}")
        if affine is None:
            affine = np.diag([spacing[0], spacing[1], spacing[2], 1.0])
        affine = np.asarray(affine, dtype=np.float64)
        if affine.shape != (4, 4):
            raise ValidationError("affine must be a 4x4 matrix")
        if abs(np.linalg.det(affine[:3, :3])) < 1e-12:
            raise DegenerateAffineError("affine upper-left 3x3 is singular")
        data = data.copy()
        data.flags.writeable = False
        affine = affine.copy()
        affine.flags.writeable = False
        self.data = data
        self.spacing = spacing
        self.affine = affine
        self.dtype_tag = dtype_tag
        self.metadata = dict(metadata) if metadata else {}

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.data.shape[:3]

    @property
    def nt(self) -> int:
        return self.data.shape[3] if self.data.ndim == 4 else 1

    @property
    def is_4d(self) -> bool:
        return self.data.ndim == 4

    def with_data(self, data, dtype_tag=None) -> "Volume3D":
        """New volume sharing spacing/affine/metadata with different voxels."""
        return Volume3D(data, self.spacing, self.affine,
                        dtype_tag or self.dtype_tag, self.metadata)

    def frame(self, t: int) -> np.ndarray:
        """3D array for frame t (read-only view)."""
        if self.is_4d:
            return self.data[..., t]
        return self.data


@dataclass(frozen=True)
class ColorScheme:
    """Label-id to (name, R, G, B, A) palette. Label 0 is transparent."""

    entries: dict[int, tuple[str, int, int, int, int]] = field(default_factory=dict)

    def __post_init__(self):
        for lid, (name, *rgba) in self.entries.items():
            if lid < 0:
                raise ValidationError(f"label id {lid} is negative")
            if any(c < 0 or c > 255 for c in rgba):
                raise ValidationError(f"channel out of [0,255] for label {lid}")
        if 0 not in self.entries:
            self.entries[0] = ("background", 0, 0, 0, 0)
        if self.entries[0][4] != 0:
            raise ValidationError("label 0 must be fully transparent")

    def color(self, label: int) -> tuple[str, int, int, int, int]:
        """Entry for a label, falling back to a deterministic palette."""
        if label in self.entries:
            return self.entries[label]
        h = (label * 0.6180339887498949) % 1.0
        r, g, b = colorsys.hsv_to_rgb(h, 0.85, 0.95)
        return (f"label-{label}", int(r * 255), int(g * 255), int(b * 255), 160)

    @staticmethod
    def default(n: int = 16) -> "ColorScheme":
        scheme = ColorScheme({})
        for lid in range(1, n + 1):
            scheme.entries[lid] = scheme.color(lid)
        return scheme


def slice_extract(vol: Volume3D, plane: str, index: int) -> Slice2D:
    """Copy one orthogonal slice out of a 3D volume."""
    check_plane(plane)
    axis = PLANE_FIXED_AXIS[plane]
    extent = vol.dims[axis]
    if not 0 <= index < extent:
        raise RangeError(f"{plane} index {index} out of range [0, {extent})")
    data = vol.frame(0) if vol.is_4d else vol.data
    sl = [slice(None)] * 3
    sl[axis] = index
    ua, va = PLANE_FREE_AXES[plane]
    return Slice2D(np.array(data[tuple(sl)]), (vol.spacing[ua], vol.spacing[va]))


def linked_cursor(vol: Volume3D, plane: str, index: int, u: int, v: int):
    """Map a (plane, slice, in-plane) position to the shared voxel coordinate."""
    check_plane(plane)
    axis = PLANE_FIXED_AXIS[plane]
    ua, va = PLANE_FREE_AXES[plane]
    dims = vol.dims
    if not 0 <= index < dims[axis]:
        raise RangeError(f"{plane} index {index} out of range [0, {dims[axis]})")
    if not (0 <= u < dims[ua] and 0 <= v < dims[va]):
        raise RangeError(
            f"in-plane point ({u}, {v}) out of range "
            f"[0, {dims[ua]}) x [0, {dims[va]})")
    coord = [0, 0, 0]
    coord[axis] = index
    coord[ua] = u
    coord[va] = v
    return tuple(coord)


def orientation_code(affine: np.ndarray) -> str:
    """Dominant-direction orientation letters of an affine, e.g. 'RAS'."""
    letters = []
    used = set()
    for j in range(3):
        col = np.abs(affine[:3, j])
        order = np.argsort(col)[::-1]
        if col[order[0]] - col[order[1]] < 1e-6 * max(1.0, col[order[0]]):
            raise DegenerateOrientationError(
                f"voxel axis {j} projects almost equally on two world axes")
        world = int(order[0])
        if world in used:
            raise DegenerateOrientationError(
                f"two voxel axes both dominate world axis {world}")
        used.add(world)
        sign = affine[world, j]
        letters.append(_POS_LETTER[world] if sign > 0 else _NEG_LETTER[world])
    return "".join(letters)


def _parse_orientation(code: str):
    if not isinstance(code, str) or len(code) != 3:
        raise ValidationError(f"orientation code must be 3 letters, got {code!r}")
    axes = []
    for ch in code.upper():
        if ch not in _AXIS_LETTERS:
            raise ValidationError(f"invalid orientation letter '{ch}' in {code!r}")
        axes.append(_AXIS_LETTERS[ch])
    if {a for a, _ in axes} != {0, 1, 2}:
        raise ValidationError(f"orientation code {code!r} does not cover all axes")
    return axes


def reorient(vol: Volume3D, target: str) -> Volume3D:
    """Permute/flip a volume so its axes match a target orientation code."""
    want = _parse_orientation(target)
    have = [_AXIS_LETTERS[ch] for ch in orientation_code(vol.affine)]
    perm = []
    flips = []
    for world, sign in want:
        k = next(i for i, (w, _) in enumerate(have) if w == world)
        perm.append(k)
        flips.append(have[k][1] != sign)

    data = vol.data
    axes = tuple(perm) + ((3,) if vol.is_4d else ())
    data = np.transpose(data, axes)
    for j, f in enumerate(flips):
        if f:
            data = np.flip(data, axis=j)

    # T maps new voxel coords to old voxel coords: old_k = +/- new_j (+ shift).
    t = np.zeros((4, 4))
    t[3, 3] = 1.0
    for j, (k, f) in enumerate(zip(perm, flips)):
        n_k = vol.dims[k]
        if f:
            t[k, j] = -1.0
            t[k, 3] = n_k - 1
        else:
            t[k, j] = 1.0
    affine = vol.affine @ t
    spacing = tuple(vol.spacing[k] for k in perm)
    return Volume3D(data, spacing, affine, vol.dtype_tag, vol.metadata)


def histogram(vol_or_data, nbins: int, vrange=None) -> np.ndarray:
    """Bin counts over the voxel intensities; last bin is closed."""
    if nbins < 1:
        raise ValidationError(f"nbins must be >= 1, got {nbins}")
    data = vol_or_data.data if isinstance(vol_or_data, Volume3D) else np.asarray(vol_or_data)
    if vrange is not None:
        lo, hi = float(vrange[0]), float(vrange[1])
        if lo >= hi:
            raise ValidationError(f"histogram range ({lo}, {hi}) must have lo < hi")
    else:
        lo = float(data.min())
        hi = float(data.max())
        if lo == hi:
            return np.array([data.size], dtype=np.int64)
    counts, _ = np.histogram(data, bins=nbins, range=(lo, hi))
    return counts.astype(np.int64)


def histogram_edges(vol_or_data, nbins: int, vrange=None) -> np.ndarray:
    """Bin edges matching :func:`histogram` (nbins + 1 values)."""
    data = vol_or_data.data if isinstance(vol_or_data, Volume3D) else np.asarray(vol_or_data)
    if vrange is not None:
        lo, hi = float(vrange[0]), float(vrange[1])
    else:
        lo, hi = float(data.min()), float(data.max())
        if lo == hi:
            return np.array([lo, hi])
    return np.linspace(lo, hi, nbins + 1)


def voxel_to_world(vol: Volume3D, point) -> tuple[float, float, float]:
    """Map a (continuous) voxel coordinate to world millimeters."""
    p = np.asarray(point, dtype=np.float64)
    out = vol.affine[:3, :3] @ p + vol.affine[:3, 3]
    return tuple(float(c) for c in out)


def world_to_voxel(vol: Volume3D, point) -> tuple[float, float, float]:
    """Inverse of :func:`voxel_to_world`."""
    p = np.asarray(point, dtype=np.float64)
    inv = np.linalg.inv(vol.affine)
    out = inv[:3, :3] @ p + inv[:3, 3]
    return tuple(float(c) for c in out)


def extract_frame(vol: Volume3D, t: int) -> Volume3D:
    """Return frame t of a 4D volume as a 3D volume (3D input: t=0 only)."""
    if not vol.is_4d:
        if t != 0:
            raise RangeError(f"frame {t} out of range [0, 1) for 3D volume")
        return vol
    if not 0 <= t < vol.nt:
        raise RangeError(f"frame {t} out of range [0, {vol.nt})")
    return Volume3D(vol.data[..., t], vol.spacing, vol.affine,
                    vol.dtype_tag, vol.metadata)
