"""Label-map editing kernels: polygon fill, seeded region grow, erase,
slice copy, signed-distance slice interpolation, mask arithmetic.

All operations mutate the label map in place (except apply_mask) and
report the number of voxels whose value actually changed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import (
    EmptyEndpointError,
    NothingToFillError,
    RangeError,
    ValidationError,
)
from .volume import PLANE_FIXED_AXIS, PLANE_FREE_AXES, Volume3D, check_plane


class LabelMap:
    """Integer label grid congruent with a parent volume; 0 = background."""

    def __init__(self, data):
        data = np.asarray(data)
        if data.ndim != 3:
            raise ValidationError(f"label map must be 3D, got {data.ndim}D")
        if data.size and data.min() < 0:
            raise ValidationError("labels must be non-negative")
        self.data = data.astype(np.int32)

    @classmethod
    def for_volume(cls, vol: Volume3D) -> "LabelMap":
        return cls(np.zeros(vol.dims, dtype=np.int32))

    @property
    def dims(self):
        return self.data.shape

    def copy(self) -> "LabelMap":
        return LabelMap(self.data.copy())

    def count(self, label: int) -> int:
        return int(np.count_nonzero(self.data == label))


@dataclass
class PolygonSelection:
    """A closed polygon on one slice; vertices in continuous (u, v) coords."""

    plane: str
    index: int
    points: list = field(default_factory=list)


@dataclass
class DiskSelection:
    """A filled disk on one slice; radius 0 selects exactly the center pixel."""

    plane: str
    index: int
    center: tuple[float, float]
    radius: float


@dataclass
class RegionGrowParams:
    """Circular-ROI intensity-band growing seeded at an in-plane point."""

    plane: str
    index: int
    seed: tuple[int, int]
    radius: float
    connectivity_only: bool = False


def _plane_view(data: np.ndarray, plane: str, index: int) -> np.ndarray:
    """Writable [u, v] view of one slice of a 3D array."""
    check_plane(plane)
    axis = PLANE_FIXED_AXIS[plane]
    if not 0 <= index < data.shape[axis]:
        raise RangeError(
            f"{plane} index {index} out of range [0, {data.shape[axis]})")
    sl = [slice(None)] * 3
    sl[axis] = index
    return data[tuple(sl)]


def polygon_mask(shape, points) -> np.ndarray:
    """Even-odd rasterization over pixel centers with half-open tie breaking.

    A pixel (u, v) is inside when a ray cast toward +u crosses an odd
    number of edges, counting an edge only over the half-open v-interval
    [min, max) and only for strict u < crossing.
    """
    pts = np.asarray(points, dtype=np.float64)
    mask = np.zeros(shape, dtype=bool)
    u0 = max(0, int(np.floor(pts[:, 0].min())))
    u1 = min(shape[0] - 1, int(np.ceil(pts[:, 0].max())))
    v0 = max(0, int(np.floor(pts[:, 1].min())))
    v1 = min(shape[1] - 1, int(np.ceil(pts[:, 1].max())))
    if u0 > u1 or v0 > v1:
        return mask
    uu, vv = np.meshgrid(np.arange(u0, u1 + 1), np.arange(v0, v1 + 1),
                         indexing="ij")
    crossings = np.zeros(uu.shape, dtype=np.int64)
    n = len(pts)
    for i in range(n):
        ua, va = pts[i]
        ub, vb = pts[(i + 1) % n]
        if va == vb:
            continue
        in_span = (vv >= min(va, vb)) & (vv < max(va, vb))
        ucross = ua + (vv - va) * (ub - ua) / (vb - va)
        crossings += (in_span & (uu < ucross)).astype(np.int64)
    mask[u0:u1 + 1, v0:v1 + 1] = (crossings % 2) == 1
    return mask


def _disk_mask(shape, center, radius) -> np.ndarray:
    cu, cv = center
    uu, vv = np.meshgrid(np.arange(shape[0]), np.arange(shape[1]), indexing="ij")
    return (uu - cu) ** 2 + (vv - cv) ** 2 <= radius ** 2


def _validate_polygon(sel: PolygonSelection, shape) -> None:
    if len(sel.points) < 3:
        raise ValidationError(
            f"polygon needs at least 3 points, got {len(sel.points)}")
    for u, v in sel.points:
        if not (0 <= u <= shape[0] - 1 and 0 <= v <= shape[1] - 1):
            raise ValidationError(
                f"polygon point ({u}, {v}) outside slice bounds {shape}")


def _region_mask(region, shape) -> np.ndarray:
    if isinstance(region, PolygonSelection):
        _validate_polygon(region, shape)
        return polygon_mask(shape, region.points)
    if isinstance(region, DiskSelection):
        if region.radius < 0:
            raise ValidationError(f"disk radius must be >= 0, got {region.radius}")
        cu, cv = region.center
        if not (0 <= cu <= shape[0] - 1 and 0 <= cv <= shape[1] - 1):
            raise ValidationError(
                f"disk center ({cu}, {cv}) outside slice bounds {shape}")
        return _disk_mask(shape, region.center, region.radius)
    raise ValidationError(f"unsupported region type {type(region).__name__}")


def _assign(view: np.ndarray, mask: np.ndarray, value: int) -> int:
    changed = int(np.count_nonzero(view[mask] != value))
    view[mask] = value
    return changed


def polygon_fill(labels: LabelMap, sel: PolygonSelection, label: int) -> int:
    if label <= 0:
        raise ValidationError("fill label must be > 0 (use erase to clear)")
    view = _plane_view(labels.data, sel.plane, sel.index)
    _validate_polygon(sel, view.shape)
    return _assign(view, polygon_mask(view.shape, sel.points), label)


def region_grow(vol: Volume3D, labels: LabelMap, params: RegionGrowParams,
                label: int) -> int:
    if label <= 0:
        raise ValidationError("grow label must be > 0")
    if params.radius <= 0:
        raise ValidationError(f"radius must be > 0, got {params.radius}")
    if vol.dims != labels.dims:
        raise ValidationError(f"volume dims {vol.dims} != label dims {labels.dims}")
    intensities = _plane_view(np.asarray(vol.frame(0)), params.plane, params.index)
    su, sv = (int(round(c)) for c in params.seed)
    if not (0 <= su < intensities.shape[0] and 0 <= sv < intensities.shape[1]):
        raise RangeError(
            f"seed ({su}, {sv}) outside slice bounds {intensities.shape}")
    in_disk = _disk_mask(intensities.shape, (su, sv), params.radius)
    center_value = float(intensities[su, sv])
    std = float(np.std(intensities[in_disk]))  # population std over the disk
    selected = in_disk & (np.abs(intensities - center_value) <= std)
    selected[su, sv] = True
    if params.connectivity_only:
        structure = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]])
        comp, _ = ndimage.label(selected, structure=structure)
        selected = comp == comp[su, sv]
    view = _plane_view(labels.data, params.plane, params.index)
    return _assign(view, selected, label)


def erase(labels: LabelMap, region, target_label=None) -> int:
    """Clear labels inside a region; target None clears any nonzero label."""
    view = _plane_view(labels.data, region.plane, region.index)
    mask = _region_mask(region, view.shape)
    if target_label is None:
        mask = mask & (view != 0)
    else:
        mask = mask & (view == target_label)
    return _assign(view, mask, 0)


def copy_to_adjacent(labels: LabelMap, plane: str, index: int,
                     direction: int, count: int = 1) -> int:
    if direction not in (1, -1):
        raise ValidationError(f"direction must be +1 or -1, got {direction}")
    if count < 1:
        raise ValidationError(f"count must be >= 1, got {count}")
    source = _plane_view(labels.data, plane, index).copy()
    axis = PLANE_FIXED_AXIS[plane]
    extent = labels.dims[axis]
    targets = [index + direction * k for k in range(1, count + 1)]
    for t in targets:
        if not 0 <= t < extent:
            raise RangeError(
                f"target {plane} index {t} out of range [0, {extent})")
    changed = 0
    for t in targets:
        view = _plane_view(labels.data, plane, t)
        changed += int(np.count_nonzero(view != source))
        view[...] = source
    return changed


def signed_distance(mask: np.ndarray, spacing=(1.0, 1.0)) -> np.ndarray:
    """Exact signed EDT: positive inside the mask, negative outside."""
    mask = mask.astype(bool)
    if mask.all():
        return np.full(mask.shape, np.inf)
    if not mask.any():
        return np.full(mask.shape, -np.inf)
    inside = ndimage.distance_transform_edt(mask, sampling=spacing)
    outside = ndimage.distance_transform_edt(~mask, sampling=spacing)
    return inside - outside


def interpolate_between(labels: LabelMap, plane: str, idx_a: int, idx_b: int,
                        label: int, spacing=(1.0, 1.0)) -> int:
    """Fill slices between two segmented slices by blending signed EDTs."""
    if label <= 0:
        raise ValidationError("label must be > 0")
    if idx_a > idx_b:
        idx_a, idx_b = idx_b, idx_a
    if idx_b <= idx_a + 1:
        raise NothingToFillError(
            f"no intermediate slices between {idx_a} and {idx_b}")
    mask_a = _plane_view(labels.data, plane, idx_a) == label
    mask_b = _plane_view(labels.data, plane, idx_b) == label
    if not mask_a.any():
        raise EmptyEndpointError(f"slice {idx_a} contains no pixel of label {label}")
    if not mask_b.any():
        raise EmptyEndpointError(f"slice {idx_b} contains no pixel of label {label}")
    dist_a = signed_distance(mask_a, spacing)
    dist_b = signed_distance(mask_b, spacing)
    changed = 0
    for k in range(idx_a + 1, idx_b):
        alpha = (k - idx_a) / (idx_b - idx_a)
        blended = (1.0 - alpha) * dist_a + alpha * dist_b
        view = _plane_view(labels.data, plane, k)
        changed += _assign(view, blended >= 0, label)
    return changed


def mask_combine(map_a: LabelMap, map_b: LabelMap, label: int, op: str) -> int:
    if map_a.dims != map_b.dims:
        raise ValidationError(f"dims {map_a.dims} != {map_b.dims}")
    in_b = map_b.data == label
    if op == "add":
        return _assign(map_a.data, in_b, label)
    if op == "subtract":
        return _assign(map_a.data, in_b & (map_a.data == label), 0)
    raise ValidationError(f"op must be 'add' or 'subtract', got {op!r}")


def apply_mask(vol: Volume3D, labels: LabelMap, label: int, mode: str,
               fill: float = 0.0) -> Volume3D:
    """Keep or remove the labeled region, replacing the rest with `fill`."""
    if vol.dims != labels.dims:
        raise ValidationError(f"volume dims {vol.dims} != label dims {labels.dims}")
    if mode not in ("keep", "remove"):
        raise ValidationError(f"mode must be 'keep' or 'remove', got {mode!r}")
    inside = labels.data == label
    if vol.is_4d:
        inside = inside[..., None]
    if mode == "keep":
        data = np.where(inside, vol.data, np.float32(fill))
    else:
        data = np.where(inside, np.float32(fill), vol.data)
    return vol.with_data(data)


def overwrite_label(labels: LabelMap, region, new_label: int) -> int:
    """Brush-style overwrite of every pixel in the region."""
    if new_label < 0:
        raise ValidationError(f"label must be >= 0, got {new_label}")
    view = _plane_view(labels.data, region.plane, region.index)
    return _assign(view, _region_mask(region, view.shape), new_label)
