"""Continuous sampling and geometric resampling of volumes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .volume import PLANE_FIXED_AXIS, Volume3D, check_plane


@dataclass(frozen=True)
class RotationSpec:
    """Rotation about the normal of an anatomical plane, around the volume
    center ((n-1)/2 per axis)."""

    axis: str  # plane whose normal is the rotation axis
    degrees: float

    def __post_init__(self):
        check_plane(self.axis)
        if not np.isfinite(self.degrees):
            raise ValidationError(f"degrees must be finite, got {self.degrees}")


def trilinear_many(data: np.ndarray, points: np.ndarray,
                   fill: float = 0.0) -> np.ndarray:
    """Trilinear samples of a 3D array at an (N, 3) batch of continuous
    voxel coordinates; outside [0, n-1] per axis yields `fill`."""
    pts = np.asarray(points, dtype=np.float64)
    nx, ny, nz = data.shape
    inside = np.all((pts >= 0) & (pts <= np.array([nx, ny, nz]) - 1), axis=1)
    p = np.clip(pts, 0, np.array([nx, ny, nz]) - 1)
    i0 = np.minimum(np.floor(p).astype(np.int64),
                    np.array([nx, ny, nz]) - 2)
    i0 = np.maximum(i0, 0)
    f = p - i0
    i1 = np.minimum(i0 + 1, np.array([nx, ny, nz]) - 1)
    xs, ys, zs = (i0[:, 0], i1[:, 0]), (i0[:, 1], i1[:, 1]), (i0[:, 2], i1[:, 2])
    fx, fy, fz = f[:, 0], f[:, 1], f[:, 2]
    d = data.astype(np.float64)
    out = np.zeros(len(pts))
    for dx in (0, 1):
        wx = fx if dx else 1.0 - fx
        for dy in (0, 1):
            wy = fy if dy else 1.0 - fy
            for dz in (0, 1):
                wz = fz if dz else 1.0 - fz
                out += wx * wy * wz * d[xs[dx], ys[dy], zs[dz]]
    return np.where(inside, out, fill)


def trilinear_sample(vol: Volume3D, point, fill: float = 0.0) -> float:
    """Trilinear interpolation of the volume at one continuous coordinate."""
    pt = np.asarray(point, dtype=np.float64)
    if pt.shape != (3,) or np.any(np.isnan(pt)):
        raise ValidationError(f"invalid sample coordinate {point!r}")
    data = vol.frame(0) if vol.is_4d else vol.data
    return float(trilinear_many(data, pt[None, :], fill)[0])


def _rotation_matrix(axis: str, degrees: float) -> np.ndarray:
    rad = np.radians(degrees)
    c, s = np.cos(rad), np.sin(rad)
    if degrees % 90 == 0:
        # snap so quarter turns are exact lattice permutations
        c, s = round(c), round(s)
    k = PLANE_FIXED_AXIS[axis]
    a, b = [i for i in range(3) if i != k]
    rot = np.eye(3)
    rot[a, a] = c
    rot[a, b] = -s
    rot[b, a] = s
    rot[b, b] = c
    return rot


def rotate_volume(vol: Volume3D, spec: RotationSpec) -> Volume3D:
    """Inverse-mapping resample onto the same grid, 0 fill outside."""
    rot = _rotation_matrix(spec.axis, spec.degrees)
    inv = rot.T  # rotate output coords by -degrees
    nx, ny, nz = vol.dims
    center = (np.array([nx, ny, nz], dtype=np.float64) - 1) / 2.0
    grid = np.stack(np.meshgrid(np.arange(nx), np.arange(ny), np.arange(nz),
                                indexing="ij"), axis=-1).reshape(-1, 3)
    src = (grid - center) @ inv.T + center
    if vol.is_4d:
        frames = [trilinear_many(vol.data[..., t], src).reshape(nx, ny, nz)
                  for t in range(vol.nt)]
        data = np.stack(frames, axis=-1)
    else:
        data = trilinear_many(vol.data, src).reshape(nx, ny, nz)
    # voxel-space map new -> old, folded into the affine so world positions
    # of the resampled content stay faithful
    m = np.eye(4)
    m[:3, :3] = inv
    m[:3, 3] = center - inv @ center
    affine = vol.affine @ m
    return Volume3D(data.astype(np.float32), vol.spacing, affine,
                    vol.dtype_tag, vol.metadata)
