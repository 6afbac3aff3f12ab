"""Distance, angle, area/perimeter and volume measurements in physical units."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegenerateSegmentError, RangeError, ValidationError
from .segment import LabelMap, _plane_view
from .volume import PLANE_FREE_AXES, check_plane


@dataclass
class MeasurementRecord:
    id: int
    kind: str  # distance | angle | area_perimeter | volume
    value1: float
    value2: Optional[float] = None
    units: str = ""
    plane: Optional[str] = None
    slice_index: Optional[int] = None
    label: Optional[int] = None
    points: Optional[list] = None
    timestamp: str = ""

    def __post_init__(self):
        if self.points is not None:
            self.points = [tuple(float(c) for c in p) for p in self.points]

    def to_dict(self) -> dict:
        return {
            "id": self.id, "kind": self.kind, "value1": self.value1,
            "value2": self.value2, "units": self.units, "plane": self.plane,
            "slice_index": self.slice_index, "label": self.label,
            "points": None if self.points is None else [list(p) for p in self.points],
            "timestamp": self.timestamp,
        }

    @staticmethod
    def from_dict(d: dict) -> "MeasurementRecord":
        return MeasurementRecord(**d)


def distance(p, q, spacing, dims=None) -> float:
    """Euclidean distance in mm between two voxel coordinates."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if dims is not None:
        for pt in (p, q):
            if any(not 0 <= c <= n - 1 for c, n in zip(pt, dims)):
                raise RangeError(f"point {tuple(pt)} outside volume dims {dims}")
    s = np.asarray(spacing, dtype=np.float64)
    return float(np.sqrt(np.sum(((p - q) * s) ** 2)))


def angle(p, q, spacing=(1.0, 1.0)) -> float:
    """Angle of segment pq against the horizontal axis, degrees in [0, 180)."""
    if tuple(p) == tuple(q):
        raise DegenerateSegmentError("angle endpoints coincide")
    du = (q[0] - p[0]) * spacing[0]
    dv = (q[1] - p[1]) * spacing[1]
    return float(np.degrees(np.arctan2(dv, du)) % 180.0)


def area_perimeter(labels: LabelMap, plane: str, index: int, label: int,
                   spacing) -> tuple[float, float]:
    """Area (mm^2) and exposed-edge perimeter (mm) of a label on one slice.

    `spacing` is the volume spacing (sx, sy, sz); the in-plane pair is
    chosen by the plane.
    """
    check_plane(plane)
    view = _plane_view(labels.data, plane, index)
    ua, va = PLANE_FREE_AXES[plane]
    su, sv = spacing[ua], spacing[va]
    mask = view == label
    area = float(np.count_nonzero(mask)) * su * sv
    padded = np.pad(mask, 1).astype(np.int8)
    # edges crossed along u have length sv, and vice versa
    edges_u = int(np.abs(np.diff(padded, axis=0)).sum())
    edges_v = int(np.abs(np.diff(padded, axis=1)).sum())
    perimeter = edges_u * sv + edges_v * su
    return area, perimeter


def region_volume(labels: LabelMap, label: int, spacing) -> float:
    """Voxel count times voxel volume, in mm^3."""
    sx, sy, sz = spacing
    return float(labels.count(label)) * sx * sy * sz


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return "%.6g" % x
    return str(x)


CSV_HEADER = ["id", "kind", "value1", "value2", "units", "plane", "slice",
              "label", "points", "timestamp"]


def export_csv(records) -> str:
    """RFC-4180 CSV with one row per record, numbers to 6 significant digits."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        points = ""
        if r.points:
            points = ";".join(",".join(_fmt(float(c)) for c in p) for p in r.points)
        writer.writerow([
            r.id, r.kind, _fmt(float(r.value1)),
            _fmt(float(r.value2)) if r.value2 is not None else "",
            r.units, r.plane or "", "" if r.slice_index is None else r.slice_index,
            "" if r.label is None else r.label, points, r.timestamp,
        ])
    return buf.getvalue()
