"""Batch command line front end.

Exit codes: 0 success, 1 runtime error, 2 usage error. Results go to
stdout, errors to stderr. Numeric output uses 6 significant digits.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import brain, enhance, measure, segment, transform
from .errors import NeurosegError
from .formats import get_metadata, read_volume, write_nifti
from .segment import LabelMap, PolygonSelection, RegionGrowParams
from .surface import marching_cubes, serialize_mesh
from .volume import (
    PLANE_FREE_AXES,
    Volume3D,
    histogram,
    histogram_edges,
    world_to_voxel,
)


def _fmt(x: float) -> str:
    return "%#.6g" % x


def _floats(text: str):
    return [float(x) for x in text.split(",")]


def _read_labels(path, vol: Volume3D) -> LabelMap:
    """Labels from a NIfTI file, or an empty map when the path is absent."""
    if path == "new" or not os.path.exists(path):
        return LabelMap.for_volume(vol)
    lv = read_volume(path)
    return LabelMap(np.rint(lv.data if not lv.is_4d else lv.frame(0)).astype(np.int32))


def _write_labels(labels: LabelMap, vol: Volume3D, path) -> None:
    out = Volume3D(labels.data.astype(np.float32), vol.spacing, vol.affine,
                   "int32")
    write_nifti(out, path)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="neuroseg", description="volumetric segmentation workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="read a NIfTI/NRRD volume, write NIfTI")
    p.add_argument("input")
    p.add_argument("output")

    p = sub.add_parser("info", help="print file metadata")
    p.add_argument("input")

    p = sub.add_parser("histogram", help="print intensity histogram")
    p.add_argument("input")
    p.add_argument("--bins", type=int, default=16)

    p = sub.add_parser("enhance", help="apply a display/preprocessing filter")
    p.add_argument("input")
    p.add_argument("output")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--window", type=float)
    group.add_argument("--bandpass", metavar="LO,HI")
    group.add_argument("--sobel", action="store_true")
    group.add_argument("--hamming", type=float, metavar="CUTOFF")
    p.add_argument("--level", type=float, default=0.0)

    p = sub.add_parser("rotate", help="rotate about an anatomical axis")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--axis", choices=("axial", "coronal", "sagittal"),
                   required=True)
    p.add_argument("--degrees", type=float, required=True)

    p = sub.add_parser("grow", help="circular-ROI intensity-band region grow")
    p.add_argument("input")
    p.add_argument("labels")
    p.add_argument("output")
    p.add_argument("--seed", required=True, metavar="X,Y,Z")
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--label", type=int, default=1)
    p.add_argument("--connectivity-only", action="store_true")
    p.add_argument("--mm", action="store_true",
                   help="seed is in world mm, mapped through the affine")

    p = sub.add_parser("fill", help="polygon fill on one slice")
    p.add_argument("input")
    p.add_argument("labels")
    p.add_argument("output")
    p.add_argument("--plane", choices=("axial", "coronal", "sagittal"),
                   default="axial")
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--points", nargs="+", required=True, metavar="U,V")
    p.add_argument("--label", type=int, default=1)

    p = sub.add_parser("interp", help="interpolate a label between two slices")
    p.add_argument("labels")
    p.add_argument("output")
    p.add_argument("--plane", choices=("axial", "coronal", "sagittal"),
                   default="axial")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--label", type=int, default=1)

    p = sub.add_parser("measure", help="distance / angle / area measurements")
    msub = p.add_subparsers(dest="measure_kind", required=True)
    d = msub.add_parser("distance")
    d.add_argument("--p", required=True, metavar="X,Y,Z")
    d.add_argument("--q", required=True, metavar="X,Y,Z")
    d.add_argument("--spacing", default="1,1,1", metavar="SX,SY,SZ")
    d.add_argument("--mm", action="store_true",
                   help="points already in mm; spacing is ignored")
    a = msub.add_parser("angle")
    a.add_argument("--p", required=True, metavar="U,V")
    a.add_argument("--q", required=True, metavar="U,V")
    a.add_argument("--spacing", default="1,1", metavar="SU,SV")
    ar = msub.add_parser("area")
    ar.add_argument("labels")
    ar.add_argument("--plane", choices=("axial", "coronal", "sagittal"),
                    default="axial")
    ar.add_argument("--index", type=int, required=True)
    ar.add_argument("--label", type=int, default=1)

    p = sub.add_parser("extract-brain", help="classical brain extraction")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--offset", type=float, default=0.0)
    p.add_argument("--radius-mm", type=float, default=2.0)

    p = sub.add_parser("mesh", help="extract a label surface to a binary buffer")
    p.add_argument("labels")
    p.add_argument("output")
    p.add_argument("--label", type=int, default=1)

    p = sub.add_parser("serve", help="run the local HTTP service")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--host", default="127.0.0.1")

    return parser


def _cmd_enhance(args) -> None:
    vol = read_volume(args.input)
    data = np.asarray(vol.frame(0))
    if args.window is not None:
        wl = enhance.WindowLevel(args.window, args.level)
        out = enhance.window_level(data, wl).astype(np.float32)
        tag = "uint8"
    else:
        slices = []
        for k in range(data.shape[2]):
            sl = data[:, :, k]
            if args.bandpass:
                lo, hi = _floats(args.bandpass)
                slices.append(enhance.bandpass(sl, lo, hi))
            elif args.sobel:
                slices.append(enhance.sobel(sl))
            else:
                slices.append(enhance.hamming_lowpass(sl, args.hamming))
        out = np.stack(slices, axis=2).astype(np.float32)
        tag = "float32"
    write_nifti(vol.with_data(out, tag), args.output)


def _run(args) -> int:
    if args.command == "convert":
        vol = read_volume(args.input)
        write_nifti(vol, args.output)
    elif args.command == "info":
        for key, value in get_metadata(args.input).items():
            print(f"{key}: {value}")
    elif args.command == "histogram":
        vol = read_volume(args.input)
        counts = histogram(vol, args.bins)
        edges = histogram_edges(vol, args.bins)
        for k, c in enumerate(counts):
            print(f"{_fmt(edges[k])} {_fmt(edges[min(k + 1, len(edges) - 1)])} {c}")
    elif args.command == "enhance":
        _cmd_enhance(args)
    elif args.command == "rotate":
        vol = read_volume(args.input)
        spec = transform.RotationSpec(args.axis, args.degrees)
        write_nifti(transform.rotate_volume(vol, spec), args.output)
    elif args.command == "grow":
        vol = read_volume(args.input)
        labels = _read_labels(args.labels, vol)
        seed = _floats(args.seed)
        if args.mm:
            seed = world_to_voxel(vol, seed)
        x, y, z = (int(round(c)) for c in seed)
        params = RegionGrowParams("axial", z, (x, y), args.radius,
                                  args.connectivity_only)
        changed = segment.region_grow(vol, labels, params, args.label)
        _write_labels(labels, vol, args.output)
        print(changed)
    elif args.command == "fill":
        vol = read_volume(args.input)
        labels = _read_labels(args.labels, vol)
        points = [tuple(_floats(p)) for p in args.points]
        sel = PolygonSelection(args.plane, args.index, points)
        changed = segment.polygon_fill(labels, sel, args.label)
        _write_labels(labels, vol, args.output)
        print(changed)
    elif args.command == "interp":
        lv = read_volume(args.labels)
        labels = LabelMap(np.rint(lv.frame(0)).astype(np.int32))
        ua, va = PLANE_FREE_AXES[args.plane]
        changed = segment.interpolate_between(
            labels, args.plane, args.a, args.b, args.label,
            (lv.spacing[ua], lv.spacing[va]))
        _write_labels(labels, lv, args.output)
        print(changed)
    elif args.command == "measure":
        _cmd_measure(args)
    elif args.command == "extract-brain":
        vol = read_volume(args.input)
        params = brain.ExtractParams(args.offset, args.radius_mm)
        mask = brain.extract_brain(vol, params)
        _write_labels(mask, vol, args.output)
        print(mask.count(1))
    elif args.command == "mesh":
        lv = read_volume(args.labels)
        labels = LabelMap(np.rint(lv.frame(0)).astype(np.int32))
        mesh = marching_cubes(labels, args.label, lv.spacing, lv.affine)
        with open(args.output, "wb") as fh:
            fh.write(serialize_mesh(mesh))
        print(f"{len(mesh.vertices)} {len(mesh.triangles)}")
    elif args.command == "serve":
        from .service import serve

        serve(args.host, args.port)
    return 0


def _cmd_measure(args) -> None:
    if args.measure_kind == "distance":
        p, q = _floats(args.p), _floats(args.q)
        if args.mm:
            value = measure.distance(p, q, (1.0, 1.0, 1.0))
        else:
            value = measure.distance(p, q, _floats(args.spacing))
        print(f"{_fmt(value)} mm")
    elif args.measure_kind == "angle":
        value = measure.angle(_floats(args.p), _floats(args.q),
                              _floats(args.spacing))
        print(f"{_fmt(value)} deg")
    else:
        lv = read_volume(args.labels)
        labels = LabelMap(np.rint(lv.frame(0)).astype(np.int32))
        area, perim = measure.area_perimeter(labels, args.plane, args.index,
                                             args.label, lv.spacing)
        print(f"area {_fmt(area)} mm^2")
        print(f"perimeter {_fmt(perim)} mm")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except (NeurosegError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
