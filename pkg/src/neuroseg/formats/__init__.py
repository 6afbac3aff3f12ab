"""Medical volume file formats: NIfTI-1 read/write, NRRD read, metadata."""

from __future__ import annotations

import gzip
from collections import OrderedDict

from ..errors import FormatError
from ..volume import Volume3D, extract_frame
from .colorscheme import format_color_scheme, parse_color_scheme
from .nifti import (
    parse_header,
    read_nifti,
    read_nifti_bytes,
    render_header,
    write_nifti,
    write_nifti_bytes,
)
from .nrrd import parse_nrrd_header, read_nrrd, read_nrrd_bytes

__all__ = [
    "read_nifti", "read_nifti_bytes", "write_nifti", "write_nifti_bytes",
    "read_nrrd", "read_nrrd_bytes", "parse_color_scheme",
    "format_color_scheme", "read_volume", "get_metadata", "extract_frame",
]


def _sniff(raw: bytes) -> str:
    if raw[:2] == b"\x1f\x8b":
        raw = gzip.decompress(raw)
    if raw.startswith(b"NRRD000"):
        return "nrrd"
    try:
        parse_header(raw)
        return "nifti"
    except FormatError:
        raise FormatError("file is neither NIfTI-1 nor NRRD")


def read_volume(path) -> Volume3D:
    """Load a volume from either supported format, sniffing the content."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if _sniff(raw) == "nrrd":
        return read_nrrd_bytes(raw)
    return read_nifti_bytes(raw)


def get_metadata(path) -> "OrderedDict[str, str]":
    """All header fields of a NIfTI or NRRD file as ordered key/value text."""
    with open(path, "rb") as fh:
        raw = fh.read()
    kind = _sniff(raw)
    if kind == "nrrd":
        fields, _ = parse_nrrd_header(raw)
        return OrderedDict(fields)
    if raw[:2] == b"\x1f\x8b":
        raw = gzip.decompress(raw)
    header, _ = parse_header(raw)
    return render_header(header)
