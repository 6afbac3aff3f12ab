"""Read-only NRRD support: attached headers, raw and gzip encodings."""

from __future__ import annotations

import gzip
import re
from collections import OrderedDict

import numpy as np

from ..errors import FormatError, TruncationError, UnsupportedEncodingError
from ..volume import Volume3D

_TYPE_MAP = {
    "signed char": "int8", "int8": "int8", "int8_t": "int8",
    "uchar": "uint8", "unsigned char": "uint8", "uint8": "uint8",
    "uint8_t": "uint8",
    "short": "int16", "short int": "int16", "signed short": "int16",
    "int16": "int16", "int16_t": "int16",
    "ushort": "uint16", "unsigned short": "uint16", "uint16": "uint16",
    "uint16_t": "uint16",
    "int": "int32", "signed int": "int32", "int32": "int32", "int32_t": "int32",
    "uint": "uint32", "unsigned int": "uint32", "uint32": "uint32",
    "uint32_t": "uint32",
    "float": "float32", "double": "float64",
}

# dtype_tag values the rest of the pipeline can write back as NIfTI
_CANONICAL_TAG = {"int8": "int16", "uint32": "int32"}

REQUIRED_FIELDS = ("type", "dimension", "sizes", "encoding")


def parse_nrrd_header(raw: bytes):
    """Split an attached NRRD stream into (header fields, data bytes)."""
    if not raw.startswith(b"NRRD000"):
        raise FormatError("missing NRRD magic")
    try:
        head, body = raw.split(b"\n\n", 1)
    except ValueError:
        # some writers end the header with a single blank line using \r\n
        m = re.search(rb"\r?\n\r?\n", raw)
        if not m:
            raise FormatError("NRRD header is not terminated by a blank line")
        head, body = raw[:m.start()], raw[m.end():]
    fields = OrderedDict()
    for line in head.decode("latin-1").splitlines()[1:]:
        line = line.rstrip("\r")
        if not line or line.startswith("#"):
            continue
        if ":=" in line:
            key, value = line.split(":=", 1)
        elif ":" in line:
            key, value = line.split(":", 1)
        else:
            raise FormatError(f"malformed NRRD header line {line!r}")
        fields[key.strip()] = value.strip()
    return fields, body


def _parse_vectors(text: str):
    vecs = []
    for token in re.findall(r"\(([^)]*)\)|(none)", text):
        if token[1] == "none":
            vecs.append(None)
        else:
            vecs.append([float(x) for x in token[0].split(",")])
    return vecs


def read_nrrd_bytes(raw: bytes) -> Volume3D:
    fields, body = parse_nrrd_header(raw)
    for name in REQUIRED_FIELDS:
        if name not in fields:
            raise FormatError(f"NRRD header is missing required field '{name}'")
    type_name = fields["type"].lower()
    if type_name not in _TYPE_MAP:
        raise FormatError(f"unknown NRRD type '{fields['type']}'")
    np_dtype = _TYPE_MAP[type_name]
    ndim = int(fields["dimension"])
    if ndim != 3:
        raise FormatError(f"only 3-dimensional NRRD supported, got dimension {ndim}")
    sizes = [int(x) for x in fields["sizes"].split()]
    if len(sizes) != ndim:
        raise FormatError(f"sizes lists {len(sizes)} values for dimension {ndim}")

    encoding = fields["encoding"].lower()
    if encoding == "raw":
        pass
    elif encoding in ("gzip", "gz"):
        body = gzip.decompress(body)
    else:
        raise UnsupportedEncodingError(f"unsupported NRRD encoding '{encoding}'")

    endian = fields.get("endian", "little")
    order = "<" if endian == "little" else ">"
    dt = np.dtype(np_dtype).newbyteorder(order)
    count = sizes[0] * sizes[1] * sizes[2]
    if len(body) < count * dt.itemsize:
        raise TruncationError(count * dt.itemsize, len(body))
    arr = np.frombuffer(body[:count * dt.itemsize], dtype=dt)
    # first listed axis is fastest
    arr = arr.reshape(sizes[2], sizes[1], sizes[0]).transpose(2, 1, 0)

    affine = np.eye(4)
    spacing = [1.0, 1.0, 1.0]
    if "space directions" in fields:
        vecs = [v for v in _parse_vectors(fields["space directions"]) if v is not None]
        if len(vecs) != 3:
            raise FormatError("space directions must provide 3 vectors for 3D data")
        for j, v in enumerate(vecs):
            affine[:3, j] = v
            spacing[j] = float(np.linalg.norm(v))
    elif "spacings" in fields:
        spacing = [abs(float(x)) for x in fields["spacings"].split()]
        affine = np.diag(spacing + [1.0])
    if "space origin" in fields:
        origin = _parse_vectors(fields["space origin"])
        if origin and origin[0] is not None:
            affine[:3, 3] = origin[0]

    tag = _CANONICAL_TAG.get(np_dtype, np_dtype)
    return Volume3D(arr.astype(np.float32), spacing, affine, tag, dict(fields))


def read_nrrd(path) -> Volume3D:
    with open(path, "rb") as fh:
        return read_nrrd_bytes(fh.read())
