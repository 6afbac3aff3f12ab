"""NIfTI-1 codec: 348-byte header, optional gzip, 3D and 4D volumes.

Reading honors scl_slope/scl_inter and the sform/qform/pixdim affine
priority. Writing is canonical: attached single file, vox_offset 352,
sform only (code 1), data unscaled in the volume's storage dtype. Header
endianness is auto-detected through the sizeof_hdr == 348 check.
"""

from __future__ import annotations

import gzip
import struct
from collections import OrderedDict

import numpy as np

from ..errors import FormatError, TruncationError, UnsupportedDtypeError
from ..volume import Volume3D

HEADER_SIZE = 348
VOX_OFFSET = 352

_FIELDS = [
    ("sizeof_hdr", "i"), ("data_type", "10s"), ("db_name", "18s"),
    ("extents", "i"), ("session_error", "h"), ("regular", "c"),
    ("dim_info", "c"), ("dim", "8h"),
    ("intent_p1", "f"), ("intent_p2", "f"), ("intent_p3", "f"),
    ("intent_code", "h"), ("datatype", "h"), ("bitpix", "h"),
    ("slice_start", "h"), ("pixdim", "8f"), ("vox_offset", "f"),
    ("scl_slope", "f"), ("scl_inter", "f"), ("slice_end", "h"),
    ("slice_code", "c"), ("xyzt_units", "c"), ("cal_max", "f"),
    ("cal_min", "f"), ("slice_duration", "f"), ("toffset", "f"),
    ("glmax", "i"), ("glmin", "i"), ("descrip", "80s"),
    ("aux_file", "24s"), ("qform_code", "h"), ("sform_code", "h"),
    ("quatern_b", "f"), ("quatern_c", "f"), ("quatern_d", "f"),
    ("qoffset_x", "f"), ("qoffset_y", "f"), ("qoffset_z", "f"),
    ("srow_x", "4f"), ("srow_y", "4f"), ("srow_z", "4f"),
    ("intent_name", "16s"), ("magic", "4s"),
]
_STRUCT_FMT = "".join(fmt for _, fmt in _FIELDS)

DTYPE_FROM_CODE = {
    2: "uint8", 4: "int16", 8: "int32", 16: "float32",
    64: "float64", 512: "uint16",
}
CODE_FROM_DTYPE = {v: k for k, v in DTYPE_FROM_CODE.items()}
BITPIX = {"uint8": 8, "int16": 16, "uint16": 16, "int32": 32,
          "float32": 32, "float64": 64}


def _unpack_header(raw: bytes, order: str) -> dict:
    values = struct.unpack(order + _STRUCT_FMT, raw)
    header = {}
    i = 0
    for name, fmt in _FIELDS:
        n = int(fmt[:-1]) if len(fmt) > 1 and fmt[-1] in "hf" else 1
        if fmt[-1] in "sc":
            header[name] = values[i]
            i += 1
        elif n == 1:
            header[name] = values[i]
            i += 1
        else:
            header[name] = values[i:i + n]
            i += n
    return header


def _pack_header(header: dict) -> bytes:
    flat = []
    for name, fmt in _FIELDS:
        v = header[name]
        if isinstance(v, (tuple, list)):
            flat.extend(v)
        else:
            flat.append(v)
    return struct.pack("<" + _STRUCT_FMT, *flat)


def _maybe_decompress(raw: bytes) -> bytes:
    if raw[:2] == b"\x1f\x8b":
        return gzip.decompress(raw)
    return raw


def parse_header(raw: bytes):
    """Decode a 348-byte header, returning (fields, byte order)."""
    if len(raw) < HEADER_SIZE:
        raise FormatError(f"file too small for a NIfTI-1 header ({len(raw)} bytes)")
    for order in ("<", ">"):
        if struct.unpack(order + "i", raw[:4])[0] == HEADER_SIZE:
            return _unpack_header(raw[:HEADER_SIZE], order), order
    raise FormatError("sizeof_hdr is not 348 in either byte order")


def read_nifti_bytes(raw: bytes) -> Volume3D:
    raw = _maybe_decompress(raw)
    header, order = parse_header(raw)
    magic = header["magic"]
    if magic == b"ni1\x00":
        raise FormatError("detached .hdr/.img NIfTI files are not supported")
    if magic != b"n+1\x00":
        raise FormatError(f"bad NIfTI magic {magic!r}")
    code = header["datatype"]
    if code not in DTYPE_FROM_CODE:
        raise UnsupportedDtypeError(f"unsupported NIfTI datatype code {code}")
    dtype_tag = DTYPE_FROM_CODE[code]

    dim = header["dim"]
    ndim = dim[0]
    if not 1 <= ndim <= 7:
        raise FormatError(f"dim[0] = {ndim} outside [1, 7]")
    nx = max(1, dim[1])
    ny = max(1, dim[2]) if ndim >= 2 else 1
    nz = max(1, dim[3]) if ndim >= 3 else 1
    nt = max(1, dim[4]) if ndim >= 4 else 1
    if ndim > 4 and any(max(1, d) != 1 for d in dim[5:1 + ndim]):
        raise FormatError(f"dimensions beyond 4 are not supported (dim={dim})")

    count = nx * ny * nz * nt
    nbytes = count * BITPIX[dtype_tag] // 8
    offset = int(header["vox_offset"])
    body = raw[offset:offset + nbytes]
    if len(body) < nbytes:
        raise TruncationError(nbytes, len(body))
    arr = np.frombuffer(body, dtype=np.dtype(dtype_tag).newbyteorder(order))
    if nt > 1:
        arr = arr.reshape(nt, nz, ny, nx).transpose(3, 2, 1, 0)
    else:
        arr = arr.reshape(nz, ny, nx).transpose(2, 1, 0)
    data = arr.astype(np.float32)
    slope = header["scl_slope"]
    inter = header["scl_inter"]
    if slope == 0.0:
        slope = 1.0
    if slope != 1.0 or inter != 0.0:
        data = data * np.float32(slope) + np.float32(inter)

    pixdim = header["pixdim"]
    spacing = tuple(abs(p) if p != 0 else 1.0 for p in pixdim[1:4])
    affine = _affine_from_header(header, spacing)
    metadata = render_header(header)
    return Volume3D(data, spacing, affine, dtype_tag, metadata)


def _affine_from_header(header: dict, spacing) -> np.ndarray:
    if header["sform_code"] > 0:
        aff = np.eye(4)
        aff[0, :] = header["srow_x"]
        aff[1, :] = header["srow_y"]
        aff[2, :] = header["srow_z"]
        return aff
    if header["qform_code"] > 0:
        b, c, d = header["quatern_b"], header["quatern_c"], header["quatern_d"]
        a = np.sqrt(max(0.0, 1.0 - b * b - c * c - d * d))
        rot = np.array([
            [a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)],
            [2 * (b * c + a * d), a * a + c * c - b * b - d * d, 2 * (c * d - a * b)],
            [2 * (b * d - a * c), 2 * (c * d + a * b), a * a + d * d - b * b - c * c],
        ])
        qfac = -1.0 if header["pixdim"][0] < 0 else 1.0
        scale = np.diag([spacing[0], spacing[1], spacing[2] * qfac])
        aff = np.eye(4)
        aff[:3, :3] = rot @ scale
        aff[:3, 3] = [header["qoffset_x"], header["qoffset_y"], header["qoffset_z"]]
        return aff
    return np.diag([spacing[0], spacing[1], spacing[2], 1.0])


def read_nifti(path) -> Volume3D:
    with open(path, "rb") as fh:
        return read_nifti_bytes(fh.read())


def _decode_str(b: bytes) -> str:
    return b.split(b"\x00", 1)[0].decode("latin-1")


def render_header(header: dict) -> "OrderedDict[str, str]":
    """All header fields as an ordered key -> string map."""
    out = OrderedDict()
    for name, _ in _FIELDS:
        v = header[name]
        if isinstance(v, bytes):
            if name in ("magic",):
                out[name] = repr(v)
            else:
                out[name] = _decode_str(v)
        elif isinstance(v, (tuple, list)):
            out[name] = " ".join(f"{x:g}" if isinstance(x, float) else str(x) for x in v)
        elif isinstance(v, float):
            out[name] = f"{v:g}"
        else:
            out[name] = str(v)
    return out


def write_nifti_bytes(vol: Volume3D) -> bytes:
    if vol.dtype_tag not in CODE_FROM_DTYPE:
        raise UnsupportedDtypeError(f"cannot write dtype '{vol.dtype_tag}'")
    nx, ny, nz = vol.dims
    nt = vol.nt
    ndim = 4 if vol.is_4d else 3
    dim = [ndim, nx, ny, nz, nt if vol.is_4d else 1, 1, 1, 1]
    pixdim = [1.0, vol.spacing[0], vol.spacing[1], vol.spacing[2],
              1.0 if vol.is_4d else 0.0, 0.0, 0.0, 0.0]
    descrip = vol.metadata.get("descrip", "").encode("latin-1")[:79]
    header = {}
    for name, fmt in _FIELDS:
        if fmt[-1] == "s":
            header[name] = b"\x00" * int(fmt[:-1])
        elif fmt[-1] == "c":
            header[name] = b"\x00"
        elif len(fmt) > 1:
            header[name] = tuple([0.0 if fmt[-1] == "f" else 0] * int(fmt[:-1]))
        else:
            header[name] = 0.0 if fmt == "f" else 0
    header.update(
        sizeof_hdr=HEADER_SIZE,
        regular=b"r",
        dim=tuple(dim),
        datatype=CODE_FROM_DTYPE[vol.dtype_tag],
        bitpix=BITPIX[vol.dtype_tag],
        pixdim=tuple(pixdim),
        vox_offset=float(VOX_OFFSET),
        scl_slope=1.0,
        scl_inter=0.0,
        descrip=descrip + b"\x00" * (80 - len(descrip)),
        qform_code=0,
        sform_code=1,
        srow_x=tuple(float(x) for x in vol.affine[0]),
        srow_y=tuple(float(x) for x in vol.affine[1]),
        srow_z=tuple(float(x) for x in vol.affine[2]),
        magic=b"n+1\x00",
    )
    raw = _pack_header(header)
    assert len(raw) == HEADER_SIZE
    arr = vol.data
    if vol.is_4d:
        arr = arr.transpose(3, 2, 1, 0)
    else:
        arr = arr.transpose(2, 1, 0)
    body = np.ascontiguousarray(arr).astype("<" + np.dtype(vol.dtype_tag).str[1:]).tobytes()
    return raw + b"\x00" * (VOX_OFFSET - HEADER_SIZE) + body


def write_nifti(vol: Volume3D, path, use_gzip=None) -> None:
    """Write a volume; gzip when requested or when the path ends in .gz."""
    if use_gzip is None:
        use_gzip = str(path).endswith(".gz")
    payload = write_nifti_bytes(vol)
    if use_gzip:
        # mtime pinned for reproducible bytes
        payload = gzip.compress(payload, compresslevel=6, mtime=0)
    with open(path, "wb") as fh:
        fh.write(payload)
