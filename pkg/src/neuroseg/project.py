"""Whole-session persistence as a zip archive.

Layout: `manifest.json` plus `slots/<k>/labels.nii.gz` per slot and,
optionally, `slots/<k>/volume.nii.gz`. Zip member timestamps and gzip
mtimes are pinned so archives are byte-reproducible.
"""

from __future__ import annotations

import hashlib
import json
import os
import zipfile

import numpy as np

from .enhance import WindowLevel
from .errors import (
    CorruptArchiveError,
    IntegrityError,
    MissingVolumeError,
    ValidationError,
)
from .errors import VersionError
from .formats.nifti import read_nifti_bytes, write_nifti_bytes
from .formats.nrrd import read_nrrd_bytes
from .measure import MeasurementRecord
from .segment import LabelMap
from .session import SessionState, VolumeSlot
from .volume import ColorScheme, Volume3D

FORMAT_VERSION = 1
_ZIP_DATE = (1980, 1, 1, 0, 0, 0)


def _sha256(raw: bytes) -> str:
    return hashlib.sha256(raw).hexdigest()


def _gzip_nifti(vol: Volume3D) -> bytes:
    import gzip

    return gzip.compress(write_nifti_bytes(vol), compresslevel=6, mtime=0)


def _label_volume(slot: VolumeSlot) -> Volume3D:
    return Volume3D(slot.labels.data.astype(np.float32), slot.volume.spacing,
                    slot.volume.affine, "int32")


def save_project(session: SessionState, path, embed_volumes: bool = False) -> None:
    """Atomically write the session archive; load_project reverses it."""
    members = []  # (name, bytes)
    slots_meta = []
    for k, slot in enumerate(session.slots):
        label_bytes = _gzip_nifti(_label_volume(slot))
        members.append((f"slots/{k}/labels.nii.gz", label_bytes))
        embed = embed_volumes or slot.source_path is None
        if embed:
            vol_bytes = _gzip_nifti(slot.volume)
            members.append((f"slots/{k}/volume.nii.gz", vol_bytes))
            vol_hash = _sha256(vol_bytes)
        else:
            with open(slot.source_path, "rb") as fh:
                vol_hash = _sha256(fh.read())
        slots_meta.append({
            "dims": list(slot.volume.dims),
            # through float32 so the value survives the NIfTI header round trip
            "spacing": [float(np.float32(s)) for s in slot.volume.spacing],
            "dtype_tag": slot.volume.dtype_tag,
            "window": slot.window_level.window,
            "level": slot.window_level.level,
            "color_scheme": {str(lid): list(v)
                             for lid, v in sorted(slot.scheme.entries.items())},
            "volume": {
                "path": slot.source_path,
                "sha256": vol_hash,
                "embedded": embed,
            },
        })
    manifest = {
        "format_version": FORMAT_VERSION,
        "undo_limit": session.undo_limit,
        "next_measurement_id": session.next_measurement_id,
        "slots": slots_meta,
        "measurements": [r.to_dict() for r in session.measurements],
    }
    manifest_bytes = json.dumps(manifest, indent=1, sort_keys=True).encode()

    tmp = str(path) + ".tmp"
    with zipfile.ZipFile(tmp, "w") as zf:
        info = zipfile.ZipInfo("manifest.json", date_time=_ZIP_DATE)
        zf.writestr(info, manifest_bytes, zipfile.ZIP_DEFLATED)
        for name, payload in members:
            info = zipfile.ZipInfo(name, date_time=_ZIP_DATE)
            zf.writestr(info, payload, zipfile.ZIP_STORED)
    os.replace(tmp, path)


def _read_label_map(raw: bytes, dims) -> LabelMap:
    vol = read_nifti_bytes(raw)
    if vol.dims != tuple(dims):
        raise CorruptArchiveError(
            f"label map dims {vol.dims} do not match manifest {tuple(dims)}")
    return LabelMap(np.rint(vol.data).astype(np.int32))


def load_project(path) -> SessionState:
    try:
        zf = zipfile.ZipFile(path)
    except (OSError, zipfile.BadZipFile) as exc:
        raise CorruptArchiveError(f"cannot open archive: {exc}") from exc
    with zf:
        names = set(zf.namelist())
        if "manifest.json" not in names:
            raise CorruptArchiveError("archive has no manifest.json")
        manifest = json.loads(zf.read("manifest.json"))
        version = manifest.get("format_version")
        if not isinstance(version, int) or version < 1:
            raise CorruptArchiveError(f"bad format_version {version!r}")
        if version > FORMAT_VERSION:
            raise VersionError(
                f"archive format_version {version} is newer than supported "
                f"{FORMAT_VERSION}")
        session = SessionState(undo_limit=manifest.get("undo_limit", 64),
                               next_measurement_id=manifest.get(
                                   "next_measurement_id", 1))
        for k, meta in enumerate(manifest.get("slots", [])):
            ref = meta["volume"]
            if ref["embedded"]:
                member = f"slots/{k}/volume.nii.gz"
                if member not in names:
                    raise CorruptArchiveError(f"archive lacks {member}")
                raw = zf.read(member)
                if _sha256(raw) != ref["sha256"]:
                    raise IntegrityError(f"embedded volume {k} hash mismatch")
                volume = read_nifti_bytes(raw)
                source_path = None
            else:
                source_path = ref["path"]
                if source_path is None or not os.path.exists(source_path):
                    raise MissingVolumeError(ref["sha256"], str(source_path))
                with open(source_path, "rb") as fh:
                    raw = fh.read()
                if _sha256(raw) != ref["sha256"]:
                    raise IntegrityError(
                        f"source volume '{source_path}' hash mismatch")
                volume = (read_nrrd_bytes(raw) if raw.startswith(b"NRRD000")
                          else read_nifti_bytes(raw))
            member = f"slots/{k}/labels.nii.gz"
            if member not in names:
                raise CorruptArchiveError(f"archive lacks {member}")
            labels = _read_label_map(zf.read(member), meta["dims"])
            scheme = ColorScheme({int(lid): tuple(v)
                                  for lid, v in meta["color_scheme"].items()})
            slot = VolumeSlot(volume, labels, scheme,
                              WindowLevel(meta["window"], meta["level"]),
                              source_path=source_path)
            session.slots.append(slot)
        for rec in manifest.get("measurements", []):
            session.measurements.append(MeasurementRecord.from_dict(rec))
    return session
