"""Local HTTP service exposing sessions, slice rendering, segmentation
tools, measurements, meshes, undo and project persistence.

Binds to loopback by default; a single-user local tool with no auth.
Mutating requests on a session are serialized by a per-session lock.
"""

from __future__ import annotations

import datetime
import io
import os
import threading
import uuid
from typing import Optional

import numpy as np
from fastapi import Body, FastAPI, Response
from fastapi.responses import JSONResponse
from PIL import Image

from . import brain, measure, segment
from .enhance import WindowLevel, window_level
from .errors import NeurosegError, RangeError
from .formats import read_volume
from .project import load_project, save_project
from .segment import DiskSelection, PolygonSelection, RegionGrowParams
from .session import SessionState
from .surface import marching_cubes, serialize_mesh
from .volume import (
    PLANE_FREE_AXES,
    extract_frame,
    histogram,
    histogram_edges,
    slice_extract,
)


class _Registry:
    def __init__(self):
        self.sessions: dict[str, SessionState] = {}
        self.locks: dict[str, threading.RLock] = {}
        self._guard = threading.Lock()

    def create(self, session: SessionState) -> str:
        sid = uuid.uuid4().hex[:12]
        with self._guard:
            self.sessions[sid] = session
            self.locks[sid] = threading.RLock()
        return sid

    def get(self, sid: str):
        session = self.sessions.get(sid)
        if session is None:
            return None, None
        return session, self.locks[sid]


def _error(status: int, exc: Exception) -> JSONResponse:
    return JSONResponse({"error": str(exc)}, status_code=status)


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


def _parse_region(body: dict):
    plane = body.get("plane", "axial")
    index = int(body.get("index", 0))
    if "points" in body:
        return PolygonSelection(plane, index, [tuple(p) for p in body["points"]])
    return DiskSelection(plane, index, tuple(body["center"]),
                         float(body.get("radius", 0.0)))


def create_app() -> FastAPI:
    app = FastAPI(title="neuroseg service")
    registry = _Registry()

    def with_session(sid):
        return registry.get(sid)

    @app.post("/sessions", status_code=201)
    def create_session(body: dict = Body(...)):
        paths = [body["path"]]
        if body.get("second_path"):
            paths.append(body["second_path"])
        session = SessionState()
        try:
            for p in paths:
                vol = read_volume(p)
                if vol.is_4d:
                    vol = extract_frame(vol, 0)
                session.add_slot(vol, source_path=str(p))
        except FileNotFoundError as exc:
            return _error(422, exc)
        except NeurosegError as exc:
            return _error(422, exc)
        sid = registry.create(session)
        return JSONResponse(
            {"id": sid,
             "slots": [{"dims": list(s.volume.dims),
                        "spacing": list(s.volume.spacing)}
                       for s in session.slots]},
            status_code=201)

    @app.get("/sessions/{sid}/slots/{slot}/slice")
    def get_slice(sid: str, slot: int, plane: str = "axial", index: int = 0,
                  window: Optional[float] = None, level: Optional[float] = None,
                  overlay: bool = False):
        session, lock = with_session(sid)
        if session is None:
            return _error(404, KeyError(f"no session {sid}"))
        with lock:
            try:
                vslot = session.slot(slot)
                sl = slice_extract(vslot.volume, plane, index)
            except RangeError as exc:
                return _error(416, exc)
            except NeurosegError as exc:
                return _error(422, exc)
            wl = vslot.window_level
            if window is not None or level is not None:
                wl = WindowLevel(window if window is not None else wl.window,
                                 level if level is not None else wl.level)
            gray = window_level(sl.data, wl)
            if not overlay:
                img = Image.fromarray(gray.T, mode="L")
            else:
                rgb = np.repeat(gray[..., None], 3, axis=2).astype(np.float64)
                label_slice = segment._plane_view(vslot.labels.data, plane, index)
                for lid in np.unique(label_slice):
                    if lid == 0:
                        continue
                    _, r, g, b, a = vslot.scheme.color(int(lid))
                    where = label_slice == lid
                    alpha = a / 255.0
                    rgb[where] = (1 - alpha) * rgb[where] + alpha * np.array(
                        [r, g, b], dtype=np.float64)
                rgba = np.dstack([
                    np.clip(np.floor(rgb + 0.5), 0, 255).astype(np.uint8),
                    np.full(gray.shape + (1,), 255, np.uint8)])
                img = Image.fromarray(np.swapaxes(rgba, 0, 1), mode="RGBA")
        buf = io.BytesIO()
        img.save(buf, format="PNG")
        return Response(buf.getvalue(), media_type="image/png")

    def _run_tool(session, slot_idx: int, name: str, body: dict) -> int:
        vslot = session.slot(slot_idx)
        before = vslot.labels.data.copy()
        label = int(body.get("label", 1))
        if name == "polygon_fill":
            changed = segment.polygon_fill(
                vslot.labels, _parse_region(body), label)
        elif name == "region_grow":
            params = RegionGrowParams(
                body.get("plane", "axial"), int(body.get("index", 0)),
                tuple(body["seed"]), float(body["radius"]),
                bool(body.get("connectivity_only", False)))
            changed = segment.region_grow(vslot.volume, vslot.labels, params, label)
        elif name == "erase":
            target = body.get("target_label")
            changed = segment.erase(vslot.labels, _parse_region(body),
                                    None if target in (None, "all") else int(target))
        elif name == "copy_to_adjacent":
            changed = segment.copy_to_adjacent(
                vslot.labels, body.get("plane", "axial"), int(body["index"]),
                int(body.get("direction", 1)), int(body.get("count", 1)))
        elif name == "interpolate_between":
            ua, va = PLANE_FREE_AXES[body.get("plane", "axial")]
            sp = vslot.volume.spacing
            changed = segment.interpolate_between(
                vslot.labels, body.get("plane", "axial"), int(body["a"]),
                int(body["b"]), label, (sp[ua], sp[va]))
        elif name == "overwrite_label":
            changed = segment.overwrite_label(vslot.labels, _parse_region(body),
                                              int(body.get("label", 0)))
        elif name == "mask_combine":
            other = session.slot(int(body["other_slot"]))
            changed = segment.mask_combine(vslot.labels, other.labels, label,
                                           body.get("op", "add"))
        elif name == "extract_brain":
            params = brain.ExtractParams(
                float(body.get("threshold_offset", 0.0)),
                float(body.get("morph_radius_mm", 2.0)))
            mask = brain.extract_brain(vslot.volume, params)
            vslot.labels.data[mask.data > 0] = label
            changed = int(np.count_nonzero(before != vslot.labels.data))
        else:
            raise segment.ValidationError(f"unknown tool '{name}'")
        vslot.record_change(before)
        return changed

    @app.post("/sessions/{sid}/slots/{slot}/tools/{name}")
    def apply_tool(sid: str, slot: int, name: str, body: dict = Body(...)):
        session, lock = with_session(sid)
        if session is None:
            return _error(404, KeyError(f"no session {sid}"))
        with lock:
            try:
                changed = _run_tool(session, slot, name, body)
            except NeurosegError as exc:
                return _error(422, exc)
            except (KeyError, TypeError) as exc:
                return _error(422, exc)
        return {"changed": changed}

    @app.post("/sessions/{sid}/slots/{slot}/undo")
    def undo(sid: str, slot: int):
        session, lock = with_session(sid)
        if session is None:
            return _error(404, KeyError(f"no session {sid}"))
        with lock:
            try:
                vslot = session.slot(slot)
                changed = vslot.undo()
            except IndexError:
                return _error(409, ValueError("nothing to undo"))
            except NeurosegError as exc:
                return _error(422, exc)
        return {"changed": changed}

    @app.post("/sessions/{sid}/slots/{slot}/redo")
    def redo(sid: str, slot: int):
        session, lock = with_session(sid)
        if session is None:
            return _error(404, KeyError(f"no session {sid}"))
        with lock:
            try:
                vslot = session.slot(slot)
                changed = vslot.redo()
            except IndexError:
                return _error(409, ValueError("nothing to redo"))
            except NeurosegError as exc:
                return _error(422, exc)
        return {"changed": changed}

    @app.get("/sessions/{sid}/slots/{slot}/mesh")
    def get_mesh(sid: str, slot: int, label: int = 1):
        session, lock = with_session(sid)
        if session is None:
            return _error(404, KeyError(f"no session {sid}"))
        with lock:
            try:
                vslot = session.slot(slot)
                mesh = marching_cubes(vslot.labels, label, vslot.volume.spacing,
                                      vslot.volume.affine)
            except NeurosegError as exc:
                return _error(422, exc)
        return Response(serialize_mesh(mesh),
                        media_type="application/octet-stream")

    @app.get("/sessions/{sid}/slots/{slot}/histogram")
    def get_histogram(sid: str, slot: int, bins: int = 64,
                      lo: Optional[float] = None, hi: Optional[float] = None):
        session, lock = with_session(sid)
        if session is None:
            return _error(404, KeyError(f"no session {sid}"))
        with lock:
            try:
                vslot = session.slot(slot)
                vrange = (lo, hi) if lo is not None and hi is not None else None
                counts = histogram(vslot.volume, bins, vrange)
                edges = histogram_edges(vslot.volume, bins, vrange)
            except NeurosegError as exc:
                return _error(422, exc)
        return {"counts": counts.tolist(), "edges": [float(e) for e in edges]}

    @app.get("/sessions/{sid}/slots/{slot}/metadata")
    def get_slot_metadata(sid: str, slot: int):
        session, lock = with_session(sid)
        if session is None:
            return _error(404, KeyError(f"no session {sid}"))
        with lock:
            try:
                vslot = session.slot(slot)
            except NeurosegError as exc:
                return _error(422, exc)
            return {"metadata": dict(vslot.volume.metadata),
                    "dims": list(vslot.volume.dims),
                    "spacing": list(vslot.volume.spacing),
                    "dtype_tag": vslot.volume.dtype_tag}

    @app.post("/sessions/{sid}/measurements", status_code=201)
    def create_measurement(sid: str, body: dict = Body(...)):
        session, lock = with_session(sid)
        if session is None:
            return _error(404, KeyError(f"no session {sid}"))
        with lock:
            try:
                record = _make_measurement(session, body)
            except NeurosegError as exc:
                return _error(422, exc)
            except (KeyError, TypeError) as exc:
                return _error(422, exc)
            session.measurements.append(record)
            session.next_measurement_id += 1
        return JSONResponse(record.to_dict(), status_code=201)

    def _make_measurement(session, body: dict) -> measure.MeasurementRecord:
        kind = body["kind"]
        slot = session.slot(int(body.get("slot", 0)))
        spacing = slot.volume.spacing
        mid = session.next_measurement_id
        ts = _now()
        if kind == "distance":
            p, q = body["p"], body["q"]
            value = measure.distance(p, q, spacing, dims=slot.volume.dims)
            return measure.MeasurementRecord(mid, "distance", value, None, "mm",
                                             points=[list(p), list(q)],
                                             timestamp=ts)
        if kind == "angle":
            plane = body.get("plane", "axial")
            ua, va = PLANE_FREE_AXES[plane]
            value = measure.angle(body["p"], body["q"],
                                  (spacing[ua], spacing[va]))
            return measure.MeasurementRecord(mid, "angle", value, None,
                                             "degrees", plane=plane,
                                             slice_index=body.get("index"),
                                             points=[list(body["p"]),
                                                     list(body["q"])],
                                             timestamp=ts)
        if kind == "area_perimeter":
            plane = body.get("plane", "axial")
            area, perim = measure.area_perimeter(
                slot.labels, plane, int(body["index"]), int(body["label"]),
                spacing)
            return measure.MeasurementRecord(mid, "area_perimeter", area, perim,
                                             "mm^2,mm", plane=plane,
                                             slice_index=int(body["index"]),
                                             label=int(body["label"]),
                                             timestamp=ts)
        if kind == "volume":
            value = measure.region_volume(slot.labels, int(body["label"]),
                                          spacing)
            return measure.MeasurementRecord(mid, "volume", value, None, "mm^3",
                                             label=int(body["label"]),
                                             timestamp=ts)
        raise segment.ValidationError(f"unknown measurement kind '{kind}'")

    @app.get("/sessions/{sid}/measurements")
    def list_measurements(sid: str):
        session, lock = with_session(sid)
        if session is None:
            return _error(404, KeyError(f"no session {sid}"))
        with lock:
            return {"measurements": [r.to_dict() for r in session.measurements]}

    @app.delete("/sessions/{sid}/measurements/{mid}")
    def delete_measurement(sid: str, mid: int):
        session, lock = with_session(sid)
        if session is None:
            return _error(404, KeyError(f"no session {sid}"))
        with lock:
            before = len(session.measurements)
            session.measurements = [r for r in session.measurements
                                    if r.id != mid]
            if len(session.measurements) == before:
                return _error(404, KeyError(f"no measurement {mid}"))
        return {"deleted": mid}

    @app.get("/sessions/{sid}/measurements.csv")
    def export_measurements(sid: str):
        session, lock = with_session(sid)
        if session is None:
            return _error(404, KeyError(f"no session {sid}"))
        with lock:
            text = measure.export_csv(session.measurements)
        return Response(text, media_type="text/csv")

    @app.post("/sessions/{sid}/save")
    def save(sid: str, body: dict = Body(...)):
        session, lock = with_session(sid)
        if session is None:
            return _error(404, KeyError(f"no session {sid}"))
        with lock:
            try:
                save_project(session, body["path"],
                             bool(body.get("embed_volumes", False)))
            except (OSError, NeurosegError) as exc:
                return _error(422, exc)
        return {"saved": body["path"]}

    @app.post("/projects/load", status_code=201)
    def load(body: dict = Body(...)):
        try:
            session = load_project(body["path"])
        except NeurosegError as exc:
            return _error(422, exc)
        sid = registry.create(session)
        return JSONResponse({"id": sid, "slots": len(session.slots)},
                            status_code=201)

    return app


def serve(host: str = "127.0.0.1", port: Optional[int] = None) -> None:
    import uvicorn

    if port is None:
        port = int(os.environ.get("SERVICE_PORT", "8977"))
    uvicorn.run(create_app(), host=host, port=port)
