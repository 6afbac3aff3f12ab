"""Session state: image slots, label maps, settings and undo history."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .enhance import WindowLevel
from .errors import ValidationError
from .segment import LabelMap
from .volume import ColorScheme, Volume3D

DEFAULT_UNDO_LIMIT = 64


@dataclass
class Patch:
    """Sparse voxel patch: flat indices plus the values to restore."""

    indices: np.ndarray
    values: np.ndarray


def diff_patch(before: np.ndarray, after: np.ndarray) -> Optional[Patch]:
    changed = np.flatnonzero(before.ravel() != after.ravel())
    if len(changed) == 0:
        return None
    return Patch(changed, before.ravel()[changed].copy())


def apply_patch(data: np.ndarray, patch: Patch) -> Patch:
    """Restore a patch in place, returning the inverse patch."""
    flat = data.ravel()
    inverse = Patch(patch.indices, flat[patch.indices].copy())
    flat[patch.indices] = patch.values
    return inverse


@dataclass
class VolumeSlot:
    volume: Volume3D
    labels: LabelMap
    scheme: ColorScheme = field(default_factory=ColorScheme.default)
    window_level: Optional[WindowLevel] = None
    source_path: Optional[str] = None
    undo_stack: deque = field(default_factory=lambda: deque(maxlen=DEFAULT_UNDO_LIMIT))
    redo_stack: list = field(default_factory=list)

    def __post_init__(self):
        if self.labels.dims != self.volume.dims:
            raise ValidationError(
                f"label dims {self.labels.dims} != volume dims {self.volume.dims}")
        if self.window_level is None:
            lo = float(self.volume.data.min())
            hi = float(self.volume.data.max())
            self.window_level = WindowLevel(hi - lo if hi > lo else 1.0,
                                            (hi + lo) / 2.0)

    def record_change(self, before: np.ndarray) -> int:
        """Push the inverse patch for a finished mutation; clears redo."""
        patch = diff_patch(before, self.labels.data)
        if patch is None:
            return 0
        self.undo_stack.append(patch)
        self.redo_stack.clear()
        return len(patch.indices)

    def undo(self) -> int:
        patch = self.undo_stack.pop()  # IndexError when empty; caller maps it
        self.redo_stack.append(apply_patch(self.labels.data, patch))
        return len(patch.indices)

    def redo(self) -> int:
        patch = self.redo_stack.pop()
        self.undo_stack.append(apply_patch(self.labels.data, patch))
        return len(patch.indices)


@dataclass
class SessionState:
    """One or two image slots plus the measurement catalog."""

    slots: list = field(default_factory=list)
    measurements: list = field(default_factory=list)
    next_measurement_id: int = 1
    undo_limit: int = DEFAULT_UNDO_LIMIT

    def slot(self, index: int) -> VolumeSlot:
        if not 0 <= index < len(self.slots):
            raise ValidationError(f"no slot {index} (session has {len(self.slots)})")
        return self.slots[index]

    def add_slot(self, volume: Volume3D, source_path=None) -> VolumeSlot:
        if len(self.slots) >= 2:
            raise ValidationError("a session holds at most two slots")
        slot = VolumeSlot(volume, LabelMap.for_volume(volume),
                          source_path=source_path)
        slot.undo_stack = deque(maxlen=self.undo_limit)
        self.slots.append(slot)
        return slot
