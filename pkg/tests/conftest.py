import numpy as np
import pytest

from neuroseg.segment import LabelMap
from neuroseg.volume import Volume3D


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def make_volume(shape=(5, 6, 7), spacing=(1.0, 1.0, 1.0), seed=0, affine=None):
    rng = np.random.default_rng(seed)
    data = rng.random(shape, dtype=np.float32)
    return Volume3D(data, spacing, affine)


def empty_labels(vol: Volume3D) -> LabelMap:
    return LabelMap.for_volume(vol)


def disk_mask(shape, center, radius):
    uu, vv = np.meshgrid(np.arange(shape[0]), np.arange(shape[1]), indexing="ij")
    return (uu - center[0]) ** 2 + (vv - center[1]) ** 2 <= radius ** 2
