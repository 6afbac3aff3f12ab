import numpy as np
import pytest

from neuroseg.errors import (
    DegenerateOrientationError,
    RangeError,
    ValidationError,
)
from neuroseg.volume import (
    Volume3D,
    extract_frame,
    histogram,
    linked_cursor,
    orientation_code,
    reorient,
    slice_extract,
    voxel_to_world,
    world_to_voxel,
)

from conftest import make_volume


def ramp_z_volume(n=3):
    x, y, z = np.meshgrid(np.arange(n), np.arange(n), np.arange(n),
                          indexing="ij")
    return Volume3D(z.astype(np.float32))


class TestSliceExtract:
    def test_axial_constant_plane(self):
        vol = ramp_z_volume()
        sl = slice_extract(vol, "axial", 2)
        assert sl.data.shape == (3, 3)
        assert np.all(sl.data == 2)

    def test_sagittal_column_axis_is_z(self):
        # index-arithmetic oracle: sagittal slice is [y, z], so column v = z
        vol = ramp_z_volume()
        sl = slice_extract(vol, "sagittal", 0)
        expected = np.tile(np.arange(3), (3, 1))
        assert np.array_equal(sl.data, expected)

    def test_out_of_range(self):
        vol = ramp_z_volume()
        with pytest.raises(RangeError, match="axial"):
            slice_extract(vol, "axial", 3)

    def test_values_copied_not_aliased(self):
        vol = make_volume()
        sl = slice_extract(vol, "coronal", 1)
        assert sl.data.flags.owndata or sl.data.base is not vol.data

    def test_reassembly_reproduces_volume(self):
        vol = make_volume((4, 5, 6), seed=3)
        for plane, axis in (("axial", 2), ("coronal", 1), ("sagittal", 0)):
            slices = [slice_extract(vol, plane, k).data
                      for k in range(vol.dims[axis])]
            stacked = np.stack(slices, axis=axis)
            assert np.array_equal(stacked, vol.data)

    def test_inplane_spacing(self):
        vol = make_volume(spacing=(0.5, 0.7, 1.1))
        assert slice_extract(vol, "axial", 0).spacing == (0.5, 0.7)
        assert slice_extract(vol, "coronal", 0).spacing == (0.5, 1.1)
        assert slice_extract(vol, "sagittal", 0).spacing == (0.7, 1.1)


class TestLinkedCursor:
    def test_axial_convention(self):
        vol = make_volume((8, 8, 8))
        assert linked_cursor(vol, "axial", 5, 2, 3) == (2, 3, 5)

    def test_coronal_convention(self):
        vol = make_volume((8, 8, 8))
        assert linked_cursor(vol, "coronal", 4, 1, 7) == (1, 4, 7)

    def test_out_of_bounds(self):
        vol = make_volume((8, 8, 8))
        with pytest.raises(RangeError):
            linked_cursor(vol, "axial", 0, 8, 0)

    def test_bijection(self):
        vol = make_volume((3, 4, 5))
        seen = set()
        for plane, axis in (("axial", 2),):
            nu, nv = 3, 4
            for k in range(5):
                for u in range(nu):
                    for v in range(nv):
                        seen.add(linked_cursor(vol, plane, k, u, v))
        assert len(seen) == 3 * 4 * 5


class TestReorient:
    def test_identity(self):
        vol = make_volume()
        out = reorient(vol, "RAS")
        assert np.array_equal(out.data, vol.data)
        assert np.array_equal(out.affine, vol.affine)

    def test_ras_to_las_flips_first_axis(self):
        # affine round-trip oracle: world position of every voxel preserved
        vol = make_volume((3, 4, 5), spacing=(2.0, 1.0, 1.0))
        out = reorient(vol, "LAS")
        assert orientation_code(out.affine) == "LAS"
        assert np.array_equal(out.data, vol.data[::-1])
        for p in [(0, 0, 0), (2, 3, 4), (1, 2, 2)]:
            q = (vol.dims[0] - 1 - p[0], p[1], p[2])
            assert np.allclose(voxel_to_world(out, q), voxel_to_world(vol, p))

    def test_invalid_code(self):
        vol = make_volume()
        with pytest.raises(ValidationError):
            reorient(vol, "RAX")

    def test_round_trip_identity(self):
        vol = make_volume((3, 4, 5))
        for code in ("LPS", "ASR", "IPL", "SLP"):
            back = reorient(reorient(vol, code), "RAS")
            assert np.array_equal(back.data, vol.data)
            assert np.allclose(back.affine, vol.affine, atol=1e-12)

    def test_ambiguous_affine(self):
        aff = np.eye(4)
        aff[:3, 0] = [1.0, 1.0, 0.0]  # equal projection on x and y
        aff[:3, 1] = [0.0, 1e-8, 0.0]
        vol = Volume3D(np.zeros((2, 2, 2)), affine=np.array(
            [[1, 1, 0, 0], [1, -1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
            dtype=float))
        with pytest.raises(DegenerateOrientationError):
            reorient(vol, "RAS")


class TestHistogram:
    def test_constant_volume_single_bin(self):
        vol = Volume3D(np.full((4, 4, 4), 7.0))
        counts = histogram(vol, 10)
        assert counts.sum() == 64
        assert len(counts) == 1

    def test_two_values_two_bins(self):
        data = np.zeros((4, 4, 4), np.float32)
        data[:2] = 1.0
        counts = histogram(Volume3D(data), 2, (0.0, 1.0))
        assert counts.tolist() == [32, 32]

    def test_counts_conserved(self, rng):
        data = rng.random((5, 5, 5))
        counts = histogram(Volume3D(data), 13)
        assert counts.sum() == 125

    def test_permutation_invariance(self, rng):
        data = rng.random((4, 4, 4)).astype(np.float32)
        shuffled = rng.permutation(data.ravel()).reshape(data.shape)
        assert np.array_equal(histogram(Volume3D(data), 8, (0, 1)),
                              histogram(Volume3D(shuffled), 8, (0, 1)))

    def test_zero_bins_rejected(self):
        with pytest.raises(ValidationError):
            histogram(make_volume(), 0)


class TestCoordinateMaps:
    def test_identity_affine(self):
        vol = Volume3D(np.zeros((5, 5, 5)), affine=np.eye(4))
        assert voxel_to_world(vol, (1, 2, 3)) == (1.0, 2.0, 3.0)

    def test_diagonal_scaling(self):
        vol = Volume3D(np.zeros((5, 5, 5)), spacing=(2, 2, 2))
        assert voxel_to_world(vol, (1, 1, 1)) == (2.0, 2.0, 2.0)

    def test_round_trip(self, rng):
        aff = np.eye(4)
        aff[:3, :3] = rng.normal(size=(3, 3)) + 3 * np.eye(3)
        aff[:3, 3] = rng.normal(size=3)
        vol = Volume3D(np.zeros((5, 5, 5)), affine=aff)
        p = tuple(rng.random(3) * 4)
        q = world_to_voxel(vol, voxel_to_world(vol, p))
        assert np.allclose(q, p, rtol=1e-9, atol=1e-9)


class TestExtractFrame:
    def test_frame_values(self):
        data = np.stack([np.full((3, 3, 3), t, np.float32) for t in range(4)],
                        axis=-1)
        vol = Volume3D(data)
        frame = extract_frame(vol, 2)
        assert not frame.is_4d
        assert np.all(frame.data == 2)
        assert frame.spacing == vol.spacing

    def test_3d_identity(self):
        vol = make_volume()
        assert extract_frame(vol, 0) is vol

    def test_out_of_range(self):
        data = np.zeros((2, 2, 2, 3), np.float32)
        with pytest.raises(RangeError):
            extract_frame(Volume3D(data), 3)


class TestInvariants:
    def test_dims_positive(self):
        with pytest.raises(ValidationError):
            Volume3D(np.zeros((0, 2, 2)))

    def test_spacing_positive(self):
        with pytest.raises(ValidationError):
            Volume3D(np.zeros((2, 2, 2)), spacing=(1, 0, 1))

    def test_immutable(self):
        vol = make_volume()
        with pytest.raises(ValueError):
            vol.data[0, 0, 0] = 1.0
