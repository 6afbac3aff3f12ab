import numpy as np
import pytest

from neuroseg.cli import main
from neuroseg.formats import read_volume, write_nifti
from neuroseg.surface import deserialize_mesh
from neuroseg.volume import Volume3D

from conftest import make_volume


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestConvert:
    def test_round_trip(self, tmp_path, capsys):
        src = tmp_path / "a.nii"
        dst = tmp_path / "b.nii.gz"
        vol = make_volume((5, 4, 3))
        write_nifti(vol, src)
        code, out, err = run(capsys, "convert", str(src), str(dst))
        assert code == 0 and err == ""
        assert np.array_equal(read_volume(dst).data, vol.data)

    def test_missing_input_exit_1(self, tmp_path, capsys):
        code, out, err = run(capsys, "convert", str(tmp_path / "no.nii"),
                             str(tmp_path / "o.nii"))
        assert code == 1
        assert err.startswith("error:")
        assert out == ""


class TestUsageErrors:
    def test_unknown_subcommand_exit_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_no_arguments_exit_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2


class TestInfo:
    def test_prints_metadata_pairs(self, tmp_path, capsys):
        src = tmp_path / "a.nii"
        write_nifti(Volume3D(np.zeros((2, 2, 2)),
                             metadata={"descrip": "subject42"}), src)
        code, out, err = run(capsys, "info", str(src))
        assert code == 0
        assert "descrip: subject42" in out


class TestHistogram:
    def test_counts_sum_to_voxels(self, tmp_path, capsys):
        src = tmp_path / "a.nii"
        write_nifti(make_volume((4, 4, 4)), src)
        code, out, err = run(capsys, "histogram", str(src), "--bins", "8")
        assert code == 0
        counts = [int(line.split()[-1]) for line in out.splitlines()]
        assert sum(counts) == 64


class TestMeasure:
    def test_distance_five_mm(self, capsys):
        code, out, err = run(capsys, "measure", "distance",
                             "--p", "0,0,0", "--q", "3,4,0")
        assert code == 0
        assert out.strip() == "5.00000 mm"

    def test_distance_spacing(self, capsys):
        code, out, err = run(capsys, "measure", "distance",
                             "--p", "0,0,0", "--q", "0,0,4",
                             "--spacing", "1,1,0.5")
        assert out.strip() == "2.00000 mm"

    def test_angle(self, capsys):
        code, out, err = run(capsys, "measure", "angle",
                             "--p", "0,0", "--q", "2,2")
        assert out.strip() == "45.0000 deg"

    def test_area_from_label_file(self, tmp_path, capsys):
        data = np.zeros((16, 16, 3), np.float32)
        data[5:15, 8:18, 1] = 1.0
        labels = tmp_path / "labels.nii"
        write_nifti(Volume3D(data, (0.5, 0.5, 1.0), dtype_tag="int32"), labels)
        code, out, err = run(capsys, "measure", "area", str(labels),
                             "--index", "1", "--label", "1")
        assert code == 0
        assert "area 20.0000 mm^2" in out  # 10x8 visible pixels at 0.25 mm^2
        assert "perimeter" in out


class TestFillAndGrow:
    def test_fill_creates_label_file(self, tmp_path, capsys):
        src = tmp_path / "a.nii"
        out_path = tmp_path / "labels.nii.gz"
        write_nifti(make_volume((8, 8, 4)), src)
        code, out, err = run(capsys, "fill", str(src), "new", str(out_path),
                             "--index", "1", "--label", "2",
                             "--points", "1,1", "6,1", "6,6", "1,6")
        assert code == 0
        assert out.strip() == "25"
        labels = np.rint(read_volume(out_path).data).astype(int)
        assert (labels == 2).sum() == 25

    def test_grow_then_fill_accumulates(self, tmp_path, capsys):
        src = tmp_path / "a.nii"
        data = np.zeros((9, 9, 3), np.float32)
        data[3:6, 3:6, 1] = 50.0
        write_nifti(Volume3D(data), src)
        lab1 = tmp_path / "l1.nii"
        code, out, err = run(capsys, "grow", str(src), "new", str(lab1),
                             "--seed", "4,4,1", "--radius", "2", "--label", "1")
        assert code == 0
        assert int(out.strip()) > 0
        lab2 = tmp_path / "l2.nii"
        code, out, err = run(capsys, "fill", str(src), str(lab1), str(lab2),
                             "--index", "0", "--label", "3",
                             "--points", "0,0", "2,0", "2,2", "0,2")
        labels = np.rint(read_volume(lab2).data).astype(int)
        assert (labels == 1).any() and (labels == 3).any()

    def test_grow_mm_seed(self, tmp_path, capsys):
        src = tmp_path / "a.nii"
        data = np.zeros((9, 9, 3), np.float32)
        data[4, 4, 1] = 50.0
        write_nifti(Volume3D(data, (2.0, 2.0, 2.0)), src)
        out_path = tmp_path / "l.nii"
        code, out, err = run(capsys, "grow", str(src), "new", str(out_path),
                             "--seed", "8,8,2", "--radius", "1", "--mm")
        assert code == 0
        labels = np.rint(read_volume(out_path).data).astype(int)
        assert labels[4, 4, 1] == 1


class TestRotateEnhance:
    def test_rotate_90_axial(self, tmp_path, capsys):
        src = tmp_path / "a.nii"
        dst = tmp_path / "b.nii"
        vol = make_volume((5, 5, 5), seed=2)
        write_nifti(vol, src)
        code, out, err = run(capsys, "rotate", str(src), str(dst),
                             "--axis", "axial", "--degrees", "90")
        assert code == 0
        back = read_volume(dst)
        assert np.allclose(back.data[2, 2, :], vol.data[2, 2, :], atol=1e-6)

    def test_enhance_window_uint8_range(self, tmp_path, capsys):
        src = tmp_path / "a.nii"
        dst = tmp_path / "b.nii"
        write_nifti(make_volume((6, 6, 6)), src)
        code, out, err = run(capsys, "enhance", str(src), str(dst),
                             "--window", "0.5", "--level", "0.5")
        assert code == 0
        back = read_volume(dst)
        assert back.dtype_tag == "uint8"
        assert back.data.min() >= 0 and back.data.max() <= 255

    def test_enhance_requires_exactly_one_filter(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["enhance", "a.nii", "b.nii"])
        assert exc.value.code == 2


class TestMeshInterp:
    def test_mesh_writes_decodable_buffer(self, tmp_path, capsys):
        data = np.zeros((8, 8, 8), np.float32)
        data[2:6, 2:6, 2:6] = 1.0
        labels = tmp_path / "l.nii"
        write_nifti(Volume3D(data, dtype_tag="int32"), labels)
        out_path = tmp_path / "m.bin"
        code, out, err = run(capsys, "mesh", str(labels), str(out_path))
        assert code == 0
        nv, nt = (int(x) for x in out.split())
        mesh = deserialize_mesh(out_path.read_bytes(), 1)
        assert (len(mesh.vertices), len(mesh.triangles)) == (nv, nt)
        assert nt > 0

    def test_interp_fills_between(self, tmp_path, capsys):
        data = np.zeros((12, 12, 5), np.float32)
        data[4:8, 4:8, 0] = 1.0
        data[4:8, 4:8, 4] = 1.0
        labels = tmp_path / "l.nii"
        write_nifti(Volume3D(data, dtype_tag="int32"), labels)
        out_path = tmp_path / "o.nii"
        code, out, err = run(capsys, "interp", str(labels), str(out_path),
                             "--a", "0", "--b", "4")
        assert code == 0
        filled = np.rint(read_volume(out_path).data).astype(int)
        for k in range(1, 4):
            assert (filled[:, :, k] == 1).sum() == 16


class TestExtractBrain:
    def test_ball_phantom(self, tmp_path, capsys):
        n = 24
        x, y, z = np.meshgrid(*[np.arange(n)] * 3, indexing="ij")
        inside = ((x - 11.5) ** 2 + (y - 11.5) ** 2 + (z - 11.5) ** 2) <= 64
        src = tmp_path / "a.nii"
        write_nifti(Volume3D(np.where(inside, 100, 0).astype(np.float32)), src)
        out_path = tmp_path / "mask.nii"
        code, out, err = run(capsys, "extract-brain", str(src), str(out_path))
        assert code == 0
        assert int(out.strip()) > 0
        mask = np.rint(read_volume(out_path).data).astype(int) > 0
        overlap = 2 * (mask & inside).sum() / (mask.sum() + inside.sum())
        assert overlap > 0.95
