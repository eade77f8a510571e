import struct

import numpy as np
import pytest

from canopyfit.errors import DomainError, FormatError
from canopyfit.render.cloud import PointCloud
from canopyfit.render.formats import (read_cdm, read_pgm, read_ply, read_ppm, write_cdm, write_pgm,
                                      write_ply, write_ppm)


def test_cdm_layout(tmp_path):
    d = np.array([[0.5, np.nan, 1.0], [2.0, 3.0, 4.0]], np.float32)
    write_cdm(d, tmp_path / "d.cdm")
    raw = (tmp_path / "d.cdm").read_bytes()
    assert raw[:4] == b"CDM1"
    assert struct.unpack("<II", raw[4:12]) == (3, 2)
    assert struct.unpack("<f", raw[12:16])[0] == 0.5
    back = read_cdm(tmp_path / "d.cdm")
    np.testing.assert_array_equal(back, d)


def test_cdm_errors(tmp_path):
    (tmp_path / "a.cdm").write_bytes(b"XXXX" + bytes(8))
    with pytest.raises(FormatError, match="offset 0"):
        read_cdm(tmp_path / "a.cdm")
    (tmp_path / "b.cdm").write_bytes(b"CDM1" + struct.pack("<II", 2, 2) + bytes(4))
    with pytest.raises(FormatError, match="mismatch"):
        read_cdm(tmp_path / "b.cdm")


def test_pgm_round_trip(tmp_path, rng):
    m = rng.uniform(size=(7, 5)) > 0.5
    write_pgm(m, tmp_path / "m.pgm")
    assert (tmp_path / "m.pgm").read_bytes().startswith(b"P5\n5 7\n255\n")
    np.testing.assert_array_equal(read_pgm(tmp_path / "m.pgm"), m)


def test_pgm_with_comment(tmp_path):
    (tmp_path / "c.pgm").write_bytes(b"P5\n# note\n2 1\n255\n\x00\xff")
    np.testing.assert_array_equal(read_pgm(tmp_path / "c.pgm"), [[False, True]])


def test_ppm_round_trip(tmp_path, rng):
    img = rng.integers(0, 256, size=(4, 6, 3)).astype(np.uint8)
    write_ppm(img, tmp_path / "i.ppm")
    np.testing.assert_array_equal(read_ppm(tmp_path / "i.ppm"), img)
    with pytest.raises(FormatError):
        read_pgm(tmp_path / "i.ppm")


def test_netpbm_truncated(tmp_path):
    (tmp_path / "t.pgm").write_bytes(b"P5\n4 4\n255\n" + bytes(3))
    with pytest.raises(FormatError):
        read_pgm(tmp_path / "t.pgm")


def test_ply_round_trip(tmp_path, rng):
    cloud = PointCloud(rng.normal(size=(50, 3)), rng.integers(0, 256, size=(50, 3)))
    write_ply(cloud, tmp_path / "c.ply")
    back = read_ply(tmp_path / "c.ply")
    np.testing.assert_allclose(back.points, cloud.points.astype(np.float32), rtol=1e-7)
    np.testing.assert_array_equal(back.colors, cloud.colors)
    text = (tmp_path / "c.ply").read_bytes().split(b"end_header")[0]
    assert b"binary_little_endian" in text and b"property uchar red" in text


def test_ply_without_colors(tmp_path, rng):
    cloud = PointCloud(rng.normal(size=(5, 3)))
    write_ply(cloud, tmp_path / "c.ply")
    assert read_ply(tmp_path / "c.ply").colors is None


def test_ply_extra_properties_ignored(tmp_path):
    header = (b"ply\nformat binary_little_endian 1.0\nelement vertex 2\nproperty float x\n"
              b"property float y\nproperty float z\nproperty float nx\nproperty uchar red\n"
              b"property uchar green\nproperty uchar blue\nend_header\n")
    rec = np.zeros(2, dtype=[("x", "<f4"), ("y", "<f4"), ("z", "<f4"), ("nx", "<f4"),
                             ("r", "u1"), ("g", "u1"), ("b", "u1")])
    rec["x"] = [1, 2]
    rec["g"] = [7, 8]
    (tmp_path / "e.ply").write_bytes(header + rec.tobytes())
    back = read_ply(tmp_path / "e.ply")
    np.testing.assert_array_equal(back.points[:, 0], [1, 2])
    np.testing.assert_array_equal(back.colors[:, 1], [7, 8])


def test_ply_bad_magic(tmp_path):
    (tmp_path / "x.ply").write_bytes(b"plx\n")
    with pytest.raises(FormatError):
        read_ply(tmp_path / "x.ply")


def test_color_count_mismatch():
    with pytest.raises(DomainError):
        PointCloud(np.zeros((3, 3)), np.zeros((2, 3)))
