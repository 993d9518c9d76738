import numpy as np
import pytest

from srtlab.grids import (Axis, ImageGrid, SinogramGrid, read_image_srt,
                          read_sinogram_srt, read_srt, write_image_srt,
                          write_sinogram_srt, write_srt)


def test_axis_values_and_weights():
    ax = Axis.spanning(0.0, 1.0, 5)
    assert np.allclose(ax.values(), [0, 0.25, 0.5, 0.75, 1.0])
    w = ax.trapezoid_weights()
    assert w[0] == w[-1] == 0.125
    assert np.isclose(w.sum(), 1.0)


def test_sinogram_validation():
    det = Axis.spanning(-1, 1, 8)
    t = Axis.spanning(0.1, 2.0, 16)
    SinogramGrid(2, (det,), t, np.zeros((8, 16)))
    with pytest.raises(ValueError):
        SinogramGrid(2, (det,), Axis(0.0, 0.1, 16), np.zeros((8, 16)))
    with pytest.raises(ValueError):
        SinogramGrid(2, (det,), t, np.zeros((16, 8)))
    with pytest.raises(ValueError):
        SinogramGrid(2, (det,), t, np.full((8, 16), np.nan))


def test_image_grid_geometry_helpers():
    img = ImageGrid.blank(2, (0.5, -1.0), (1.5, 0.0), (11, 11))
    assert img.spacing == pytest.approx(0.1)
    assert img.index_of((0.52, -0.48)) == (0, 5)
    assert np.allclose(img.point_at((10, 10)), [1.5, 0.0])
    assert img.contains((1.0, -0.5))
    assert not img.contains((0.4, -0.5))
    with pytest.raises(ValueError):
        ImageGrid.blank(2, (-0.1, 0.0), (1.0, 1.0), (8, 8))
    with pytest.raises(ValueError):
        ImageGrid.blank(2, (0.1, 0.0), (1.1, 2.0), (11, 11))  # nonuniform


def test_image_sampling_cubic():
    # spline prefiltering has a boundary transient; probe the interior
    img = ImageGrid.blank(2, (1.0, 0.0), (2.0, 1.0), (41, 41))
    pts = img.points()
    img = img.like(pts[..., 0] ** 3 + 2.0 * pts[..., 1] ** 2)
    probe = np.array([[1.43, 0.47], [1.5, 0.5], [1.61, 0.53]])
    got = img.sample(probe)
    want = probe[:, 0] ** 3 + 2.0 * probe[:, 1] ** 2
    assert np.allclose(got, want, atol=1e-6)


def test_srt_round_trip_is_byte_exact(tmp_path):
    rng = np.random.default_rng(5)
    axes = (Axis(-1.0, 0.25, 9), Axis(0.5, 0.125, 17))
    values = rng.normal(size=(9, 17))
    path = tmp_path / "raster.srt"
    write_srt(path, axes, values)
    assert path.stat().st_size == 64 + 8 * values.size
    axes2, values2 = read_srt(path)
    assert axes2 == axes
    assert np.array_equal(values, values2)
    write_srt(path, axes, values)
    blob1 = path.read_bytes()
    write_srt(path, axes, values)
    assert path.read_bytes() == blob1


def test_image_and_sinogram_srt_helpers(tmp_path):
    img = ImageGrid.blank(3, (0.5, -1.0, -1.0), (1.5, 0.0, 0.0), (6, 6, 6))
    img.values[2, 3, 4] = 7.5
    write_image_srt(tmp_path / "img.srt", img)
    back = read_image_srt(tmp_path / "img.srt")
    assert back.dim == 3 and back.values[2, 3, 4] == 7.5

    det = Axis.spanning(-1, 1, 8)
    t = Axis.spanning(0.05, 2.0, 12)
    sino = SinogramGrid(2, (det,), t, np.arange(96, dtype=float).reshape(8, 12))
    write_sinogram_srt(tmp_path / "sino.srt", sino)
    back = read_sinogram_srt(tmp_path / "sino.srt")
    assert back.t_axis == t and np.array_equal(back.values, sino.values)


def test_srt_magic_rejected(tmp_path):
    path = tmp_path / "bad.srt"
    path.write_bytes(b"NOTMAGIC" + b"\x00" * 120)
    with pytest.raises(ValueError):
        read_srt(path)
