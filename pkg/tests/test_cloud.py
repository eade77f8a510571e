import numpy as np
import pytest

from canopyfit.errors import DomainError
from canopyfit.morphology.canopy import CanopyLayout, build_canopy
from canopyfit.morphology.mesh import LEAF, STEM, LabeledMesh
from canopyfit.morphology.params import SoybeanParams
from canopyfit.render.camera import canonical_camera
from canopyfit.render.cloud import DEFAULT_ORGAN_COLORS, GROUND, sample_surface_points, splat, unproject
from canopyfit.render.raster import render_depth


@pytest.fixture(scope="module")
def scene():
    cam = canonical_camera(1.0, 160, 120)
    mesh = build_canopy("soybean", SoybeanParams(), CanopyLayout(num_rows=2, plants_per_row=5), seed=1)
    depth, mask = render_depth(mesh, cam)
    return cam, depth, mask


def test_center_pixel_height():
    cam = canonical_camera(2.0, 5, 5, 40.0)
    depth = np.full((5, 5), np.nan, np.float32)
    depth[2, 2] = 0.75
    cloud = unproject(depth, cam)
    assert len(cloud) == 1
    np.testing.assert_allclose(cloud.points[0], [0.0, 0.0, 1.25], atol=1e-12)


def test_nan_pixels_emit_nothing(scene):
    cam, depth, mask = scene
    assert len(unproject(depth, cam)) == mask.sum()


def test_unproject_round_trip(scene):
    cam, depth, mask = scene
    uvz = cam.project(unproject(depth, cam).points)
    ii, jj = np.nonzero(mask)
    np.testing.assert_allclose(uvz[:, 0], jj + 0.5, atol=1e-6)
    np.testing.assert_allclose(uvz[:, 1], ii + 0.5, atol=1e-6)
    np.testing.assert_allclose(uvz[:, 2], depth[mask], atol=1e-5)


def test_splat_reproduces_foreground(scene):
    cam, depth, mask = scene
    sd, sm = splat(unproject(depth, cam), cam)
    assert (sm & mask).sum() >= 0.99 * mask.sum()
    np.testing.assert_allclose(sd[mask], depth[mask], atol=1e-5)


def test_unproject_shape_check():
    with pytest.raises(DomainError):
        unproject(np.zeros((3, 3)), canonical_camera(1.0, 4, 3))


def tri_mesh(tris, cls=LEAF):
    v = np.asarray(tris, float).reshape(-1, 3)
    n = len(v) // 3
    return LabeledMesh(v, np.arange(len(v)).reshape(n, 3), [cls] * n, [0] * n, [0] * n)


def test_points_inside_triangle():
    tri = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 2.0, 0.0]])
    cloud = sample_surface_points(tri_mesh([tri]), 1000, seed=3)
    x, y = cloud.points[:, 0], cloud.points[:, 1]
    assert np.all(x >= -1e-12) and np.all(y >= -1e-12) and np.all(x + y / 2 <= 1 + 1e-12)
    np.testing.assert_array_equal(cloud.points[:, 2], 0.0)
    assert np.all(cloud.colors == DEFAULT_ORGAN_COLORS[LEAF])


def test_area_ratio():
    big = [[0, 0, 0], [3, 0, 0], [0, 1, 0]]
    small = [[5, 0, 0], [6, 0, 0], [5, 1, 0]]
    cloud = sample_surface_points(tri_mesh([big, small]), 40000, seed=8)
    n_big = np.sum(cloud.points[:, 0] < 4)
    ratio = n_big / (40000 - n_big)
    assert ratio == pytest.approx(3.0, rel=0.02)


def test_sampling_deterministic():
    m = tri_mesh([[[0, 0, 0], [1, 0, 0], [0, 1, 0]]])
    a = sample_surface_points(m, 100, seed=5)
    b = sample_surface_points(m, 100, seed=5)
    np.testing.assert_array_equal(a.points, b.points)
    np.testing.assert_array_equal(a.colors, b.colors)


def test_ground_and_organ_colors():
    m = tri_mesh([[[0, 0, 0.5], [0.1, 0, 0.5], [0, 0.1, 0.5]]], cls=STEM)
    cloud = sample_surface_points(m, 500, seed=1, organ_colors={STEM: (1, 2, 3)},
                                  ground_extent=(-1, 1, -1, 1))
    ground = cloud.points[:, 2] == 0
    assert ground.sum() > 400
    assert np.all(cloud.colors[ground] == DEFAULT_ORGAN_COLORS[GROUND])
    assert np.all(cloud.colors[~ground] == (1, 2, 3))


def test_sampling_errors():
    with pytest.raises(DomainError):
        sample_surface_points(LabeledMesh.empty(), 10)
    with pytest.raises(DomainError):
        sample_surface_points(tri_mesh([[[0, 0, 0], [1, 0, 0], [0, 1, 0]]]), 0)
