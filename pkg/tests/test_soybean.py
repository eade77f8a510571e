import itertools

import numpy as np
import pytest

from canopyfit.errors import DomainError
from canopyfit.morphology.geometry import PRISM_TRIS
from canopyfit.morphology.mesh import LEAF, PETIOLE, STEM
from canopyfit.morphology.noise import PlantNoise
from canopyfit.morphology.params import MaizeParams, SoybeanParams, param_bounds
from canopyfit.morphology.profile import default_profile
from canopyfit.morphology.soybean import branch_count, generate_soybean_plant


def n_branches(mesh):
    stems = np.unique(mesh.face_organ[mesh.face_class == STEM])
    return int((stems > 0).sum())


def n_leaflets(mesh):
    return len(np.unique(mesh.face_organ[mesh.face_class == LEAF]))


def test_full_plant_has_six_branches():
    mesh = generate_soybean_plant(SoybeanParams(num_nodes=14.0), seed=3)
    assert n_branches(mesh) == 6
    # 14 main nodes plus 1-2 nodes per branch, three leaflets each
    trifoliates = n_leaflets(mesh) // 3
    assert 14 + 6 <= trifoliates <= 14 + 12
    main = mesh.select(mesh.face_class == STEM)
    assert np.count_nonzero(main.face_organ == 0) == 14 * len(PRISM_TRIS)


def test_single_node_plant():
    mesh = generate_soybean_plant(SoybeanParams(num_nodes=1.0), seed=3)
    assert n_branches(mesh) == 0
    assert n_leaflets(mesh) == 3


def test_fractional_top_node_scaled():
    prof = default_profile("soybean")
    mesh = generate_soybean_plant(SoybeanParams(num_nodes=8.5), prof, seed=11)
    leaf = mesh.face_class == LEAF
    # terminal leaflet of main node 9 is organ 3 * 8
    sel = mesh.select(leaf & (mesh.face_organ == 24))
    v = sel.vertices[np.unique(sel.triangles)]
    span = np.max(np.linalg.norm(v[:, None] - v[None], axis=-1))
    assert span == pytest.approx(0.5 * prof.table("leaf_length")[8], rel=1e-9)


def test_fractional_area_between_neighbours():
    areas = [generate_soybean_plant(SoybeanParams(num_nodes=k), seed=5).leaf_area() for k in (8.0, 8.5, 9.0)]
    assert areas[0] < areas[1] < areas[2]


def test_petiole_faces_present():
    mesh = generate_soybean_plant(SoybeanParams(), seed=0)
    assert np.any(mesh.face_class == PETIOLE)
    mesh.validate()


def test_branch_count_rule():
    assert [branch_count(n) for n in range(1, 16)] == [0] * 7 + [1, 2, 3, 4, 5, 6, 6, 6]


def test_wrong_params_type():
    with pytest.raises(DomainError):
        generate_soybean_plant(MaizeParams())


def test_noise_slots_independent_of_size():
    a = PlantNoise.draw(9, 4)
    b = PlantNoise.draw(9, 4)
    c = PlantNoise.draw(9, 5)
    np.testing.assert_array_equal(a.node_angle, b.node_angle)
    assert not np.array_equal(a.node_angle, c.node_angle)


def test_lower_nodes_unchanged_when_plant_grows():
    small = generate_soybean_plant(SoybeanParams(num_nodes=5.0), seed=2)
    big = generate_soybean_plant(SoybeanParams(num_nodes=7.0), seed=2)
    for organ in range(12):
        a = small.select((small.face_class == LEAF) & (small.face_organ == organ))
        b = big.select((big.face_class == LEAF) & (big.face_organ == organ))
        np.testing.assert_array_equal(a.vertices[a.triangles], b.vertices[b.triangles])


@pytest.mark.parametrize("polar", [30.0, 60.0, 90.0])
def test_leaf_inclination_follows_petiole_angle(polar):
    # blades span the petiole direction and a horizontal side vector, so
    # their inclination is the petiole elevation above the horizontal
    from canopyfit.morphology.profile import MorphologyProfile

    prof = default_profile("soybean")
    data = prof.to_dict()
    data["angle_noise_std"] = 0.0
    quiet = MorphologyProfile.from_dict(data)
    mult = polar / prof.table("petiole_angle")[0]
    mesh = generate_soybean_plant(SoybeanParams(petiole_angle_mult=mult, num_nodes=1.0), quiet, seed=1)
    leaf = mesh.select(mesh.face_class == LEAF)
    tri = leaf.vertices[leaf.triangles]
    n = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    n /= np.linalg.norm(n, axis=1, keepdims=True)
    incl = np.degrees(np.arccos(np.abs(n[:, 2])))
    np.testing.assert_allclose(incl, 90.0 - polar, atol=1e-6)


def test_default_profile_stays_below_camera():
    # a downward camera at 1 m must see the top of every in-bound plant beyond the 0.1 m near cutoff
    lo, hi = param_bounds("soybean").T
    tops = [generate_soybean_plant(SoybeanParams(*corner), seed=s).vertices[:, 2].max()
            for corner in itertools.product(*zip(lo, hi)) for s in range(3)]
    assert max(tops) < 0.9
