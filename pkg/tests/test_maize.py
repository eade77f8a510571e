import numpy as np
import pytest

from canopyfit.morphology.maize import LEAF_SEGMENTS, bend_angle, generate_maize_plant
from canopyfit.morphology.mesh import LEAF, STEM
from canopyfit.morphology.params import MaizeParams
from canopyfit.morphology.profile import default_profile


def test_full_plant_leaf_count():
    mesh = generate_maize_plant(MaizeParams(), seed=1)
    leaf = mesh.face_class == LEAF
    organs, counts = np.unique(mesh.face_organ[leaf], return_counts=True)
    assert len(organs) == 18
    assert np.all(counts == 2 * LEAF_SEGMENTS)


def test_single_node_stem_height():
    prof = default_profile("maize")
    mesh = generate_maize_plant(MaizeParams(num_nodes=1.0, internode_length_mult=1.1), prof, seed=0)
    stem = mesh.select(mesh.face_class == STEM)
    height = stem.vertices[np.unique(stem.triangles)][:, 2].max()
    assert height == pytest.approx(prof.table("internode_length")[0] * 1.1, rel=1e-12)
    assert len(np.unique(mesh.face_organ[mesh.face_class == LEAF])) == 1


def tip_heights(mesh):
    leaf = mesh.select(mesh.face_class == LEAF)
    out = []
    for organ in np.unique(leaf.face_organ):
        tris = leaf.triangles[leaf.face_organ == organ]
        # the last two ribbon vertices are the tip corners
        tip = leaf.vertices[np.unique(tris)[-2:]]
        out.append(tip[:, 2].mean())
    return np.array(out)


def test_shift_changes_tip_height():
    prof = default_profile("maize")
    c0, c1, c2 = prof.bend_poly
    more_bent = -4.0 if bend_angle(prof, 1 - 4.0) > bend_angle(prof, 1 + 4.0) else 4.0
    lo = generate_maize_plant(MaizeParams(leaf_order_shift=more_bent), prof, seed=4)
    hi = generate_maize_plant(MaizeParams(leaf_order_shift=-more_bent), prof, seed=4)
    assert tip_heights(lo).mean() < tip_heights(hi).mean()


def test_no_degenerate_leaf_triangles():
    mesh = generate_maize_plant(MaizeParams(num_nodes=17.3), seed=8)
    areas = mesh.face_areas()[mesh.face_class == LEAF]
    assert areas.min() > 0


def test_bend_polynomial_clipped():
    prof = default_profile("maize")
    b = bend_angle(prof, np.linspace(-10, 40, 101))
    assert b.min() >= 0 and b.max() <= 170
