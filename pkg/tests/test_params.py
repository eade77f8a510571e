import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from canopyfit.errors import DomainError
from canopyfit.morphology.params import (
    MaizeParams,
    SoybeanParams,
    clamp_params,
    param_bounds,
    param_names,
    params_from_vector,
)


def test_soybean_bounds_table():
    b = param_bounds("soybean")
    np.testing.assert_array_equal(b, [[0.5, 1.5], [0.5, 2.0], [0.5, 4.0], [0.5, 2.0], [1.0, 14.0]])


def test_maize_bounds_table():
    b = param_bounds("maize")
    np.testing.assert_array_equal(b, [[0.8, 1.2], [-4.0, 4.0], [0.8, 1.2], [1.0, 18.0]])


def test_clamp_soybean_low_leaf():
    p = clamp_params([0.0, 1.0, 1.0, 1.0, 7.0], "soybean")
    np.testing.assert_array_equal(p.to_vector(), [0.5, 1.0, 1.0, 1.0, 7.0])


def test_clamp_maize_shift():
    p = clamp_params([1.0, 9.0, 1.0, 18.0], "maize")
    np.testing.assert_array_equal(p.to_vector(), [1.0, 4.0, 1.0, 18.0])


def test_clamp_in_range_unchanged():
    v = [1.2, 0.7, 3.1, 1.9, 9.25]
    np.testing.assert_array_equal(clamp_params(v, "soybean").to_vector(), v)


def test_clamp_wrong_dimension():
    with pytest.raises(DomainError):
        clamp_params([1.0, 1.0, 1.0, 1.0], "soybean")


def test_out_of_range_names_field():
    with pytest.raises(DomainError, match="petiole_angle_mult"):
        SoybeanParams(petiole_angle_mult=4.5)
    with pytest.raises(DomainError, match="num_nodes"):
        MaizeParams(num_nodes=19.0)


def test_unknown_species():
    with pytest.raises(DomainError):
        param_names("tomato")


def test_vector_round_trip():
    p = SoybeanParams(1.1, 0.9, 2.0, 1.5, 10.5)
    assert params_from_vector("soybean", p.to_vector()) == p


@given(st.lists(st.floats(-100, 100), min_size=5, max_size=5))
def test_clamp_always_within_bounds(raw):
    v = clamp_params(raw, "soybean").to_vector()
    b = param_bounds("soybean")
    assert np.all(v >= b[:, 0]) and np.all(v <= b[:, 1])
