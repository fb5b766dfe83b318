import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tunebench.params import ParamBox, ParamPoint, grid_array, grid_points, sample_uniform


def test_grid_two_by_two():
    box = ParamBox((0, 0), (1, 1), 2)
    assert grid_points(box) == [ParamPoint(0, 0), ParamPoint(0, 1), ParamPoint(1, 0), ParamPoint(1, 1)]


def test_default_grid_endpoints():
    pts = grid_points(ParamBox())
    assert len(pts) == 10_000
    assert pts[0] == ParamPoint(0.001, 0.001)
    assert pts[-1] == ParamPoint(1.0, 1.0)


def test_grid_midpoint():
    assert grid_points(ParamBox((0, 0), (1, 1), 3))[4] == ParamPoint(0.5, 0.5)


@pytest.mark.parametrize("kwargs", [
    dict(lo=(1, 0), hi=(0, 1)),
    dict(lo=(0, 0), hi=(1, 0)),
    dict(grid_n=1),
    dict(lo=(0,), hi=(1,)),
])
def test_invalid_box(kwargs):
    with pytest.raises(ValueError):
        ParamBox(**kwargs)


def test_nonfinite_point_rejected():
    with pytest.raises(ValueError):
        ParamPoint(float("nan"), 0.5)


boxes = st.builds(
    lambda lo0, w0, lo1, w1, n: ParamBox((lo0, lo1), (lo0 + w0, lo1 + w1), n),
    st.floats(-5, 5), st.floats(0.01, 5), st.floats(-5, 5), st.floats(0.01, 5), st.integers(2, 40),
)


@settings(max_examples=50, deadline=None)
@given(boxes)
def test_grid_spacing_and_bounds(box):
    g = grid_array(box)
    assert len(g) == box.grid_n ** 2
    for d in (0, 1):
        vals = np.unique(g[:, d])
        np.testing.assert_allclose(np.diff(vals), (box.hi[d] - box.lo[d]) / (box.grid_n - 1), rtol=0, atol=1e-12)
    assert all(box.contains(p) for p in grid_points(box))


@settings(max_examples=30, deadline=None)
@given(boxes, st.integers(0, 2**32), st.integers(1, 50))
def test_samples_on_grid_and_reproducible(box, seed, count):
    a = sample_uniform(box, seed, count)
    assert a == sample_uniform(box, seed, count)
    assert len(a) == count
    grid = set(grid_points(box))
    assert all(p in grid for p in a)


def test_single_sample_on_grid():
    box = ParamBox()
    (p,) = sample_uniform(box, 7, 1)
    assert p in set(grid_points(box))


def test_different_seeds_differ():
    box = ParamBox()
    assert sample_uniform(box, 1, 20) != sample_uniform(box, 2, 20)


def test_first_sample_independent_of_count():
    box = ParamBox()
    assert sample_uniform(box, 5, 1)[0] == sample_uniform(box, 5, 20)[0]


def test_count_must_be_positive():
    with pytest.raises(ValueError):
        sample_uniform(ParamBox(), 0, 0)
