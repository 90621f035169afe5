import numpy as np
import pytest
from hypothesis import given, strategies as st

from gsplab.grid import (InvalidGridError, LatentPoint, SliderGrid,
                         make_slider_grid)


class TestMakeSliderGrid:
    def test_default_grid_positions(self, grid32):
        pos = grid32.positions()
        assert pos[0] == -0.24
        assert pos[-1] == 0.38
        assert np.allclose(np.diff(pos), 0.02, atol=1e-12)
        assert len(pos) == 32

    def test_endpoint_only_grid(self):
        grid = make_slider_grid(0.0, 1.0, 2)
        assert list(grid.positions()) == [0.0, 1.0]

    def test_index_12_is_zero(self, grid32):
        assert abs(grid32.position(12)) < 1e-15

    def test_rejects_nonfinite(self):
        with pytest.raises(InvalidGridError):
            make_slider_grid(float("nan"), 1.0, 8)
        with pytest.raises(InvalidGridError):
            make_slider_grid(0.0, float("inf"), 8)

    def test_rejects_reversed_bounds(self):
        with pytest.raises(InvalidGridError):
            make_slider_grid(1.0, 0.0, 8)
        with pytest.raises(InvalidGridError):
            make_slider_grid(1.0, 1.0, 8)

    def test_rejects_single_position(self):
        with pytest.raises(InvalidGridError):
            make_slider_grid(0.0, 1.0, 1)

    def test_position_out_of_range(self, grid32):
        with pytest.raises(IndexError):
            grid32.position(32)
        with pytest.raises(IndexError):
            grid32.position(-1)


@given(lo=st.floats(-100, 99, allow_nan=False),
       width=st.floats(0.01, 100),
       n=st.integers(2, 64))
def test_grid_round_trip_identity(lo, width, n):
    grid = make_slider_grid(lo, lo + width, n)
    for i in range(n):
        assert grid.nearest_index(grid.position(i)) == i


@given(lo=st.floats(-100, 99, allow_nan=False),
       width=st.floats(0.01, 100),
       n=st.integers(2, 64))
def test_grid_strictly_increasing_constant_step(lo, width, n):
    grid = make_slider_grid(lo, lo + width, n)
    pos = grid.positions()
    steps = np.diff(pos)
    assert np.all(steps > 0)
    assert np.all(np.abs(steps - grid.step) <= 1e-12 * max(1.0, width))


class TestLatentPoint:
    def test_weights_in_bounds(self, grid32):
        p = LatentPoint((0, 31, 12, 5, 20))
        w = p.weights(grid32)
        assert np.all(w >= grid32.lo) and np.all(w <= grid32.hi)
        assert w[0] == -0.24 and w[1] == 0.38

    def test_weights_reject_bad_index(self, grid32):
        with pytest.raises(IndexError):
            LatentPoint((0, 99)).weights(grid32)

    def test_with_index_changes_one_dim(self):
        p = LatentPoint((1, 2, 3))
        q = p.with_index(1, 9)
        assert q.indices == (1, 9, 3)
        assert p.indices == (1, 2, 3)

    def test_origin_on_default_grid(self, grid32):
        p = LatentPoint.origin(grid32, 10)
        assert p.indices == (12,) * 10
        assert np.allclose(p.weights(grid32), 0.0)

    def test_origin_requires_zero_on_grid(self):
        grid = make_slider_grid(0.1, 1.1, 3)
        with pytest.raises(InvalidGridError):
            LatentPoint.origin(grid, 2)
