import numpy as np
import pytest

from gsplab.agents import EmotionTarget, conditional_slice_probs
from gsplab.grid import make_slider_grid
from gsplab.oracle import (StateSpaceTooLargeError, enumerate_states,
                           gibbs_oracle_stationary, scan_kernel,
                           single_site_kernel, stationary_distribution,
                           target_on_grid, total_variation)


def grid8():
    return make_slider_grid(-0.2, 0.2, 8)


class TestEnumeration:
    def test_state_count(self):
        assert len(enumerate_states(grid8(), 2)) == 64

    def test_too_large_rejected(self):
        with pytest.raises(StateSpaceTooLargeError):
            enumerate_states(grid8(), 3)
        with pytest.raises(StateSpaceTooLargeError):
            enumerate_states(make_slider_grid(0, 1, 32), 2)

    def test_target_on_grid_normalized(self):
        t = EmotionTarget("a", [0.0, 0.0], sigma=0.1)
        p = target_on_grid(t, grid8(), 2)
        assert abs(p.sum() - 1.0) < 1e-12
        assert np.all(p > 0)


class TestKernels:
    def test_kernel_rows_are_distributions(self):
        t = EmotionTarget("a", [0.0, 0.05],
                          covariance=[[0.01, 0.006], [0.006, 0.01]])
        for dim in (0, 1):
            T = single_site_kernel(t, grid8(), 2, dim)
            assert np.allclose(T.sum(axis=1), 1.0, atol=1e-12)
        P = scan_kernel(t, grid8(), 2)
        assert np.allclose(P.sum(axis=1), 1.0, atol=1e-12)

    def test_single_site_preserves_target(self):
        t = EmotionTarget("a", [0.0, 0.0],
                          covariance=[[0.01, 0.007], [0.007, 0.01]])
        pi = target_on_grid(t, grid8(), 2)
        for dim in (0, 1):
            T = single_site_kernel(t, grid8(), 2, dim)
            assert total_variation(pi @ T, pi) < 1e-12


class TestStationary:
    def test_one_dimensional_equals_slice_probs(self):
        g = grid8()
        t = EmotionTarget("a", [0.07], sigma=0.06)
        pi = gibbs_oracle_stationary(t, g, 1)
        direct = conditional_slice_probs(t, np.array([0.0]), 0, g)
        assert total_variation(pi, direct) < 1e-12

    def test_correlated_2d_matches_target(self):
        t = EmotionTarget("a", [0.05, -0.05],
                          covariance=[[0.01, 0.008], [0.008, 0.015]])
        pi = gibbs_oracle_stationary(t, grid8(), 2)
        ref = target_on_grid(t, grid8(), 2)
        assert total_variation(pi, ref) < 1e-10

    def test_independent_dims_factorize(self):
        g = grid8()
        t = EmotionTarget("a", [0.05, -0.1], sigma=0.07)
        pi = gibbs_oracle_stationary(t, g, 2).reshape(8, 8)
        m0 = pi.sum(axis=1)
        m1 = pi.sum(axis=0)
        assert np.max(np.abs(pi - np.outer(m0, m1))) < 1e-10

    def test_power_iteration_on_identity_like(self):
        P = np.array([[0.5, 0.5], [0.5, 0.5]])
        v = stationary_distribution(P)
        assert np.allclose(v, [0.5, 0.5], atol=1e-12)


def test_total_variation_basics():
    assert total_variation(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 1.0
    assert total_variation(np.array([0.5, 0.5]), np.array([0.5, 0.5])) == 0.0
