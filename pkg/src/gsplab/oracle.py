"""Brute-force certification of the coordinate-wise sampling process.

Builds the exact systematic-scan transition matrix over the full
discrete state space (small instances only) and checks its stationary
distribution against the target density evaluated state by state.
"""
from __future__ import annotations

import itertools

import numpy as np

from .agents import EmotionTarget, conditional_slice_probs
from .grid import SliderGrid

MAX_STATES = 256


class StateSpaceTooLargeError(ValueError):
    pass


def enumerate_states(grid: SliderGrid, ndim: int) -> list[tuple[int, ...]]:
    n_states = grid.n_positions ** ndim
    if n_states > MAX_STATES:
        raise StateSpaceTooLargeError(
            f"{n_states} states exceeds the {MAX_STATES}-state oracle limit")
    return list(itertools.product(range(grid.n_positions), repeat=ndim))


def target_on_grid(target: EmotionTarget, grid: SliderGrid,
                   ndim: int) -> np.ndarray:
    """Normalized target restricted to the grid, by direct enumeration."""
    states = enumerate_states(grid, ndim)
    logs = np.array([
        target.log_density(np.array([grid.position(i) for i in s]))
        for s in states])
    logs -= logs.max()
    p = np.exp(logs)
    return p / p.sum()


def single_site_kernel(target: EmotionTarget, grid: SliderGrid, ndim: int,
                       dim: int) -> np.ndarray:
    """Transition matrix that resamples one coordinate from its conditional."""
    states = enumerate_states(grid, ndim)
    index = {s: i for i, s in enumerate(states)}
    n = len(states)
    T = np.zeros((n, n))
    for i, s in enumerate(states):
        weights = np.array([grid.position(k) for k in s])
        probs = conditional_slice_probs(target, weights, dim, grid)
        for k in range(grid.n_positions):
            dest = list(s)
            dest[dim] = k
            T[i, index[tuple(dest)]] += probs[k]
    return T


def scan_kernel(target: EmotionTarget, grid: SliderGrid, ndim: int) -> np.ndarray:
    """One full systematic sweep: update dimension 0, then 1, ..."""
    P = np.eye(grid.n_positions ** ndim)
    for dim in range(ndim):
        P = P @ single_site_kernel(target, grid, ndim, dim)
    return P


def stationary_distribution(P: np.ndarray, tol: float = 1e-13,
                            max_iter: int = 200_000) -> np.ndarray:
    v = np.full(P.shape[0], 1.0 / P.shape[0])
    for _ in range(max_iter):
        nxt = v @ P
        if np.abs(nxt - v).sum() < tol:
            return nxt / nxt.sum()
        v = nxt
    raise RuntimeError("power iteration did not converge")


def gibbs_oracle_stationary(target: EmotionTarget, grid: SliderGrid,
                            ndim: int) -> np.ndarray:
    """Stationary distribution of the systematic-scan kernel."""
    return stationary_distribution(scan_kernel(target, grid, ndim))


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(p - q).sum())
