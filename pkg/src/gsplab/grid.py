"""Discrete slider grids and latent points.

Every controllable dimension of the synthesizer shares one grid of
equally spaced slider positions; latent points are stored as integer
grid indices so that medians and equality tests are exact.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

STEP_TOL = 1e-12


class InvalidGridError(ValueError):
    pass


@dataclass(frozen=True)
class SliderGrid:
    """Equally spaced slider positions on [lo, hi]."""

    lo: float
    hi: float
    n_positions: int

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / (self.n_positions - 1)

    def position(self, index: int) -> float:
        if not 0 <= index < self.n_positions:
            raise IndexError(f"grid index {index} out of range [0, {self.n_positions})")
        if index == self.n_positions - 1:
            return self.hi  # exact endpoint
        return self.lo + index * self.step

    def positions(self) -> np.ndarray:
        pos = self.lo + np.arange(self.n_positions) * self.step
        pos[-1] = self.hi
        return pos

    def nearest_index(self, weight: float) -> int:
        idx = int(round((weight - self.lo) / self.step))
        return min(max(idx, 0), self.n_positions - 1)


def make_slider_grid(lo: float, hi: float, n: int) -> SliderGrid:
    """Build a grid with exact endpoints and constant step."""
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise InvalidGridError("grid bounds must be finite")
    if lo >= hi:
        raise InvalidGridError(f"grid requires lo < hi, got [{lo}, {hi}]")
    if n < 2:
        raise InvalidGridError(f"grid requires at least 2 positions, got {n}")
    grid = SliderGrid(float(lo), float(hi), int(n))
    steps = np.diff(grid.positions())
    assert np.all(np.abs(steps - grid.step) <= STEP_TOL * max(1.0, abs(hi - lo)))
    return grid


@dataclass(frozen=True)
class LatentPoint:
    """A point in the latent hypercube, one grid index per dimension."""

    indices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))

    @property
    def ndim(self) -> int:
        return len(self.indices)

    def weights(self, grid: SliderGrid) -> np.ndarray:
        for i in self.indices:
            if not 0 <= i < grid.n_positions:
                raise IndexError(f"index {i} outside grid")
        return np.array([grid.position(i) for i in self.indices])

    def with_index(self, dim: int, index: int) -> "LatentPoint":
        new = list(self.indices)
        new[dim] = int(index)
        return LatentPoint(tuple(new))

    @staticmethod
    def origin(grid: SliderGrid, ndim: int) -> "LatentPoint":
        """The all-zero-weight point; requires weight 0 to be on the grid."""
        idx = grid.nearest_index(0.0)
        if abs(grid.position(idx)) > 1e-9:
            raise InvalidGridError("weight 0.0 is not a grid position")
        return LatentPoint((idx,) * ndim)
