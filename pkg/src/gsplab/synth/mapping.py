"""Linear map from latent slider weights to prosody controls.

The map is ``params = baseline + M @ weights`` with M shipped as a
versioned data file, then clamped to physically sane ranges. Keeping M
as data (with a recorded checksum) lets alternate mappings be swapped
without touching code.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, astuple
from importlib import resources

import numpy as np

from ..grid import LatentPoint, SliderGrid

PARAM_ORDER = ("f0_mean", "f0_slope", "rate", "intensity_slope",
               "jitter_depth", "shimmer_depth", "vibrato_rate", "vibrato_depth")


class ShapeError(ValueError):
    pass


@dataclass(frozen=True)
class ProsodyParams:
    f0_mean: float          # Hz
    f0_slope: float         # semitones / s
    rate: float             # duration divisor, 1.0 = nominal
    intensity_slope: float  # dB / s
    jitter_depth: float     # fractional period perturbation
    shimmer_depth: float    # fractional amplitude perturbation
    vibrato_rate: float     # Hz
    vibrato_depth: float    # semitones

    def vector(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)


def clamp_params(p: ProsodyParams) -> ProsodyParams:
    return ProsodyParams(
        f0_mean=float(np.clip(p.f0_mean, 60.0, 600.0)),
        f0_slope=float(p.f0_slope),
        rate=float(np.clip(p.rate, 0.5, 2.0)),
        intensity_slope=float(p.intensity_slope),
        jitter_depth=max(0.0, float(p.jitter_depth)),
        shimmer_depth=max(0.0, float(p.shimmer_depth)),
        vibrato_rate=max(0.0, float(p.vibrato_rate)),
        vibrato_depth=max(0.0, float(p.vibrato_depth)),
    )


class ProsodyMap:
    """Versioned baseline + matrix, loaded from package data by default."""

    def __init__(self, baseline: ProsodyParams, matrix: np.ndarray,
                 version: str, checksum: str):
        if matrix.shape[0] != len(PARAM_ORDER):
            raise ShapeError(f"matrix must have {len(PARAM_ORDER)} rows")
        self.baseline = baseline
        self.matrix = matrix
        self.version = version
        self.checksum = checksum

    @property
    def ndim(self) -> int:
        return self.matrix.shape[1]

    @staticmethod
    def load(version: str = "v1") -> "ProsodyMap":
        text = (resources.files("gsplab.data") /
                f"mapping_matrix_{version}.json").read_text()
        raw = json.loads(text)
        if tuple(raw["rows"]) != PARAM_ORDER:
            raise ShapeError("mapping file row order does not match ProsodyParams")
        baseline = ProsodyParams(**raw["baseline"])
        matrix = np.asarray(raw["matrix"], dtype=float)
        checksum = hashlib.sha256(text.encode("utf-8")).hexdigest()
        return ProsodyMap(baseline, matrix, raw["version"], checksum)

    def map_weights(self, weights: np.ndarray) -> ProsodyParams:
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (self.ndim,):
            raise ShapeError(
                f"expected {self.ndim} weights, got shape {weights.shape}")
        delta = self.matrix @ weights
        raw = ProsodyParams(*(self.baseline.vector() + delta))
        return clamp_params(raw)

    def map_point(self, point: LatentPoint, grid: SliderGrid) -> ProsodyParams:
        return self.map_weights(point.weights(grid))

    def f0_dimension(self) -> int:
        """Dimension with the largest positive mean-F0 coefficient."""
        row = self.matrix[PARAM_ORDER.index("f0_mean")]
        return int(np.argmax(row))


def map_latent_to_prosody(point: LatentPoint, grid: SliderGrid,
                          prosody_map: ProsodyMap | None = None) -> ProsodyParams:
    pm = prosody_map if prosody_map is not None else ProsodyMap.load()
    return pm.map_point(point, grid)
