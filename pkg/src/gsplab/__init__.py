"""Closed-loop slider-search experiment platform.

Collective coordinate-wise exploration of a speech synthesizer's latent
space: a deterministic sampler state machine, a built-in parametric
renderer, an event-sourced HTTP service, simulated participants with a
brute-force certification oracle, and the full measurement pipeline.
"""

__version__ = "0.1.0"
