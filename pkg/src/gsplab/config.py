"""Experiment configuration: JSON file with defaults and validation.

An empty file (or ``{}``) yields the full default design: 10 dimensions,
a 32-position grid on [-0.24, 0.38], 45 chains balanced over 3 emotions
and 3 sentences, 20 iterations of 5 participants each, a 48 hour budget,
18 random validation samples and 4 novel transfer sentences.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .grid import SliderGrid, make_slider_grid, InvalidGridError

DEFAULT_EMOTIONS = ("anger", "happiness", "sadness")
DEFAULT_SENTENCES = ("s1", "s2", "s3")
DEFAULT_NOVEL_SENTENCES = ("n1", "n2", "n3", "n4")

_KNOWN_KEYS = {
    "dimensions", "grid", "emotions", "sentences", "n_chains", "n_iterations",
    "participants_per_iteration", "duration_hours", "novel_sentences",
    "n_random", "seed", "renderer", "trial_timeout_minutes",
    "rating_target", "sim_seconds_per_response",
}


class ConfigError(ValueError):
    """Aggregated configuration problems, one message per line."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("\n".join(self.problems))


@dataclass(frozen=True)
class RendererConfig:
    kind: str = "builtin"          # builtin | external
    url: str | None = None
    timeout_s: float = 30.0


@dataclass(frozen=True)
class ExperimentConfig:
    dimensions: int = 10
    grid_lo: float = -0.24
    grid_hi: float = 0.38
    grid_n: int = 32
    emotions: tuple[str, ...] = DEFAULT_EMOTIONS
    sentences: tuple[str, ...] = DEFAULT_SENTENCES
    n_chains: int = 45
    n_iterations: int = 20
    participants_per_iteration: int = 5
    duration_hours: float = 48.0
    novel_sentences: tuple[str, ...] = DEFAULT_NOVEL_SENTENCES
    n_random: int = 18
    seed: int = 2024
    renderer: RendererConfig = field(default_factory=RendererConfig)
    trial_timeout_minutes: float = 10.0
    rating_target: int = 5
    # logical clock advance per simulated response; 30 s * 4500 responses
    # keeps a full default run inside the 48 h budget
    sim_seconds_per_response: float = 30.0

    def make_grid(self) -> SliderGrid:
        return make_slider_grid(self.grid_lo, self.grid_hi, self.grid_n)

    def to_dict(self) -> dict:
        """External config schema (the same shape config files use)."""
        return {
            "dimensions": self.dimensions,
            "grid": {"lo": self.grid_lo, "hi": self.grid_hi, "n": self.grid_n},
            "emotions": list(self.emotions),
            "sentences": list(self.sentences),
            "n_chains": self.n_chains,
            "n_iterations": self.n_iterations,
            "participants_per_iteration": self.participants_per_iteration,
            "duration_hours": self.duration_hours,
            "novel_sentences": list(self.novel_sentences),
            "n_random": self.n_random,
            "seed": self.seed,
            "renderer": {"kind": self.renderer.kind, "url": self.renderer.url,
                         "timeout_s": self.renderer.timeout_s},
            "trial_timeout_minutes": self.trial_timeout_minutes,
            "rating_target": self.rating_target,
            "sim_seconds_per_response": self.sim_seconds_per_response,
        }


def _check(cfg: ExperimentConfig) -> list[str]:
    problems = []
    try:
        cfg.make_grid()
    except InvalidGridError as e:
        problems.append(f"grid: {e}")
    if cfg.dimensions < 1:
        problems.append("dimensions: must be >= 1")
    if cfg.n_iterations < 1:
        problems.append("n_iterations: must be >= 1")
    if cfg.participants_per_iteration < 1 or cfg.participants_per_iteration % 2 == 0:
        problems.append(
            "participants_per_iteration: must be odd so the median is a grid value"
        )
    design = len(cfg.emotions) * len(cfg.sentences)
    if design == 0:
        problems.append("emotions/sentences: must be non-empty")
    elif cfg.n_chains % design != 0:
        problems.append(
            f"n_chains: {cfg.n_chains} not divisible by "
            f"{len(cfg.emotions)} emotions x {len(cfg.sentences)} sentences"
        )
    if cfg.duration_hours <= 0:
        problems.append("duration_hours: must be > 0")
    if cfg.n_random < 0:
        problems.append("n_random: must be >= 0")
    if cfg.renderer.kind not in ("builtin", "external"):
        problems.append(f"renderer.kind: unknown backend {cfg.renderer.kind!r}")
    if cfg.renderer.kind == "external" and not cfg.renderer.url:
        problems.append("renderer.url: required for the external backend")
    if cfg.rating_target < 1:
        problems.append("rating_target: must be >= 1")
    return problems


def config_from_dict(raw: dict) -> ExperimentConfig:
    """Normalize a raw mapping into a validated ExperimentConfig."""
    problems = [f"unknown key: {k}" for k in sorted(set(raw) - _KNOWN_KEYS)]
    grid = raw.get("grid", {})
    renderer_raw = raw.get("renderer", {})
    if isinstance(renderer_raw, str):
        renderer_raw = {"kind": renderer_raw}
    try:
        cfg = ExperimentConfig(
            dimensions=int(raw.get("dimensions", 10)),
            grid_lo=float(grid.get("lo", -0.24)),
            grid_hi=float(grid.get("hi", 0.38)),
            grid_n=int(grid.get("n", 32)),
            emotions=tuple(raw.get("emotions", DEFAULT_EMOTIONS)),
            sentences=tuple(raw.get("sentences", DEFAULT_SENTENCES)),
            n_chains=int(raw.get("n_chains", 45)),
            n_iterations=int(raw.get("n_iterations", 20)),
            participants_per_iteration=int(raw.get("participants_per_iteration", 5)),
            duration_hours=float(raw.get("duration_hours", 48.0)),
            novel_sentences=tuple(raw.get("novel_sentences", DEFAULT_NOVEL_SENTENCES)),
            n_random=int(raw.get("n_random", 18)),
            seed=int(raw.get("seed", 2024)),
            renderer=RendererConfig(
                kind=renderer_raw.get("kind", "builtin"),
                url=renderer_raw.get("url"),
                timeout_s=float(renderer_raw.get("timeout_s", 30.0)),
            ),
            trial_timeout_minutes=float(raw.get("trial_timeout_minutes", 10.0)),
            rating_target=int(raw.get("rating_target", 5)),
            sim_seconds_per_response=float(raw.get("sim_seconds_per_response", 30.0)),
        )
    except (TypeError, ValueError) as e:
        raise ConfigError(problems + [f"malformed value: {e}"])
    problems += _check(cfg)
    if problems:
        raise ConfigError(problems)
    return cfg


def apply_overrides(raw: dict, overrides: list[str]) -> dict:
    """Apply flat dotted-key overrides like ``grid.n=16`` to a raw mapping."""
    out = json.loads(json.dumps(raw))  # deep copy
    for ov in overrides:
        if "=" not in ov:
            raise ConfigError([f"override {ov!r} is not of the form key=value"])
        key, value = ov.split("=", 1)
        try:
            parsed = json.loads(value)
        except json.JSONDecodeError:
            parsed = value
        node = out
        parts = key.split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
        node[parts[-1]] = parsed
    return out


def load_config(path: str | Path, overrides: list[str] | None = None) -> ExperimentConfig:
    """Read a JSON config file; an empty file means all defaults."""
    text = Path(path).read_text().strip()
    raw = json.loads(text) if text else {}
    if not isinstance(raw, dict):
        raise ConfigError(["config root must be a JSON object"])
    if overrides:
        raw = apply_overrides(raw, overrides)
    return config_from_dict(raw)
