"""Simulated participants: Gaussian emotion targets over the latent
space, slider-choice policies, and deterministic rating agents."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ExperimentConfig
from .grid import SliderGrid

PROB_NORM_TOL = 1e-12


class ConditioningError(ValueError):
    pass


@dataclass(frozen=True)
class EmotionTarget:
    """Gaussian utility over the latent weight space for one emotion."""

    emotion: str
    mu: np.ndarray                  # weight units, shape (D,)
    sigma: float = 0.1
    covariance: np.ndarray | None = None   # optional full D x D covariance

    def __post_init__(self):
        object.__setattr__(self, "mu", np.asarray(self.mu, dtype=float))
        if self.covariance is not None:
            cov = np.asarray(self.covariance, dtype=float)
            if not np.allclose(cov, cov.T):
                raise ConditioningError("covariance must be symmetric")
            if np.min(np.linalg.eigvalsh(cov)) <= 0:
                raise ConditioningError("covariance must be positive definite")
            object.__setattr__(self, "covariance", cov)
        if self.sigma <= 0:
            raise ConditioningError("sigma must be > 0")

    def precision(self) -> np.ndarray | None:
        if self.covariance is None:
            return None
        return np.linalg.inv(self.covariance)

    def log_density(self, x: np.ndarray) -> float:
        """Unnormalized Gaussian log density; brute-force route for oracles."""
        d = np.asarray(x, dtype=float) - self.mu
        if self.covariance is None:
            return float(-0.5 * d @ d / self.sigma ** 2)
        return float(-0.5 * d @ self.precision() @ d)


@dataclass(frozen=True)
class AgentPolicy:
    mode: str = "maximizer"         # maximizer | sampler
    temperature: float = 1.0
    lapse_rate: float = 0.0

    def __post_init__(self):
        if self.mode not in ("maximizer", "sampler"):
            raise ValueError(f"unknown policy mode {self.mode!r}")
        if self.temperature <= 0:
            raise ValueError("temperature must be > 0")
        if not 0 <= self.lapse_rate < 1:
            raise ValueError("lapse_rate must be in [0, 1)")


def conditional_slice_probs(target: EmotionTarget, point_weights: np.ndarray,
                            free_dim: int, grid: SliderGrid) -> np.ndarray:
    """Exact single-coordinate conditional of the Gaussian on the grid.

    p(k) is proportional to exp(-(x_k - m)^2 / (2 s^2)) with (m, s) the
    conditional mean and SD given the other coordinates of the point.
    """
    x = np.asarray(point_weights, dtype=float)
    if target.covariance is None:
        m = target.mu[free_dim]
        s = target.sigma
    else:
        prec = target.precision()
        ldd = prec[free_dim, free_dim]
        if ldd <= 0:
            raise ConditioningError("degenerate conditional precision")
        others = [j for j in range(len(x)) if j != free_dim]
        shift = prec[free_dim, others] @ (x[others] - target.mu[others])
        m = target.mu[free_dim] - shift / ldd
        s = 1.0 / np.sqrt(ldd)
    pos = grid.positions()
    logp = -0.5 * ((pos - m) / s) ** 2
    logp -= np.max(logp)
    p = np.exp(logp)
    p /= p.sum()
    assert abs(p.sum() - 1.0) < PROB_NORM_TOL
    return p


def agent_choose(policy: AgentPolicy, probs: np.ndarray,
                 rng: np.random.Generator) -> int:
    """Pick a slider index from conditional probabilities."""
    probs = np.asarray(probs, dtype=float)
    if policy.lapse_rate > 0 and rng.uniform() < policy.lapse_rate:
        return int(rng.integers(0, len(probs)))
    if policy.mode == "maximizer":
        return int(np.argmax(probs))   # argmax takes the lowest index on ties
    tempered = probs ** (1.0 / policy.temperature)
    tempered /= tempered.sum()
    return int(rng.choice(len(probs), p=tempered))


def rating_agent(target: EmotionTarget, point_weights: np.ndarray,
                 rating_sigma: float = 0.25) -> int:
    """Deterministic 1-4 rating from distance to the probed emotion's mode.

    s = exp(-||x - mu||^2 / (2 sigma_r^2)); rating = 1 + round(3 s),
    rounding half up.
    """
    d = np.asarray(point_weights, dtype=float) - target.mu
    s = np.exp(-float(d @ d) / (2.0 * rating_sigma ** 2))
    return 1 + int(np.floor(3.0 * s + 0.5))


def default_targets(config: ExperimentConfig) -> dict[str, EmotionTarget]:
    """One correlated Gaussian per emotion, coordinate-rotated so all
    targets share a norm and pairwise geometry.

    The strong equicorrelation makes coordinate-wise search converge
    gradually over the experiment's two sweeps instead of snapping to
    the mode in one pass.
    """
    D = config.dimensions
    grid = config.make_grid()
    base = np.array([0.38, 0.30, 0.22, 0.12, 0.02, -0.08, -0.16, -0.22,
                     -0.10, 0.06])
    if D != len(base):
        rng = np.random.default_rng(7)
        base = rng.uniform(grid.lo, grid.hi, size=D)
    # snap to grid so maximizer fixed points are exactly representable
    base = np.array([grid.position(grid.nearest_index(v)) for v in base])
    rho = 0.9
    var = 0.02 ** 2 * 40
    cov = var * ((1 - rho) * np.eye(D) + rho * np.ones((D, D)))
    targets = {}
    for i, emotion in enumerate(config.emotions):
        mu = np.roll(base, i * (D // max(1, len(config.emotions))))
        targets[emotion] = EmotionTarget(emotion, mu, covariance=cov)
    return targets


def load_scenario(path: str | Path, config: ExperimentConfig):
    """Scenario file: targets, policy and rating noise for simulations."""
    raw = json.loads(Path(path).read_text())
    targets = {}
    for emotion, spec in raw.get("targets", {}).items():
        targets[emotion] = EmotionTarget(
            emotion, np.asarray(spec["mu"], dtype=float),
            sigma=float(spec.get("sigma", 0.1)),
            covariance=(np.asarray(spec["covariance"], dtype=float)
                        if "covariance" in spec else None))
    if not targets:
        targets = default_targets(config)
    pol = raw.get("policy", {})
    policy = AgentPolicy(mode=pol.get("mode", "maximizer"),
                         temperature=float(pol.get("temperature", 1.0)),
                         lapse_rate=float(pol.get("lapse_rate", 0.0)))
    rating_sigma = float(raw.get("rating_sigma", 0.25))
    return targets, policy, rating_sigma
