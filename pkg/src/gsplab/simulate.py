"""Closed-loop simulation: synthetic participants drive the experiment
state machine exactly as live participants would, on a logical clock."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .agents import (AgentPolicy, EmotionTarget, agent_choose,
                     conditional_slice_probs, rating_agent)
from .config import ExperimentConfig
from .events import EventLog
from .experiment import Experiment, derive_rng

TRIAL_POOL = 25
RATER_POOL = 80


@dataclass
class SimulationResult:
    experiment: Experiment
    reason: str
    full_chains: int
    n_events: int
    n_stimuli_rendered: int = 0

    def summary(self) -> dict:
        return {
            "reason": self.reason,
            "full_chains": self.full_chains,
            "n_chains": len(self.experiment.state.chains),
            "n_events": self.n_events,
            "n_validation_stimuli": len(self.experiment.state.validation),
            "n_ratings": sum(len(v) for v in
                             self.experiment.state.ratings.values()),
            "n_stimuli_rendered": self.n_stimuli_rendered,
        }


def run_simulation(config: ExperimentConfig,
                   targets: dict[str, EmotionTarget],
                   policy: AgentPolicy,
                   log_path=None,
                   cache=None,
                   rating_sigma: float = 0.25,
                   with_validation: bool = True) -> SimulationResult:
    """Drive an experiment to termination (and optionally through the
    rating phase) with simulated agents. Deterministic given the config
    seed; identical runs produce byte-identical event logs.

    When ``cache`` is a StimulusCache, every iteration's 32-stimulus
    slider batch is rendered through it, as the live service would.
    """
    exp = Experiment(config, EventLog(log_path), started_at=0.0)
    grid = exp.state.grid
    seed = config.seed
    pool = [f"sim-{i:03d}" for i in range(TRIAL_POOL)]
    for p in pool:
        exp.register_participant(p)

    t = 0.0
    step = config.sim_seconds_per_response
    p_idx = 0
    rendered_batches: set[tuple[int, int]] = set()
    while True:
        reason = exp.check_termination(t)
        if reason is not None:
            exp.terminate(t, reason)
            break
        assignment = None
        for _ in range(len(pool)):
            participant = pool[p_idx % len(pool)]
            p_idx += 1
            assignment = exp.assign_trial(participant, t)
            if assignment is not None:
                break
        if assignment is None:
            exp.terminate(t, "manual")
            break
        chain = exp.state.chains[assignment.chain_id]
        if cache is not None:
            key = (assignment.chain_id, assignment.iteration)
            if key not in rendered_batches:
                from .synth.cache import render_slider_batch
                render_slider_batch(chain, grid, cache)
                rendered_batches.add(key)
        target = targets[chain.spec.emotion]
        probs = conditional_slice_probs(
            target, chain.point.weights(grid), assignment.free_dimension, grid)
        rng = derive_rng(seed, "agent", assignment.trial_id)
        choice = agent_choose(policy, probs, rng)
        exp.record_response(assignment.trial_id, choice, t)
        t += step

    full = len(exp.state.full_chain_ids)
    if with_validation and full > 0:
        _run_rating_phase(exp, targets, rating_sigma, t)

    return SimulationResult(
        experiment=exp, reason=exp.state.terminated, full_chains=full,
        n_events=len(exp.log.events),
        n_stimuli_rendered=(cache.render_count if cache is not None else 0))


def _run_rating_phase(exp: Experiment, targets: dict[str, EmotionTarget],
                      rating_sigma: float, t: float) -> None:
    exp.build_validation_set(t)
    grid = exp.state.grid
    by_id = {d.item_id: d for d in exp.state.validation}
    raters = [f"rater-{i:03d}" for i in range(RATER_POOL)]
    for p in raters:
        exp.register_participant(p)
    idle_streak = 0
    r_idx = 0
    while idle_streak < len(raters):
        participant = raters[r_idx % len(raters)]
        r_idx += 1
        ra = exp.next_rating_trial(participant, t)
        if ra is None:
            idle_streak += 1
            continue
        idle_streak = 0
        desc = by_id[ra.item_id]
        weights = np.array([grid.position(i) for i in desc.indices])
        rating = rating_agent(targets[ra.probed_emotion], weights,
                              rating_sigma)
        exp.record_rating(ra.rating_id, rating, t)
        t += 1.0
