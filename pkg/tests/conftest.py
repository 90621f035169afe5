import sys

import numpy as np
import pytest

from gsplab.agents import AgentPolicy, EmotionTarget, default_targets
from gsplab.config import config_from_dict
from gsplab.simulate import run_simulation


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion at the end of the run."""
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None) if mod else None
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok in results:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}: {name}")


@pytest.fixture(scope="session")
def default_config():
    return config_from_dict({})


@pytest.fixture(scope="session")
def tiny_config():
    """9 chains, 4 iterations: small enough for fast closed-loop runs."""
    return config_from_dict({"n_chains": 9, "n_iterations": 4,
                             "n_random": 6, "seed": 11})


@pytest.fixture(scope="session")
def tiny_sim(tiny_config):
    """One completed closed-loop run with ratings, shared across tests."""
    targets = default_targets(tiny_config)
    policy = AgentPolicy(mode="maximizer")
    return run_simulation(tiny_config, targets, policy)


@pytest.fixture
def grid32():
    from gsplab.grid import make_slider_grid
    return make_slider_grid(-0.24, 0.38, 32)


def pulse_train(freqs, sr=22050, duration=1.0, amp=1.0):
    """Synthetic ground-truth voice: one raised-cosine blip per glottal
    cycle, with instantaneous frequency given by freqs(t)."""
    n = int(duration * sr)
    x = np.zeros(n)
    width = 32.0 / sr            # blip length in seconds
    t = 0.0
    while True:
        f = freqs(t) if callable(freqs) else float(freqs)
        i0 = int(np.ceil(t * sr))
        i1 = i0 + 33
        if i1 >= n:
            break
        # raised cosine evaluated at fractional offsets, so pulse
        # spacing is not quantized to the sample grid
        tau = np.arange(i0, i1) / sr - t
        inside = tau < width
        x[i0:i1][inside] += amp * 0.5 * (
            1.0 - np.cos(2.0 * np.pi * tau[inside] / width))
        t += 1.0 / f
    return x
