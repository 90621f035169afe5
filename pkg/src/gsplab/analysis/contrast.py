"""Rating contrast: intended-emotion mean minus non-intended mean,
per iteration bin, with bootstrap confidence intervals."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

BOOTSTRAP_N = 1000
DEFAULT_BIN_EDGES = ((1, 4), (5, 8), (9, 12), (13, 16), (17, 20))


@dataclass(frozen=True)
class RatingRow:
    stimulus_id: str
    kind: str                       # trajectory | random | transfer
    intended_emotion: str
    iteration: int | None
    probed_emotion: str
    rating: int


@dataclass(frozen=True)
class BinResult:
    label: str
    n_ratings: int
    mean_intended: float | None
    mean_nonintended: float | None
    contrast: float | None
    ci_low: float | None
    ci_high: float | None


def _contrast_of(rows: list[RatingRow]) -> tuple[float, float] | None:
    intended = [r.rating for r in rows if r.probed_emotion == r.intended_emotion]
    non = [r.rating for r in rows if r.probed_emotion != r.intended_emotion]
    if not intended or not non:
        return None
    return float(np.mean(intended)), float(np.mean(non))


def _bin_labels(n_iterations: int):
    bins = [("0", lambda r: r.kind == "trajectory" and r.iteration == 0)]
    for lo, hi in DEFAULT_BIN_EDGES:
        if lo > n_iterations:
            break
        bins.append((f"{lo}-{hi}",
                     lambda r, lo=lo, hi=hi: r.kind == "trajectory"
                     and r.iteration is not None and lo <= r.iteration <= hi))
    bins.append(("transfer", lambda r: r.kind == "transfer"))
    bins.append(("random", lambda r: r.kind == "random"))
    return bins


def contrast_curve(rows: list[RatingRow], n_iterations: int = 20,
                   bootstrap_n: int = BOOTSTRAP_N,
                   seed: int = 0) -> list[BinResult]:
    """Per-bin contrast with percentile-bootstrap 95% intervals
    (resampling over stimuli). Empty bins are emitted as missing."""
    if not rows:
        raise ValueError("empty rating table")
    rng = np.random.default_rng(seed)
    results = []
    for label, pred in _bin_labels(n_iterations):
        sub = [r for r in rows if pred(r)]
        means = _contrast_of(sub)
        if means is None:
            results.append(BinResult(label, len(sub), None, None, None,
                                     None, None))
            continue
        mi, mn = means
        by_stim: dict[str, list[RatingRow]] = {}
        for r in sub:
            by_stim.setdefault(r.stimulus_id, []).append(r)
        stim_ids = sorted(by_stim)
        boots = []
        for _ in range(bootstrap_n):
            pick = rng.integers(0, len(stim_ids), size=len(stim_ids))
            sample = [r for i in pick for r in by_stim[stim_ids[i]]]
            m = _contrast_of(sample)
            if m is not None:
                boots.append(m[0] - m[1])
        if boots:
            lo, hi = np.percentile(boots, [2.5, 97.5])
        else:
            lo = hi = mi - mn
        results.append(BinResult(label, len(sub), mi, mn, mi - mn,
                                 float(lo), float(hi)))
    return results


def rating_rows_from_state(state) -> list[RatingRow]:
    """Flatten an ExperimentState's validation ratings into a table."""
    by_id = {d.item_id: d for d in state.validation}
    rows = []
    for (iid, emotion), entries in sorted(state.ratings.items()):
        desc = by_id.get(iid)
        if desc is None:
            continue
        for _, rating in entries:
            rows.append(RatingRow(iid, desc.kind, desc.intended_emotion,
                                  desc.iteration, emotion, rating))
    return rows
