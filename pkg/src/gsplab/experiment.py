"""Deterministic state machine for slider-search experiments.

All mutations happen by appending an event and folding it into the
state; replaying the log from scratch reproduces the live state
byte-for-byte. Randomness (slider initialization, random validation
points) is derived statelessly from the experiment seed plus a context
key, so replay never has to consume a generator.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .config import ExperimentConfig
from .events import Event, EventLog
from .grid import LatentPoint, SliderGrid


class AuthError(ValueError):
    pass


class ExperimentClosedError(RuntimeError):
    pass


class DuplicateError(ValueError):
    pass


class ExpiredTrialError(ValueError):
    pass


class StateError(RuntimeError):
    pass


class ArityError(ValueError):
    pass


class EmptyExperimentError(RuntimeError):
    pass


class PhaseError(RuntimeError):
    pass


class RatingRangeError(ValueError):
    pass


def derive_rng(seed: int, *context) -> np.random.Generator:
    """Stateless per-decision generator keyed by (seed, context)."""
    blob = json.dumps([seed, *context], sort_keys=True).encode("utf-8")
    digest = hashlib.sha256(blob).digest()
    words = np.frombuffer(digest[:16], dtype=np.uint32)
    return np.random.default_rng(np.random.SeedSequence(words.tolist()))


def stimulus_id(indices: tuple[int, ...], sentence_id: str,
                version: str = "builtin-v1") -> str:
    """Content address of a rendered stimulus."""
    blob = json.dumps([list(indices), sentence_id, version]).encode("utf-8")
    return hashlib.sha1(blob).hexdigest()[:16]


@dataclass
class ChainSpec:
    chain_id: int
    emotion: str
    sentence_id: str
    n_iterations: int
    participants_per_iteration: int


@dataclass
class ChainState:
    spec: ChainSpec
    point: LatentPoint
    iteration: int = 0
    status: str = "active"          # active | complete | incomplete
    history: list = field(default_factory=list)  # (iteration, indices)

    @property
    def free_dimension(self) -> int:
        return self.iteration % self.point.ndim

    @property
    def full(self) -> bool:
        return self.status == "complete"


@dataclass
class TrialAssignment:
    trial_id: str
    participant_id: str
    chain_id: int
    iteration: int
    free_dimension: int
    initial_slider_index: int
    issued_at: float
    expires_at: float
    answered: bool = False


@dataclass
class RatingAssignment:
    rating_id: str
    participant_id: str
    item_id: str
    stimulus_id: str
    probed_emotion: str
    answered: bool = False


@dataclass
class StimulusDescriptor:
    """One validation item. ``item_id`` is unique per descriptor;
    ``stimulus_id`` is the content address (shared when two items render
    byte-identical audio)."""

    item_id: str
    stimulus_id: str
    kind: str                       # trajectory | random | transfer
    indices: tuple[int, ...]
    sentence_id: str
    intended_emotion: str
    chain_id: int | None = None
    iteration: int | None = None

    def to_dict(self) -> dict:
        return {
            "item_id": self.item_id,
            "stimulus_id": self.stimulus_id, "kind": self.kind,
            "indices": list(self.indices), "sentence_id": self.sentence_id,
            "intended_emotion": self.intended_emotion,
            "chain_id": self.chain_id, "iteration": self.iteration,
        }

    @staticmethod
    def from_dict(d: dict) -> "StimulusDescriptor":
        return StimulusDescriptor(
            d["item_id"], d["stimulus_id"], d["kind"], tuple(d["indices"]),
            d["sentence_id"], d["intended_emotion"], d.get("chain_id"),
            d.get("iteration"))


def aggregate_iteration(responses: list[int]) -> int:
    """Exact median of an odd-length list of grid indices."""
    if len(responses) % 2 == 0 or not responses:
        raise ArityError(f"need an odd number of responses, got {len(responses)}")
    return int(sorted(responses)[len(responses) // 2])


class ExperimentState:
    """Pure fold target: applies events, raises on protocol violations."""

    def __init__(self):
        self.config: ExperimentConfig | None = None
        self.grid: SliderGrid | None = None
        self.started_at: float = 0.0
        self.chains: dict[int, ChainState] = {}
        self.assignments: dict[str, TrialAssignment] = {}
        # (chain_id, iteration) -> list of (participant_id, chosen_index)
        self.responses: dict[tuple[int, int], list[tuple[str, int]]] = {}
        self.aggregated: set[tuple[int, int]] = set()
        self.terminated: str | None = None
        self.full_chain_ids: list[int] = []
        self.validation: list[StimulusDescriptor] = []
        self.rating_assignments: dict[str, RatingAssignment] = {}
        # (item_id, emotion) -> list of (participant_id, rating)
        self.ratings: dict[tuple[str, str], list[tuple[str, int]]] = {}
        # scheduling indexes, rebuilt by the fold
        self.open_by_slot: dict[tuple[int, int], list[str]] = {}
        self.pair_counts: dict[tuple[str, str], int] = {}
        self.pairs_by_participant: dict[str, set[tuple[str, str]]] = {}

    # ---- event fold -----------------------------------------------------

    def apply(self, ev: Event) -> None:
        getattr(self, f"_on_{ev.type}")(ev)

    def _on_ExperimentInitialized(self, ev: Event) -> None:
        from .config import config_from_dict
        self.config = config_from_dict(ev.payload["config"])
        self.grid = self.config.make_grid()
        self.started_at = ev.timestamp
        origin = LatentPoint.origin(self.grid, self.config.dimensions)
        pairs = [(e, s) for e in self.config.emotions for s in self.config.sentences]
        rep = self.config.n_chains // len(pairs)
        for cid in range(self.config.n_chains):
            emotion, sentence = pairs[cid % len(pairs)]
            spec = ChainSpec(cid, emotion, sentence, self.config.n_iterations,
                             self.config.participants_per_iteration)
            chain = ChainState(spec, origin)
            chain.history.append((0, origin.indices))
            self.chains[cid] = chain
        assert rep * len(pairs) == self.config.n_chains

    def _on_TrialAssigned(self, ev: Event) -> None:
        p = ev.payload
        a = TrialAssignment(p["trial_id"], p["participant"], p["chain_id"],
                            p["iteration"], p["free_dimension"],
                            p["initial_slider_index"], ev.timestamp,
                            p["expires_at"])
        self.assignments[a.trial_id] = a
        self.open_by_slot.setdefault((a.chain_id, a.iteration),
                                     []).append(a.trial_id)

    def _on_ResponseRecorded(self, ev: Event) -> None:
        p = ev.payload
        a = self.assignments[p["trial_id"]]
        a.answered = True
        key = (a.chain_id, a.iteration)
        slot = self.open_by_slot.get(key, [])
        if a.trial_id in slot:
            slot.remove(a.trial_id)
        self.responses.setdefault(key, []).append(
            (a.participant_id, p["chosen_index"]))

    def _on_IterationAggregated(self, ev: Event) -> None:
        key = (ev.payload["chain_id"], ev.payload["iteration"])
        if key in self.aggregated:
            raise StateError(f"iteration {key} aggregated twice")
        self.aggregated.add(key)

    def _on_ChainAdvanced(self, ev: Event) -> None:
        chain = self.chains[ev.payload["chain_id"]]
        if chain.status != "active":
            raise StateError(f"chain {chain.spec.chain_id} is {chain.status}")
        chain.point = chain.point.with_index(
            chain.free_dimension, ev.payload["aggregated_index"])
        chain.iteration += 1
        chain.history.append((chain.iteration, chain.point.indices))

    def _on_ChainCompleted(self, ev: Event) -> None:
        self.chains[ev.payload["chain_id"]].status = "complete"

    def _on_ExperimentTerminated(self, ev: Event) -> None:
        self.terminated = ev.payload["reason"]
        self.full_chain_ids = list(ev.payload["full_chains"])
        for chain in self.chains.values():
            if chain.status == "active":
                chain.status = "incomplete"

    def _on_ValidationSetBuilt(self, ev: Event) -> None:
        self.validation = [StimulusDescriptor.from_dict(d)
                           for d in ev.payload["stimuli"]]
        for desc in self.validation:
            for emotion in self.config.emotions:
                pair = (desc.item_id, emotion)
                self.ratings.setdefault(pair, [])
                self.pair_counts.setdefault(pair, 0)

    def _on_RatingAssigned(self, ev: Event) -> None:
        p = ev.payload
        self.rating_assignments[p["rating_id"]] = RatingAssignment(
            p["rating_id"], p["participant"], p["item_id"], p["stimulus_id"],
            p["probed_emotion"])
        pair = (p["item_id"], p["probed_emotion"])
        self.pair_counts[pair] += 1
        self.pairs_by_participant.setdefault(p["participant"], set()).add(pair)

    def _on_RatingRecorded(self, ev: Event) -> None:
        p = ev.payload
        ra = self.rating_assignments[p["rating_id"]]
        ra.answered = True
        self.ratings[(ra.item_id, ra.probed_emotion)].append(
            (ra.participant_id, p["rating"]))

    # ---- queries --------------------------------------------------------

    def accepted_count(self, chain_id: int, iteration: int) -> int:
        return len(self.responses.get((chain_id, iteration), []))

    def responders(self, chain_id: int, iteration: int) -> set[str]:
        return {p for p, _ in self.responses.get((chain_id, iteration), [])}

    def outstanding(self, chain_id: int, iteration: int, now: float) -> list[TrialAssignment]:
        slot = self.open_by_slot.get((chain_id, iteration), [])
        return [a for a in (self.assignments[t] for t in slot)
                if not a.answered and a.expires_at > now]

    def digest(self) -> str:
        """Canonical hash of the folded state, for replay equality checks."""
        blob = {
            "chains": {cid: [c.status, c.iteration, list(c.point.indices),
                             [[i, list(p)] for i, p in c.history]]
                       for cid, c in sorted(self.chains.items())},
            "responses": {f"{c}:{i}": v for (c, i), v in sorted(self.responses.items())},
            "assignments": sorted(
                (a.trial_id, a.participant_id, a.chain_id, a.iteration,
                 a.initial_slider_index, a.answered)
                for a in self.assignments.values()),
            "terminated": self.terminated,
            "full": self.full_chain_ids,
            "validation": [d.to_dict() for d in self.validation],
            "ratings": {f"{s}:{e}": v for (s, e), v in sorted(self.ratings.items())},
        }
        return hashlib.sha256(
            json.dumps(blob, sort_keys=True).encode("utf-8")).hexdigest()


def replay(events: list[Event]) -> ExperimentState:
    """Left-fold a verified event list into a state."""
    state = ExperimentState()
    for ev in events:
        state.apply(ev)
    return state


class Experiment:
    """Live driver: decides commands, appends events, folds them.

    Single-writer by construction; wrap calls in a lock when sharing
    across threads (the HTTP service does).
    """

    def __init__(self, config: ExperimentConfig, log: EventLog | None = None,
                 started_at: float = 0.0):
        self.log = log if log is not None else EventLog()
        self.state = ExperimentState()
        self.participants: dict[str, bool] = {}   # token -> prescreened
        if self.log.events:
            for ev in self.log.events:
                self.state.apply(ev)
        else:
            self._emit(started_at, "ExperimentInitialized",
                       {"config": config.to_dict()})

    # ---- plumbing -------------------------------------------------------

    def _emit(self, now: float, type_: str, payload: dict) -> Event:
        ev = self.log.append(now, type_, payload)
        self.state.apply(ev)
        return ev

    @property
    def config(self) -> ExperimentConfig:
        return self.state.config

    @property
    def seed(self) -> int:
        return self.config.seed

    def register_participant(self, token: str, prescreened: bool = True) -> None:
        self.participants[token] = prescreened

    def _require_participant(self, participant: str) -> None:
        if not self.participants.get(participant, False):
            raise AuthError(f"unknown or unscreened participant {participant!r}")

    # ---- trial phase ----------------------------------------------------

    def assign_trial(self, participant: str, now: float) -> TrialAssignment | None:
        self._require_participant(participant)
        if self.state.terminated is not None:
            raise ExperimentClosedError(self.state.terminated)
        st = self.state
        ppi = self.config.participants_per_iteration
        candidates = []
        for cid, chain in st.chains.items():
            if chain.status != "active":
                continue
            it = chain.iteration
            if participant in st.responders(cid, it):
                continue
            outstanding = st.outstanding(cid, it, now)
            if any(a.participant_id == participant for a in outstanding):
                continue
            if st.accepted_count(cid, it) + len(outstanding) >= ppi:
                continue
            candidates.append((len(outstanding), cid))
        if not candidates:
            return None
        _, cid = min(candidates)
        chain = st.chains[cid]
        rng = derive_rng(self.seed, "slider", cid, chain.iteration, participant,
                         self.log.next_seq)
        init = int(rng.integers(0, self.config.grid_n))
        trial_id = f"t{self.log.next_seq}"
        expires = now + self.config.trial_timeout_minutes * 60.0
        ev = self._emit(now, "TrialAssigned", {
            "trial_id": trial_id, "participant": participant, "chain_id": cid,
            "iteration": chain.iteration, "free_dimension": chain.free_dimension,
            "initial_slider_index": init, "expires_at": expires,
        })
        return self.state.assignments[trial_id]

    def record_response(self, trial_id: str, chosen_index: int, now: float) -> None:
        st = self.state
        a = st.assignments.get(trial_id)
        if a is None:
            raise StateError(f"unknown trial {trial_id!r}")
        if a.answered:
            raise DuplicateError(f"trial {trial_id} already answered")
        if now > a.expires_at:
            raise ExpiredTrialError(f"trial {trial_id} expired")
        if not 0 <= chosen_index < self.config.grid_n:
            raise ValueError(f"slider index {chosen_index} outside grid")
        chain = st.chains[a.chain_id]
        if chain.status != "active" or chain.iteration != a.iteration:
            raise ExpiredTrialError(f"trial {trial_id} targets a stale iteration")
        self._emit(now, "ResponseRecorded",
                   {"trial_id": trial_id, "chosen_index": int(chosen_index)})
        key = (a.chain_id, a.iteration)
        ppi = self.config.participants_per_iteration
        if st.accepted_count(*key) == ppi:
            indices = [i for _, i in st.responses[key]]
            median = aggregate_iteration(indices)
            self._emit(now, "IterationAggregated", {
                "chain_id": a.chain_id, "iteration": a.iteration,
                "responses": indices, "aggregated_index": median})
            self._emit(now, "ChainAdvanced", {
                "chain_id": a.chain_id, "aggregated_index": median})
            if chain.iteration >= chain.spec.n_iterations:
                self._emit(now, "ChainCompleted", {"chain_id": a.chain_id})

    # ---- termination ----------------------------------------------------

    def check_termination(self, now: float) -> str | None:
        """Returns the termination reason, or None while running."""
        if self.state.terminated is not None:
            return self.state.terminated
        if all(c.status == "complete" for c in self.state.chains.values()):
            return "all-complete"
        deadline = self.state.started_at + self.config.duration_hours * 3600.0
        if now >= deadline:
            return "deadline"
        return None

    def terminate(self, now: float, reason: str | None = None) -> str:
        if self.state.terminated is not None:
            return self.state.terminated
        reason = reason or self.check_termination(now) or "manual"
        full = [cid for cid, c in sorted(self.state.chains.items())
                if c.status == "complete"]
        self._emit(now, "ExperimentTerminated",
                   {"reason": reason, "full_chains": full})
        return reason

    # ---- validation phase -----------------------------------------------

    def build_validation_set(self, now: float) -> list[StimulusDescriptor]:
        st = self.state
        if st.terminated is None:
            raise PhaseError("experiment still running")
        if st.validation:
            return st.validation
        full = [st.chains[cid] for cid in st.full_chain_ids]
        if not full:
            raise EmptyExperimentError("no full chains to validate")
        cfg = self.config
        emotions = list(cfg.emotions)
        descriptors: list[StimulusDescriptor] = []

        def item(kind, indices, sentence, emotion, chain_id=None, iteration=None):
            iid = f"v{len(descriptors):04d}"
            descriptors.append(StimulusDescriptor(
                iid, stimulus_id(indices, sentence), kind, tuple(indices),
                sentence, emotion, chain_id, iteration))

        for chain in full:
            for it, indices in chain.history:
                item("trajectory", indices, chain.spec.sentence_id,
                     chain.spec.emotion, chain.spec.chain_id, it)
        rng = derive_rng(self.seed, "validation-random")
        for i in range(cfg.n_random):
            indices = tuple(int(k) for k in rng.integers(0, cfg.grid_n,
                                                         size=cfg.dimensions))
            sentence = cfg.sentences[int(rng.integers(0, len(cfg.sentences)))]
            # random points have no target; cycle a pseudo-intended emotion
            # so the contrast statistic stays balanced
            item("random", indices, sentence, emotions[i % len(emotions)])
        for chain in full:
            for novel in cfg.novel_sentences:
                item("transfer", chain.point.indices, novel,
                     chain.spec.emotion, chain.spec.chain_id)
        self._emit(now, "ValidationSetBuilt",
                   {"stimuli": [d.to_dict() for d in descriptors]})
        return self.state.validation

    # ---- rating phase ---------------------------------------------------

    def _rating_pairs(self) -> list[tuple[str, str]]:
        if not hasattr(self, "_pairs_cache") or \
                len(self._pairs_cache) != len(self.state.validation) * len(self.config.emotions):
            self._pairs_cache = [(d.item_id, e) for d in self.state.validation
                                 for e in self.config.emotions]
            self._scan_pos = 0
        return self._pairs_cache

    def next_rating_trial(self, participant: str, now: float) -> RatingAssignment | None:
        """Serve the least-rated (item, emotion) pair this participant has
        not rated yet. The circular scan keeps round-robin scheduling O(1)
        amortized while preserving fewest-first order."""
        self._require_participant(participant)
        st = self.state
        if not st.validation:
            raise PhaseError("validation set not built")
        target = self.config.rating_target
        pairs = self._rating_pairs()
        mine = st.pairs_by_participant.get(participant, set())
        min_count = min((c for c in st.pair_counts.values() if c < target),
                        default=None)
        if min_count is None:
            return None
        best = None
        n = len(pairs)
        for off in range(n):
            pair = pairs[(self._scan_pos + off) % n]
            count = st.pair_counts[pair]
            if count >= target or pair in mine:
                continue
            if best is None or count < best[0]:
                best = (count, pair, off)
            if count == min_count:
                break
        if best is None:
            return None
        _, (iid, emotion), off = best
        self._scan_pos = (self._scan_pos + off + 1) % n
        rating_id = f"r{self.log.next_seq}"
        self._emit(now, "RatingAssigned", {
            "rating_id": rating_id, "participant": participant,
            "item_id": iid, "stimulus_id": self.item(iid).stimulus_id,
            "probed_emotion": emotion})
        return self.state.rating_assignments[rating_id]

    def item(self, item_id: str) -> StimulusDescriptor:
        if not hasattr(self, "_item_index") or \
                len(self._item_index) != len(self.state.validation):
            self._item_index = {d.item_id: d for d in self.state.validation}
        return self._item_index[item_id]

    def record_rating(self, rating_id: str, rating: int, now: float) -> None:
        st = self.state
        ra = st.rating_assignments.get(rating_id)
        if ra is None:
            raise StateError(f"unknown rating assignment {rating_id!r}")
        if ra.answered:
            raise DuplicateError(f"rating {rating_id} already recorded")
        if rating not in (1, 2, 3, 4):
            raise RatingRangeError(f"rating must be 1..4, got {rating}")
        entries = st.ratings[(ra.item_id, ra.probed_emotion)]
        if any(p == ra.participant_id for p, _ in entries):
            raise DuplicateError(
                f"{ra.participant_id} already rated "
                f"({ra.item_id}, {ra.probed_emotion})")
        self._emit(now, "RatingRecorded",
                   {"rating_id": rating_id, "rating": int(rating)})
