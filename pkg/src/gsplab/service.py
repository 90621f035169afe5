"""HTTP facade over the experiment driver.

All mutations funnel through one lock (the driver is single-writer);
reads take the same lock briefly and return plain JSON snapshots.
Stimuli are served from the content-addressed cache, so the 32 slider
positions of a trial are prefetchable by the console.
"""
from __future__ import annotations

import json
import secrets
import time
from pathlib import Path
import threading

from fastapi import FastAPI, Response
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel

from .events import EventLog
from .experiment import (AuthError, DuplicateError, EmptyExperimentError,
                         Experiment, ExpiredTrialError, ExperimentClosedError,
                         PhaseError, RatingRangeError, StateError)
from .config import ExperimentConfig
from .synth import StimulusCache, get_sentence, render_slider_batch
from .grid import LatentPoint

SNAPSHOT_INTERVAL = 500


class ResponseBody(BaseModel):
    trial_id: str
    slider_index: int


class RatingBody(BaseModel):
    rating_id: str
    rating: int


class ExperimentService:
    """Shared state behind the HTTP app; safe for concurrent sessions."""

    def __init__(self, experiment: Experiment, cache: StimulusCache,
                 clock=time.time, snapshot_interval: int = SNAPSHOT_INTERVAL):
        self.exp = experiment
        self.cache = cache
        self.clock = clock
        self.snapshot_interval = snapshot_interval
        self.lock = threading.Lock()
        self._last_snapshot_seq = len(experiment.log.events)

    # ---- helpers --------------------------------------------------------

    def _maybe_snapshot(self) -> None:
        log = self.exp.log
        if (log.path is None or self.snapshot_interval <= 0 or
                len(log.events) - self._last_snapshot_seq <
                self.snapshot_interval):
            return
        self._last_snapshot_seq = len(log.events)
        snap = {"seq": len(log.events), "digest": self.exp.state.digest()}
        path = Path(str(log.path) + ".snapshot.json")
        path.write_text(json.dumps(snap, sort_keys=True) + "\n")

    def _trial_payload(self, a) -> dict:
        chain = self.exp.state.chains[a.chain_id]
        ids = render_slider_batch(chain, self.exp.state.grid, self.cache)
        return {
            "trial_id": a.trial_id,
            "emotion": chain.spec.emotion,
            "chain_id": a.chain_id,
            "iteration": a.iteration,
            "free_dimension": a.free_dimension,
            "initial_slider_index": a.initial_slider_index,
            "expires_at": a.expires_at,
            "stimulus_urls": [f"/api/stimulus/{sid}.wav" for sid in ids],
        }


def create_app(service: ExperimentService) -> FastAPI:
    app = FastAPI(title="gsplab", docs_url=None, redoc_url=None)
    svc = service
    app.state.service = svc

    def fail(status: int, exc: Exception) -> Response:
        return Response(json.dumps({"error": type(exc).__name__,
                                    "detail": str(exc)}),
                        status_code=status, media_type="application/json")

    def guarded(fn):
        with svc.lock:
            try:
                out = fn()
            except AuthError as e:
                return fail(403, e)
            except DuplicateError as e:
                return fail(409, e)
            except (ExpiredTrialError,) as e:
                return fail(410, e)
            except ExperimentClosedError as e:
                return fail(409, e)
            except (PhaseError, StateError, EmptyExperimentError) as e:
                return fail(409, e)
            except (RatingRangeError, ValueError) as e:
                return fail(400, e)
            svc._maybe_snapshot()
            return out

    @app.get("/api/session")
    def session():
        def run():
            token = f"p-{secrets.token_hex(8)}"
            # headphone prescreen is a console stub; the flag is recorded
            # here so a stricter screen can gate assignment later
            svc.exp.register_participant(token, prescreened=True)
            return {"participant_token": token}
        return guarded(run)

    @app.get("/api/trial")
    def trial(participant: str):
        def run():
            a = svc.exp.assign_trial(participant, svc.clock())
            if a is None:
                return Response(status_code=204)
            return svc._trial_payload(a)
        return guarded(run)

    @app.post("/api/response")
    def response(body: ResponseBody):
        def run():
            svc.exp.record_response(body.trial_id, body.slider_index,
                                    svc.clock())
            return {"ok": True}
        return guarded(run)

    @app.get("/api/stimulus/{sid}.wav")
    def stimulus(sid: str):
        if not svc.cache.has(sid):
            return fail(404, KeyError(f"unknown stimulus {sid}"))
        return Response(svc.cache.get_wav(sid), media_type="audio/wav")

    @app.get("/api/rating-trial")
    def rating_trial(participant: str):
        def run():
            ra = svc.exp.next_rating_trial(participant, svc.clock())
            if ra is None:
                return Response(status_code=204)
            desc = svc.exp.item(ra.item_id)
            svc.cache.ensure(LatentPoint(desc.indices),
                             get_sentence(desc.sentence_id),
                             svc.exp.state.grid)
            return {
                "rating_id": ra.rating_id,
                "stimulus_url": f"/api/stimulus/{desc.stimulus_id}.wav",
                "probed_emotion": ra.probed_emotion,
                "scale": 4,
            }
        return guarded(run)

    @app.post("/api/rating")
    def rating(body: RatingBody):
        def run():
            svc.exp.record_rating(body.rating_id, body.rating, svc.clock())
            return {"ok": True}
        return guarded(run)

    @app.get("/api/admin/chains")
    def chains():
        with svc.lock:
            touched: dict[int, float] = {}
            for ev in svc.exp.log.events:
                cid = ev.payload.get("chain_id")
                if cid is not None:
                    touched[cid] = ev.timestamp
            ppi = svc.exp.config.participants_per_iteration
            return [{
                "chain_id": cid,
                "emotion": c.spec.emotion,
                "sentence_id": c.spec.sentence_id,
                "iteration": c.iteration,
                "n_iterations": c.spec.n_iterations,
                "responses":
                    svc.exp.state.accepted_count(cid, c.iteration),
                "responses_target": ppi,
                "free_dimension":
                    c.free_dimension if c.status == "active" else None,
                "status": c.status,
                "last_update": touched.get(cid),
            } for cid, c in sorted(svc.exp.state.chains.items())]

    @app.post("/api/admin/terminate")
    def terminate():
        def run():
            reason = svc.exp.terminate(svc.clock(), "manual")
            built = 0
            if svc.exp.state.full_chain_ids and not svc.exp.state.validation:
                built = len(svc.exp.build_validation_set(svc.clock()))
            return {"reason": reason, "validation_items":
                    built or len(svc.exp.state.validation)}
        return guarded(run)

    @app.get("/api/admin/export")
    def export():
        with svc.lock:
            return PlainTextResponse(svc.exp.log.dump())

    return app


def build_service(config: ExperimentConfig, log_path: str | Path,
                  cache_dir: str | Path, clock=time.time) -> ExperimentService:
    """Open (or resume) an experiment log and wire up the service."""
    log_path = Path(log_path)
    log_path.parent.mkdir(parents=True, exist_ok=True)
    log = EventLog(log_path)
    exp = Experiment(config, log, started_at=clock())
    cache = StimulusCache(cache_dir)
    return ExperimentService(exp, cache, clock=clock)
