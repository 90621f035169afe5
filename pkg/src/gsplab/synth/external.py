"""Wire-protocol client for an external neural renderer.

POST {url}/render with {"weights": [...], "text": ..., "sample_rate": 22050};
the response body is WAVE audio, optionally with an X-Style-Embedding
header of comma-separated reals. A 503 is retried once after 1 s.
"""
from __future__ import annotations

import threading
import time

import httpx
import numpy as np

from .render import AudioBuffer, decode_wav

MAX_IN_FLIGHT = 4


class RenderBackendError(RuntimeError):
    pass


class ExternalRenderer:
    def __init__(self, url: str, dimensions: int, timeout_s: float = 30.0,
                 max_in_flight: int = MAX_IN_FLIGHT):
        self.url = url.rstrip("/")
        self.dimensions = dimensions
        self.timeout_s = timeout_s
        self._sem = threading.Semaphore(max_in_flight)
        self._cache: dict[tuple, tuple[AudioBuffer, np.ndarray | None]] = {}
        self._lock = threading.Lock()

    def render(self, weights, text: str) -> tuple[AudioBuffer, np.ndarray | None]:
        weights = [float(w) for w in weights]
        if len(weights) != self.dimensions:
            raise RenderBackendError(
                f"expected {self.dimensions} weights, got {len(weights)}")
        key = (tuple(weights), text)
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        body = {"weights": weights, "text": text, "sample_rate": 22050}
        with self._sem:
            resp = self._post(body)
        try:
            audio = decode_wav(resp.content)
        except Exception as e:
            raise RenderBackendError(f"non-audio response: {e}")
        if not np.all(np.isfinite(audio.samples)):
            raise RenderBackendError("non-finite samples in response")
        embedding = None
        header = resp.headers.get("X-Style-Embedding")
        if header:
            embedding = np.array([float(v) for v in header.split(",")])
        with self._lock:
            self._cache[key] = (audio, embedding)
        return audio, embedding

    def _post(self, body: dict) -> httpx.Response:
        for attempt in (0, 1):
            try:
                resp = httpx.post(f"{self.url}/render", json=body,
                                  timeout=self.timeout_s)
            except httpx.TimeoutException:
                raise RenderBackendError(f"timeout after {self.timeout_s}s")
            if resp.status_code == 503:
                if attempt == 0:
                    time.sleep(1.0)
                    continue
                raise RenderBackendError("backend busy (503) after retry")
            if resp.status_code != 200:
                raise RenderBackendError(f"backend returned {resp.status_code}")
            return resp
        raise AssertionError("unreachable")
