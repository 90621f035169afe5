"""Content-addressed stimulus cache and per-iteration batch rendering."""
from __future__ import annotations

import threading
from pathlib import Path

from ..experiment import ChainState, stimulus_id
from ..grid import LatentPoint, SliderGrid
from .mapping import ProsodyMap
from .render import AudioBuffer, decode_wav, encode_wav, render
from .sentences import SentenceScore, get_sentence


class BatchRenderError(RuntimeError):
    def __init__(self, failed: list[int], causes: list[Exception]):
        self.failed = failed
        self.causes = causes
        super().__init__(f"rendering failed for grid indices {failed}")


class StimulusCache:
    """Disk-backed cache keyed by content id; insert-if-absent is atomic."""

    def __init__(self, directory: str | Path,
                 prosody_map: ProsodyMap | None = None):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.map = prosody_map if prosody_map is not None else ProsodyMap.load()
        self._lock = threading.Lock()
        self.render_count = 0

    @property
    def version(self) -> str:
        return f"builtin-{self.map.version}"

    def key(self, point: LatentPoint, sentence_id: str) -> str:
        return stimulus_id(point.indices, sentence_id, self.version)

    def path(self, sid: str) -> Path:
        return self.dir / f"{sid}.wav"

    def has(self, sid: str) -> bool:
        return self.path(sid).exists()

    def get_wav(self, sid: str) -> bytes:
        return self.path(sid).read_bytes()

    def get_audio(self, sid: str) -> AudioBuffer:
        return decode_wav(self.get_wav(sid))

    def ensure(self, point: LatentPoint, sentence: SentenceScore | str,
               grid: SliderGrid) -> str:
        """Render if absent; returns the stimulus id either way."""
        if isinstance(sentence, str):
            sentence = get_sentence(sentence)
        sid = self.key(point, sentence.sentence_id)
        path = self.path(sid)
        if path.exists():
            return sid
        buf = render(point, sentence, grid, self.map)
        data = encode_wav(buf)
        with self._lock:
            if not path.exists():
                tmp = path.with_suffix(".tmp")
                tmp.write_bytes(data)
                tmp.replace(path)
                self.render_count += 1
        return sid


def render_slider_batch(chain: ChainState, grid: SliderGrid,
                        cache: StimulusCache) -> list[str]:
    """One stimulus per slider position of the chain's free dimension."""
    if chain.status != "active":
        raise RuntimeError(f"chain {chain.spec.chain_id} is {chain.status}")
    sentence = get_sentence(chain.spec.sentence_id)
    ids, failed, causes = [], [], []
    for k in range(grid.n_positions):
        point = chain.point.with_index(chain.free_dimension, k)
        try:
            ids.append(cache.ensure(point, sentence, grid))
        except Exception as e:   # backend failure: report which indices
            failed.append(k)
            causes.append(e)
    if failed:
        raise BatchRenderError(failed, causes)
    return ids
