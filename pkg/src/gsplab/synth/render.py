"""Deterministic parametric prosody synthesizer.

Source-filter synthesis: a glottal pulse train (Rosenberg-style pulse
evaluated at fractional sample offsets so periods are not quantized to
the sample grid) drives a cascade of vowel-class formant resonators.
Per-cycle jitter and shimmer noise is keyed by a content hash of the
(point, sentence) pair, so identical inputs are bit-identical across
runs and across cache instances.
"""
from __future__ import annotations

import hashlib
import io
import json
import wave
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from ..grid import LatentPoint, SliderGrid
from .mapping import ProsodyMap, ProsodyParams
from .sentences import SentenceScore

SAMPLE_RATE = 22050
PEAK = 0.89
EDGE_RAMP_S = 0.010
# unvoiced stop gap between syllables; lets cycle-level analysis treat
# each syllable as its own voiced span
GAP_S = 0.055

# (F1, F2, F3) center frequencies in Hz per vowel class
_FORMANTS = {
    "a": (800.0, 1150.0, 2900.0),
    "e": (400.0, 2000.0, 2800.0),
    "i": (280.0, 2250.0, 2900.0),
    "o": (450.0, 800.0, 2830.0),
    "u": (325.0, 700.0, 2700.0),
}
_BANDWIDTHS = (90.0, 110.0, 170.0)


@dataclass(frozen=True)
class AudioBuffer:
    samples: np.ndarray         # float64 mono in [-1, 1]
    sample_rate: int = SAMPLE_RATE

    def __post_init__(self):
        assert np.all(np.isfinite(self.samples))

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


def _rosenberg_pulse(tau: np.ndarray, period: float) -> np.ndarray:
    """Glottal flow pulse over one period; tau in [0, period)."""
    tp = 0.40 * period
    tn = 0.16 * period
    out = np.zeros_like(tau)
    opening = tau < tp
    out[opening] = 0.5 * (1.0 - np.cos(np.pi * tau[opening] / tp))
    closing = (tau >= tp) & (tau < tp + tn)
    out[closing] = np.cos(0.5 * np.pi * (tau[closing] - tp) / tn)
    return out


def _resonator_coeffs(freq: float, bw: float, sr: int):
    r = np.exp(-np.pi * bw / sr)
    theta = 2.0 * np.pi * freq / sr
    b1 = 2.0 * r * np.cos(theta)
    b2 = -r * r
    a0 = 1.0 - b1 - b2
    return a0, b1, b2


def _apply_formants(signal: np.ndarray, vowel: str, sr: int) -> np.ndarray:
    out = signal
    for freq, bw in zip(_FORMANTS[vowel], _BANDWIDTHS):
        a0, b1, b2 = _resonator_coeffs(freq, bw, sr)
        out = lfilter([a0], [1.0, -b1, -b2], out)
    return out


def _noise_rng(point: LatentPoint, sentence_id: str) -> np.random.Generator:
    blob = json.dumps([list(point.indices), sentence_id]).encode("utf-8")
    digest = hashlib.sha256(blob).digest()
    words = np.frombuffer(digest[:16], dtype=np.uint32)
    return np.random.default_rng(np.random.SeedSequence(words.tolist()))


def render_params(params: ProsodyParams, sentence: SentenceScore,
                  rng: np.random.Generator, sr: int = SAMPLE_RATE) -> AudioBuffer:
    """Synthesize one utterance from explicit prosody controls."""
    pieces = []
    t_global = 0.0
    for syl in sentence.syllables:
        dur = syl.base_duration / params.rate
        n = int(round(dur * sr))
        syl_f0 = params.f0_mean * 2.0 ** (syl.base_pitch_offset / 12.0)
        source = np.zeros(n)
        t0 = 0.0  # seconds within syllable
        while True:
            t_abs = t_global + t0
            semis = (params.f0_slope * t_abs +
                     params.vibrato_depth *
                     np.sin(2.0 * np.pi * params.vibrato_rate * t_abs))
            f0 = syl_f0 * 2.0 ** (semis / 12.0)
            jit = params.jitter_depth * rng.uniform(-1.0, 1.0)
            period = (1.0 / f0) * (1.0 + jit)
            if t0 + period > dur:
                break
            amp = 1.0 + params.shimmer_depth * rng.uniform(-1.0, 1.0)
            amp = max(amp, 0.05)
            i0 = int(np.ceil(t0 * sr))
            i1 = min(int(np.ceil((t0 + period) * sr)), n)
            if i1 > i0:
                tau = np.arange(i0, i1) / sr - t0
                source[i0:i1] += amp * _rosenberg_pulse(tau, period)
            t0 += period
        voiced = _apply_formants(source, syl.vowel_class, sr)
        # 10 ms raised-cosine onset/offset
        ramp = min(int(EDGE_RAMP_S * sr), n // 2)
        if ramp > 0:
            win = 0.5 * (1.0 - np.cos(np.pi * np.arange(ramp) / ramp))
            voiced[:ramp] *= win
            voiced[-ramp:] *= win[::-1]
        pieces.append(voiced)
        t_global += dur
        if syl is not sentence.syllables[-1]:
            gap = int(round(GAP_S / params.rate * sr))
            pieces.append(np.zeros(gap))
            t_global += gap / sr
    audio = np.concatenate(pieces)
    t = np.arange(len(audio)) / sr
    audio = audio * 10.0 ** (params.intensity_slope * t / 20.0)
    peak = np.max(np.abs(audio))
    if peak > 0:
        audio = audio * (PEAK / peak)
    return AudioBuffer(audio, sr)


def render(point: LatentPoint, sentence: SentenceScore, grid: SliderGrid,
           prosody_map: ProsodyMap | None = None) -> AudioBuffer:
    """Render a latent point: pure function of (point, sentence, map version)."""
    pm = prosody_map if prosody_map is not None else ProsodyMap.load()
    params = pm.map_point(point, grid)
    rng = _noise_rng(point, sentence.sentence_id)
    return render_params(params, sentence, rng)


def encode_wav(buf: AudioBuffer) -> bytes:
    """RIFF/WAVE, PCM 16-bit little-endian, mono."""
    pcm = np.clip(buf.samples, -1.0, 1.0)
    ints = (pcm * 32767.0).astype("<i2")
    bio = io.BytesIO()
    with wave.open(bio, "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(buf.sample_rate)
        wf.writeframes(ints.tobytes())
    return bio.getvalue()


def decode_wav(data: bytes) -> AudioBuffer:
    with wave.open(io.BytesIO(data), "rb") as wf:
        if wf.getnchannels() != 1 or wf.getsampwidth() != 2:
            raise ValueError("expected mono 16-bit PCM")
        sr = wf.getframerate()
        raw = wf.readframes(wf.getnframes())
    samples = np.frombuffer(raw, dtype="<i2").astype(float) / 32767.0
    return AudioBuffer(samples, sr)
