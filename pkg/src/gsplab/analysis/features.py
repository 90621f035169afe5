"""Acoustic feature extraction: duration, F0 statistics, jitter, shimmer.

Pitch is tracked with normalized autocorrelation (40 ms frames, 10 ms
hop, 75-500 Hz search, voicing threshold 0.45). Cycle-level measures
come from pulse marks found inside voiced spans, with parabolic
refinement so periods are not quantized to the sample grid.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..synth.render import AudioBuffer

FRAME_S = 0.040
HOP_S = 0.010
FMIN = 75.0
FMAX = 500.0
VOICING_THRESHOLD = 0.45
TRIM_DB = -40.0
MIN_AUDIO_S = 0.200


@dataclass(frozen=True)
class FeatureVector:
    duration: float                 # s, after -40 dB trim
    f0_mean: float | None           # Hz; None when fully unvoiced
    f0_slope: float | None          # semitones / s
    f0_range: float | None          # semitones (SD of centered track)
    jitter_ddp: float | None        # fraction
    shimmer_local: float | None     # fraction

    FIELDS = ("duration", "f0_mean", "f0_slope", "f0_range",
              "jitter_ddp", "shimmer_local")

    def as_array(self) -> np.ndarray:
        vals = [self.duration, self.f0_mean, self.f0_slope, self.f0_range,
                self.jitter_ddp, self.shimmer_local]
        return np.array([np.nan if v is None else v for v in vals])


def trimmed_duration(x: np.ndarray, sr: int) -> float:
    peak = np.max(np.abs(x))
    if peak == 0:
        return 0.0
    above = np.flatnonzero(np.abs(x) >= peak * 10.0 ** (TRIM_DB / 20.0))
    return float((above[-1] - above[0] + 1) / sr)


def _normalized_acf(frame: np.ndarray) -> np.ndarray:
    """r[l] = sum x_t x_{t+l} / sqrt(E0(l) E1(l)), FFT-accelerated."""
    n = len(frame)
    nfft = 1
    while nfft < 2 * n:
        nfft *= 2
    spec = np.fft.rfft(frame, nfft)
    raw = np.fft.irfft(spec * np.conj(spec), nfft)[:n]
    sq = frame * frame
    csum = np.concatenate([[0.0], np.cumsum(sq)])
    lags = np.arange(n)
    e_head = csum[n - lags] - csum[0]      # energy of x[0 : n-l]
    e_tail = csum[n] - csum[lags]          # energy of x[l : n]
    denom = np.sqrt(np.maximum(e_head * e_tail, 1e-30))
    return raw / denom


def _pick_period_lag(r: np.ndarray, lag_min: int, lag_max: int) -> float | None:
    """Smallest local-max lag close to the global best; parabolic refine."""
    seg = r[lag_min:lag_max + 1]
    best = float(np.max(seg))
    if best < VOICING_THRESHOLD:
        return None
    floor = max(VOICING_THRESHOLD, 0.9 * best)
    for i in range(1, len(seg) - 1):
        if seg[i] >= floor and seg[i] >= seg[i - 1] and seg[i] >= seg[i + 1]:
            a, b, c = seg[i - 1], seg[i], seg[i + 1]
            denom = a - 2 * b + c
            shift = 0.0 if denom == 0 else 0.5 * (a - c) / denom
            return lag_min + i + float(np.clip(shift, -0.5, 0.5))
    return None


def track_f0(x: np.ndarray, sr: int):
    """Frame times and F0 in Hz (NaN where unvoiced)."""
    frame_n = int(round(FRAME_S * sr))
    hop_n = int(round(HOP_S * sr))
    lag_min = int(np.floor(sr / FMAX))
    lag_max = int(np.ceil(sr / FMIN))
    times, f0s = [], []
    for start in range(0, len(x) - frame_n + 1, hop_n):
        frame = x[start:start + frame_n]
        times.append((start + frame_n / 2) / sr)
        if np.max(np.abs(frame)) < 1e-6:
            f0s.append(np.nan)
            continue
        r = _normalized_acf(frame - np.mean(frame))
        lag = _pick_period_lag(r, lag_min, min(lag_max, frame_n - 2))
        f0s.append(sr / lag if lag is not None else np.nan)
    return np.array(times), np.array(f0s)


def _voiced_spans(f0s: np.ndarray) -> list[tuple[int, int]]:
    spans, start = [], None
    for i, v in enumerate(~np.isnan(f0s)):
        if v and start is None:
            start = i
        elif not v and start is not None:
            spans.append((start, i))
            start = None
    if start is not None:
        spans.append((start, len(f0s)))
    return spans


def _refine_peak(x: np.ndarray, i: int) -> tuple[float, float]:
    """Sub-sample peak position and height via parabolic interpolation."""
    if 0 < i < len(x) - 1:
        a, b, c = x[i - 1], x[i], x[i + 1]
        denom = a - 2 * b + c
        if denom != 0:
            shift = float(np.clip(0.5 * (a - c) / denom, -0.5, 0.5))
            height = b - 0.25 * (a - c) * shift
            return i + shift, float(height)
    return float(i), float(x[i])


def pulse_marks(x: np.ndarray, sr: int, times: np.ndarray,
                f0s: np.ndarray) -> list[np.ndarray]:
    """Per-voiced-span glottal pulse positions (fractional samples)."""
    frame_n = int(round(FRAME_S * sr))
    hop_n = int(round(HOP_S * sr))
    all_marks = []
    for fi, fj in _voiced_spans(f0s):
        s0 = fi * hop_n + frame_n // 2
        s1 = min((fj - 1) * hop_n + frame_n // 2, len(x))
        span = x[s0:s1]
        period = sr / np.nanmedian(f0s[fi:fj])
        if len(span) < 3 * period:
            continue
        seed = int(np.argmax(np.abs(span)))
        sign = 1.0 if span[seed] >= 0 else -1.0
        wave = sign * span
        half = max(2, int(0.3 * period))
        floor = 0.25 * wave[seed]   # stop marching into ramps and gaps

        def local_f0(pos: float) -> float:
            t = (s0 + pos) / sr
            idx = int(np.clip(np.searchsorted(times, t), fi, fj - 1))
            return f0s[idx] if not np.isnan(f0s[idx]) else sr / period

        marks = []
        pos, _ = _refine_peak(wave, seed)
        marks.append(pos)
        cur = pos
        while True:   # forward march
            nxt = cur + sr / local_f0(cur)
            lo, hi = int(nxt - half), int(nxt + half) + 1
            if hi >= len(wave) - 1:
                break
            i = lo + int(np.argmax(wave[lo:hi]))
            if wave[i] < floor:
                break
            cur, _ = _refine_peak(wave, i)
            marks.append(cur)
        cur = pos
        while True:   # backward march
            prv = cur - sr / local_f0(cur)
            lo, hi = int(prv - half), int(prv + half) + 1
            if lo <= 1:
                break
            i = lo + int(np.argmax(wave[lo:hi]))
            if wave[i] < floor:
                break
            cur, _ = _refine_peak(wave, i)
            marks.insert(0, cur)
        if len(marks) > 4:
            # drop edge cycles: onset/offset ramps distort them
            all_marks.append(np.array(marks[2:-2]) + s0)
    return all_marks


def jitter_ddp(periods: np.ndarray) -> float:
    """Mean absolute second difference of periods over the mean period."""
    periods = np.asarray(periods, dtype=float)
    if len(periods) < 3:
        raise ValueError("jitter ddp needs at least 3 periods")
    return float(np.mean(np.abs(np.diff(np.diff(periods)))) / np.mean(periods))


def shimmer_local(amplitudes: np.ndarray) -> float:
    """Mean absolute difference of cycle amplitudes over the mean amplitude."""
    amps = np.asarray(amplitudes, dtype=float)
    if len(amps) < 2:
        raise ValueError("shimmer needs at least 2 amplitudes")
    return float(np.mean(np.abs(np.diff(amps))) / np.mean(amps))


def extract_features(audio: AudioBuffer) -> FeatureVector:
    x = np.asarray(audio.samples, dtype=float)
    sr = audio.sample_rate
    if len(x) < MIN_AUDIO_S * sr:
        raise ValueError(f"audio shorter than {MIN_AUDIO_S * 1000:.0f} ms")
    duration = trimmed_duration(x, sr)
    times, f0s = track_f0(x, sr)
    voiced = ~np.isnan(f0s)
    if not np.any(voiced):
        return FeatureVector(duration, None, None, None, None, None)
    f0_mean = float(np.mean(f0s[voiced]))
    semis = 12.0 * np.log2(f0s[voiced] / 100.0)
    tv = times[voiced]
    if len(tv) >= 2 and np.ptp(tv) > 0:
        slope = float(np.polyfit(tv, semis, 1)[0])
    else:
        slope = 0.0
    f0_range = float(np.std(semis - np.mean(semis)))
    per_diffs, all_periods, amp_diffs, all_amps = [], [], [], []
    for marks in pulse_marks(x, sr, times, f0s):
        periods = np.diff(marks) / sr
        amps = np.array([_refine_peak(np.abs(x), int(round(m)))[1]
                         for m in marks])
        all_periods.extend(periods)
        all_amps.extend(amps)
        if len(periods) >= 3:
            per_diffs.extend(np.abs(np.diff(np.diff(periods))))
        if len(amps) >= 2:
            amp_diffs.extend(np.abs(np.diff(amps)))
    jit = (float(np.mean(per_diffs) / np.mean(all_periods))
           if per_diffs else None)
    shim = (float(np.mean(amp_diffs) / np.mean(all_amps))
            if amp_diffs else None)
    return FeatureVector(duration, f0_mean, slope, f0_range, jit, shim)
