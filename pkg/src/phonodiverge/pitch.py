"""F0 contour extraction with the YIN estimator.

Difference function → cumulative mean normalized difference → first
dip below the threshold → local-minimum descent → parabolic
interpolation of the lag. Frames with no dip below the threshold are
unvoiced. WAV ingestion is limited to 16-bit PCM mono.
"""

from __future__ import annotations

import wave
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .kernels import yin_diff


@dataclass(frozen=True)
class F0Config:
    f0_min: float = 60.0
    f0_max: float = 400.0
    win: float = 0.040
    hop: float = 0.010
    threshold: float = 0.1


@dataclass(frozen=True)
class F0Frame:
    time: float  # frame center, seconds
    f0: float | None  # Hz; None = unvoiced
    confidence: float  # 1 − CMNDF minimum, clamped to [0, 1]

    @property
    def voiced(self) -> bool:
        return self.f0 is not None


def read_wav(path: str | Path) -> tuple[np.ndarray, int]:
    """Read a 16-bit PCM mono RIFF/WAVE file as float64 in [−1, 1)."""
    with wave.open(str(path), "rb") as wf:
        if wf.getnchannels() != 1:
            raise ValueError(f"{path}: expected mono audio, got {wf.getnchannels()} channels")
        if wf.getsampwidth() != 2:
            raise ValueError(f"{path}: expected 16-bit PCM, got {8 * wf.getsampwidth()}-bit")
        if wf.getcomptype() != "NONE":
            raise ValueError(f"{path}: compressed WAV ({wf.getcomptype()}) not supported")
        rate = wf.getframerate()
        raw = wf.readframes(wf.getnframes())
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    return samples, rate


def write_wav(path: str | Path, samples: np.ndarray, rate: int) -> None:
    """Write float samples in [−1, 1] as 16-bit PCM mono."""
    pcm = np.clip(np.asarray(samples, dtype=np.float64), -1.0, 1.0)
    pcm = np.rint(pcm * 32767.0).astype("<i2")
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(rate)
        wf.writeframes(pcm.tobytes())


def _cmndf(d: np.ndarray) -> np.ndarray:
    """Cumulative mean normalized difference; d'(0) = 1 by definition."""
    out = np.ones_like(d)
    csum = np.cumsum(d[1:])
    taus = np.arange(1, d.shape[0], dtype=np.float64)
    nz = csum > 0.0
    out[1:][nz] = d[1:][nz] * taus[nz] / csum[nz]
    # A zero cumulative sum means a perfectly flat (silent) stretch;
    # leave those at 1 so no dip is ever detected there.
    return out


def extract_f0(
    samples: np.ndarray, sample_rate: int, cfg: F0Config = F0Config()
) -> list[F0Frame]:
    """Per-frame F0 estimates over a sliding window."""
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] == 0:
        raise ValueError("empty or non-1-D signal")
    if not np.isfinite(x).all():
        raise ValueError("non-finite samples")
    if sample_rate < 8000:
        raise ValueError(f"sample rate {sample_rate} below the 8 kHz minimum")
    if cfg.f0_min >= cfg.f0_max:
        raise ValueError(f"f0_min {cfg.f0_min} must be below f0_max {cfg.f0_max}")
    if cfg.f0_min <= 0:
        raise ValueError(f"f0_min must be positive, got {cfg.f0_min}")

    win = int(round(cfg.win * sample_rate))
    hop = int(round(cfg.hop * sample_rate))
    if win < 2 or hop < 1:
        raise ValueError(f"window/hop too small at {sample_rate} Hz")
    tau_min = max(1, int(np.ceil(sample_rate / cfg.f0_max)))
    tau_max = int(np.floor(sample_rate / cfg.f0_min))
    # The difference function compares a half-window against lagged
    # copies, so the window must cover integration span + largest lag.
    window = win // 2
    if tau_max > win - window:
        tau_max = win - window
    if tau_max < tau_min:
        raise ValueError(
            f"window {cfg.win}s too short for f0_min {cfg.f0_min} Hz at {sample_rate} Hz"
        )

    frames: list[F0Frame] = []
    for start in range(0, x.shape[0] - win + 1, hop):
        frame = x[start : start + win]
        d = yin_diff(frame, window, tau_max)
        dn = _cmndf(d)
        search = dn[tau_min : tau_max + 1]
        best = float(search.min())
        confidence = min(max(1.0 - best, 0.0), 1.0)
        time = (start + win / 2.0) / sample_rate

        tau = _first_dip(dn, tau_min, tau_max, cfg.threshold)
        if tau is None:
            frames.append(F0Frame(time=time, f0=None, confidence=confidence))
            continue
        tau_f = _parabolic(dn, tau)
        f0 = float(sample_rate / tau_f)
        f0 = min(max(f0, cfg.f0_min), cfg.f0_max)
        frames.append(F0Frame(time=time, f0=f0, confidence=confidence))
    return frames


def _first_dip(dn: np.ndarray, tau_min: int, tau_max: int, threshold: float) -> int | None:
    """First lag under the threshold, walked down to its local minimum."""
    tau = tau_min
    while tau <= tau_max:
        if dn[tau] < threshold:
            while tau + 1 <= tau_max and dn[tau + 1] < dn[tau]:
                tau += 1
            return tau
        tau += 1
    return None


def _parabolic(dn: np.ndarray, tau: int) -> float:
    """Parabolic interpolation of the minimum around integer lag tau."""
    if tau <= 0 or tau + 1 >= dn.shape[0]:
        return float(tau)
    left, mid, right = dn[tau - 1], dn[tau], dn[tau + 1]
    denom = left - 2.0 * mid + right
    if denom <= 0.0:
        return float(tau)
    shift = 0.5 * (left - right) / denom
    # A well-formed local minimum keeps the vertex within half a lag.
    shift = min(max(shift, -0.5), 0.5)
    return tau + shift


def write_contour(frames: list[F0Frame], path: str | Path) -> None:
    """Contour as delimited text: time, f0 (nan if unvoiced), confidence."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("time,f0,confidence\n")
        for fr in frames:
            f0 = "nan" if fr.f0 is None else repr(float(fr.f0))
            fh.write(f"{float(fr.time)!r},{f0},{float(fr.confidence)!r}\n")
