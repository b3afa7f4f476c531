"""Corpus manifest, frame-embedding files, and per-cell sample assembly.

A corpus is a JSONL manifest of utterances, each pointing at a Praat
TextGrid and an FEMB frame-embedding file. This module reads those,
maps phoneme intervals onto frame index ranges, mean-pools frames into
one vector per phoneme occurrence, and groups the vectors into
real-vs-fake cells keyed by (phoneme, emotion, system).

FEMB layout (little-endian, no padding): magic "FEMB", u32 version=1,
u32 T, u32 d, f32 stride_seconds, then T·d f32 values row-major.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .textgrid import (
    DEFAULT_SILENCE_LABELS,
    Interval,
    load_textgrid,
    phone_intervals,
)

LABELS = ("REAL", "FAKE")
SYSTEMS = ("NONE", "EVC1", "EVC2")
EMOTIONS = ("ANGRY", "HAPPY", "SAD", "SURPRISE")

MANIFEST_FIELDS = (
    "utt_id",
    "audio_path",
    "textgrid_path",
    "emb_path",
    "label",
    "system",
    "emotion",
    "speaker",
)

FEMB_MAGIC = b"FEMB"
FEMB_VERSION = 1
_HEADER = struct.Struct("<4sIIIf")


class ManifestError(ValueError):
    pass


class FembError(ValueError):
    pass


class CorpusError(RuntimeError):
    """Failure while assembling cells, annotated with the utterance."""


@dataclass(frozen=True)
class UtteranceRecord:
    utt_id: str
    audio_path: str
    textgrid_path: str
    emb_path: str
    label: str
    system: str
    emotion: str
    speaker: str


@dataclass(frozen=True)
class FrameMatrix:
    frames: np.ndarray  # T×d float32
    stride: float
    utt_id: str = ""

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def dim(self) -> int:
        return self.frames.shape[1]


@dataclass(frozen=True)
class SegmentEmbedding:
    phoneme: str
    vector: np.ndarray
    utt_id: str
    emotion: str
    label: str
    system: str
    duration: float


@dataclass
class Cell:
    """Real and fake pooled vectors for one (phoneme, emotion, system)."""

    key: tuple
    real: list
    fake: list


@dataclass(frozen=True)
class ExclusionEntry:
    phoneme: str
    emotion: str
    system: str
    n_real: int
    n_fake: int


def read_manifest(path: str | Path) -> list[UtteranceRecord]:
    """Read and validate a JSONL manifest.

    Relative textgrid/emb/audio paths are resolved against the
    manifest's directory, so a corpus directory can be relocated as a
    unit. ``audio_path`` may be empty (embedding-level corpora carry
    no waveforms); the other two paths may not.
    """
    path = Path(path)
    base = path.parent
    records: list[UtteranceRecord] = []
    seen: set[tuple] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise ManifestError(f"{path}:{lineno}: invalid record: {e}") from e
            if not isinstance(obj, dict):
                raise ManifestError(f"{path}:{lineno}: record is not an object")
            missing = [f for f in MANIFEST_FIELDS if f not in obj]
            if missing:
                raise ManifestError(f"{path}:{lineno}: missing fields {missing}")
            extra = [k for k in obj if k not in MANIFEST_FIELDS]
            if extra:
                raise ManifestError(f"{path}:{lineno}: unknown fields {extra}")
            if obj["label"] not in LABELS:
                raise ManifestError(f"{path}:{lineno}: unknown label {obj['label']!r}")
            if obj["system"] not in SYSTEMS:
                raise ManifestError(f"{path}:{lineno}: unknown system {obj['system']!r}")
            if obj["emotion"] not in EMOTIONS:
                raise ManifestError(f"{path}:{lineno}: unknown emotion {obj['emotion']!r}")
            if (obj["label"] == "REAL") != (obj["system"] == "NONE"):
                raise ManifestError(
                    f"{path}:{lineno}: label {obj['label']} inconsistent with "
                    f"system {obj['system']} (REAL iff system=NONE)"
                )
            if not obj["textgrid_path"] or not obj["emb_path"]:
                raise ManifestError(f"{path}:{lineno}: empty textgrid_path or emb_path")
            key = (obj["utt_id"], obj["label"], obj["system"], obj["emotion"])
            if key in seen:
                raise ManifestError(
                    f"{path}:{lineno}: duplicate utt_id {obj['utt_id']!r} within "
                    f"(label, system, emotion)"
                )
            seen.add(key)

            def _resolve(p: str) -> str:
                if not p:
                    return p
                q = Path(p)
                return str(q if q.is_absolute() else base / q)

            records.append(
                UtteranceRecord(
                    utt_id=obj["utt_id"],
                    audio_path=_resolve(obj["audio_path"]),
                    textgrid_path=_resolve(obj["textgrid_path"]),
                    emb_path=_resolve(obj["emb_path"]),
                    label=obj["label"],
                    system=obj["system"],
                    emotion=obj["emotion"],
                    speaker=str(obj["speaker"]),
                )
            )
    return records


def write_manifest(records: list[UtteranceRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            fh.write(
                json.dumps(
                    {
                        "utt_id": r.utt_id,
                        "audio_path": r.audio_path,
                        "textgrid_path": r.textgrid_path,
                        "emb_path": r.emb_path,
                        "label": r.label,
                        "system": r.system,
                        "emotion": r.emotion,
                        "speaker": r.speaker,
                    },
                    sort_keys=True,
                )
                + "\n"
            )


def write_frame_matrix(fm: FrameMatrix, path: str | Path) -> None:
    frames = np.ascontiguousarray(fm.frames, dtype=np.float32)
    if frames.ndim != 2 or frames.shape[0] < 1 or frames.shape[1] < 1:
        raise FembError(f"frame matrix must be T×d with T,d ≥ 1, got {frames.shape}")
    if not np.isfinite(frames).all():
        raise FembError("non-finite values in frame matrix")
    if not fm.stride > 0:
        raise FembError(f"stride must be positive, got {fm.stride}")
    t, d = frames.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(FEMB_MAGIC, FEMB_VERSION, t, d, fm.stride))
        fh.write(frames.tobytes(order="C"))


def read_frame_matrix(path: str | Path, utt_id: str = "") -> FrameMatrix:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise FembError(f"{path}: truncated header ({len(data)} bytes)")
    magic, version, t, d, stride = _HEADER.unpack_from(data)
    if magic != FEMB_MAGIC:
        raise FembError(f"{path}: bad magic {magic!r}")
    if version != FEMB_VERSION:
        raise FembError(f"{path}: unsupported version {version}")
    if t < 1 or d < 1:
        raise FembError(f"{path}: invalid dimensions T={t}, d={d}")
    if not stride > 0:
        raise FembError(f"{path}: non-positive stride {stride}")
    expected = _HEADER.size + 4 * t * d
    if len(data) != expected:
        raise FembError(
            f"{path}: payload size mismatch (expected {expected} bytes, got {len(data)})"
        )
    frames = np.frombuffer(data, dtype="<f4", offset=_HEADER.size).reshape(t, d).copy()
    if not np.isfinite(frames).all():
        raise FembError(f"{path}: non-finite values in payload")
    return FrameMatrix(frames=frames, stride=float(stride), utt_id=utt_id)


def frames_for_interval(interval: Interval, stride: float, n_frames: int) -> range:
    """Frame indices whose [f·stride, (f+1)·stride) span overlaps the interval.

    The interval is treated half-open, [xmin, xmax). When no frame
    overlaps (segment shorter than the frame resolution, or past the
    end of the matrix) the single in-range frame whose center is
    nearest the interval midpoint is returned, so no segment is ever
    dropped.
    """
    if stride <= 0:
        raise ValueError(f"stride must be positive, got {stride}")
    if n_frames < 1:
        raise ValueError(f"need at least one frame, got {n_frames}")
    lo = int(math.floor(interval.xmin / stride))
    if (lo + 1) * stride <= interval.xmin:
        lo += 1
    hi = int(math.ceil(interval.xmax / stride))
    if (hi - 1) * stride >= interval.xmax:
        hi -= 1
    lo = max(lo, 0)
    hi = min(hi, n_frames)
    if lo < hi:
        return range(lo, hi)
    mid = 0.5 * (interval.xmin + interval.xmax)
    f = int(round(mid / stride - 0.5))
    f = min(max(f, 0), n_frames - 1)
    return range(f, f + 1)


def pool_segment(fm: FrameMatrix, frame_range: range) -> np.ndarray:
    """Mean-pool the selected frame rows into one float64 vector."""
    if len(frame_range) == 0:
        raise ValueError("cannot pool an empty frame range")
    if frame_range.start < 0 or frame_range.stop > fm.n_frames:
        raise ValueError(
            f"frame range {frame_range} outside [0, {fm.n_frames})"
        )
    rows = fm.frames[frame_range.start : frame_range.stop].astype(np.float64)
    return rows.mean(axis=0)


def segments_for_record(
    record: UtteranceRecord,
    tier_name: str = "phones",
    silence_labels: frozenset[str] = DEFAULT_SILENCE_LABELS,
) -> list[SegmentEmbedding]:
    """Pool every non-silence phoneme interval of one utterance."""
    try:
        tiers = load_textgrid(record.textgrid_path)
        fm = read_frame_matrix(record.emb_path, utt_id=record.utt_id)
        pairs = phone_intervals(tiers, tier_name, silence_labels)
    except Exception as e:
        raise CorpusError(f"utterance {record.utt_id!r}: {e}") from e
    out = []
    for label, iv in pairs:
        rng = frames_for_interval(iv, fm.stride, fm.n_frames)
        out.append(
            SegmentEmbedding(
                phoneme=label,
                vector=pool_segment(fm, rng),
                utt_id=record.utt_id,
                emotion=record.emotion,
                label=record.label,
                system=record.system,
                duration=iv.xmax - iv.xmin,
            )
        )
    return out


def build_cells(
    records: list[UtteranceRecord],
    min_count: int = 20,
    tier_name: str = "phones",
    silence_labels: frozenset[str] = DEFAULT_SILENCE_LABELS,
    per_speaker: bool = False,
) -> tuple[dict[tuple, Cell], list[ExclusionEntry]]:
    """Group pooled segments into real-vs-fake cells.

    Cell keys are (phoneme, emotion, system) — plus a trailing speaker
    element when ``per_speaker`` is set. Real segments of an emotion
    feed every system's cell for that phoneme/emotion. Cells where
    either side has fewer than ``min_count`` samples are dropped and
    reported; a phoneme/emotion that has real segments but no fake
    counterpart at all is reported once with system NONE. Output is
    independent of the input record order: segments are sorted by
    (utt_id, interval index) within each cell.
    """
    d: int | None = None
    # (phoneme, emotion[, speaker]) -> list of (utt_id, idx, vector)
    real: dict[tuple, list] = {}
    # (phoneme, emotion, system[, speaker]) -> list of (utt_id, idx, vector)
    fake: dict[tuple, list] = {}
    for record in records:
        segs = segments_for_record(record, tier_name, silence_labels)
        for idx, seg in enumerate(segs):
            if d is None:
                d = seg.vector.shape[0]
            elif seg.vector.shape[0] != d:
                raise CorpusError(
                    f"utterance {record.utt_id!r}: embedding dimension "
                    f"{seg.vector.shape[0]} differs from corpus dimension {d}"
                )
            spk = (record.speaker,) if per_speaker else ()
            item = (seg.utt_id, idx, seg.vector)
            if record.label == "REAL":
                real.setdefault((seg.phoneme, seg.emotion) + spk, []).append(item)
            else:
                fake.setdefault(
                    (seg.phoneme, seg.emotion, record.system) + spk, []
                ).append(item)

    def _vectors(items: list) -> list:
        return [v for _, _, v in sorted(items, key=lambda t: (t[0], t[1]))]

    cells: dict[tuple, Cell] = {}
    exclusions: list[ExclusionEntry] = []
    matched_real: set[tuple] = set()
    for fkey in sorted(fake):
        phoneme, emotion, system = fkey[0], fkey[1], fkey[2]
        spk = fkey[3:]
        rkey = (phoneme, emotion) + spk
        matched_real.add(rkey)
        n_real = len(real.get(rkey, ()))
        n_fake = len(fake[fkey])
        if min(n_real, n_fake) < min_count:
            exclusions.append(ExclusionEntry(phoneme, emotion, system, n_real, n_fake))
            continue
        key = (phoneme, emotion, system) + spk
        cells[key] = Cell(
            key=key,
            real=_vectors(real.get(rkey, [])),
            fake=_vectors(fake[fkey]),
        )
    for rkey in sorted(real):
        if rkey not in matched_real:
            exclusions.append(
                ExclusionEntry(rkey[0], rkey[1], "NONE", len(real[rkey]), 0)
            )
    exclusions.sort(key=lambda e: (e.system, e.emotion, e.phoneme))
    return cells, exclusions
