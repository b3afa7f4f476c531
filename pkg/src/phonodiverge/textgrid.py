"""Praat TextGrid parsing and phoneme-label normalization.

Handles both the long ("verbose") and short text serializations that
forced aligners emit, in UTF-8 or UTF-16 (BOM-sniffed). Binary TextGrids
are rejected. Point tiers are structurally consumed but not returned;
only interval tiers are useful downstream.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

#: Distinguished normalized label for silence / non-speech intervals.
SILENCE = "SILENCE"

#: Interval labels treated as silence (case-insensitive). "spn" is the
#: aligner's tag for unknown/out-of-dictionary speech.
DEFAULT_SILENCE_LABELS = frozenset({"", "sil", "sp", "spn"})

#: Consecutive interval boundaries may disagree by up to this much
#: (seconds) before the tier is declared non-monotone. Covers float
#: round-trip noise in aligner output.
BOUNDARY_JITTER = 1e-6


class TextGridParseError(ValueError):
    """Malformed TextGrid input, annotated with the offending line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Interval:
    """One labeled time span; label is the raw (unnormalized) text."""

    label: str
    xmin: float
    xmax: float


@dataclass(frozen=True)
class Tier:
    name: str
    intervals: tuple[Interval, ...]
    tmin: float
    tmax: float
    kind: str = "interval"


@dataclass(frozen=True)
class _Token:
    kind: str  # "num" | "str" | "flag"
    value: object
    line: int


_STRUCTURAL = re.compile(r"^\s*(item|intervals|points)\s*\[\d*\]\s*:\s*$")
_KEYED = re.compile(r"^\s*([A-Za-z][A-Za-z ?:]*?)\s*=\s*(.*)$")
_NUMBER = re.compile(r"^[-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?$")
# The tiers marker appears as "tiers? <exists>" in the long format and
# as a bare "<exists>" in the short one; neither carries an equals sign.
_FLAG = re.compile(r"<(exists|absent)>")


def _tokenize(text: str) -> Iterator[_Token]:
    """Yield the value tokens of a TextGrid, long or short format.

    Long format carries ``key = value`` lines plus structural headers
    (``item [1]:`` etc.); stripping those leaves exactly the short
    format's bare value sequence, so a single stream serves both.
    """
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        line = lines[i]
        lineno = i + 1
        i += 1
        if not line.strip() or _STRUCTURAL.match(line):
            continue
        m = _KEYED.match(line)
        rest = m.group(2) if m else line.strip()
        if not rest:
            continue
        if rest.startswith('"'):
            # Quoted string; "" escapes a quote and the value may span lines.
            parts: list[str] = []
            buf = rest[1:]
            start_line = lineno
            while True:
                pos = 0
                closed = False
                while pos < len(buf):
                    if buf[pos] == '"':
                        if pos + 1 < len(buf) and buf[pos + 1] == '"':
                            parts.append(buf[: pos + 1])
                            buf = buf[pos + 2 :]
                            pos = 0
                            continue
                        parts.append(buf[:pos])
                        closed = True
                        break
                    pos += 1
                if closed:
                    break
                parts.append(buf + "\n")
                if i >= len(lines):
                    raise TextGridParseError("unterminated string", start_line)
                buf = lines[i]
                i += 1
            yield _Token("str", "".join(parts), start_line)
        elif _FLAG.search(rest):
            yield _Token("flag", f"<{_FLAG.search(rest).group(1)}>", lineno)
        else:
            # Short format may put nothing else on the line; long format
            # values never carry trailing tokens either.
            rest = rest.strip()
            if not _NUMBER.match(rest):
                raise TextGridParseError(f"expected a value, got {rest!r}", lineno)
            yield _Token("num", float(rest), lineno)


class _Stream:
    def __init__(self, tokens: Iterator[_Token]):
        self._it = tokens
        self._last_line = 1

    def _next(self, kind: str) -> _Token:
        try:
            tok = next(self._it)
        except StopIteration:
            raise TextGridParseError("unexpected end of file", self._last_line) from None
        self._last_line = tok.line
        if tok.kind != kind:
            raise TextGridParseError(
                f"expected {kind}, got {tok.kind} ({tok.value!r})", tok.line
            )
        return tok

    def num(self) -> float:
        return float(self._next("num").value)

    def string(self) -> str:
        return str(self._next("str").value)

    def flag_or_num(self) -> object:
        try:
            tok = next(self._it)
        except StopIteration:
            raise TextGridParseError("unexpected end of file", self._last_line) from None
        self._last_line = tok.line
        if tok.kind not in ("flag", "num"):
            raise TextGridParseError(f"expected flag, got {tok.kind}", tok.line)
        return tok.value

    @property
    def line(self) -> int:
        return self._last_line


def _decode(data: bytes) -> str:
    # The -le/-be codecs keep the BOM as U+FEFF; drop it ourselves.
    if data.startswith(b"\xff\xfe"):
        return data[2:].decode("utf-16-le")
    if data.startswith(b"\xfe\xff"):
        return data[2:].decode("utf-16-be")
    if data.startswith(b"\xef\xbb\xbf"):
        return data.decode("utf-8-sig")
    return data.decode("utf-8")


def parse_textgrid(text: str | bytes) -> list[Tier]:
    """Parse TextGrid text into interval tiers, in file order.

    Accepts bytes (BOM-sniffed UTF-8/UTF-16) or an already-decoded
    string. Raises :class:`TextGridParseError` with a line number on
    malformed input, mismatched interval counts, or non-monotone
    boundaries.
    """
    if isinstance(text, bytes):
        if text.startswith(b"ooBinaryFile"):
            raise TextGridParseError("binary TextGrid files are not supported", 1)
        text = _decode(text)
    if text.lstrip().startswith("ooBinaryFile"):
        raise TextGridParseError("binary TextGrid files are not supported", 1)

    s = _Stream(_tokenize(text))
    ftype = s.string()
    if ftype != "ooTextFile":
        raise TextGridParseError(f"not a Praat text file (File type={ftype!r})", s.line)
    oclass = s.string()
    if oclass != "TextGrid":
        raise TextGridParseError(f"not a TextGrid (Object class={oclass!r})", s.line)
    s.num()  # global xmin
    s.num()  # global xmax
    has_tiers = s.flag_or_num()
    if has_tiers == "<absent>":
        return []
    if has_tiers != "<exists>":
        raise TextGridParseError(f"expected tiers flag, got {has_tiers!r}", s.line)
    n_tiers = int(s.num())

    tiers: list[Tier] = []
    for _ in range(n_tiers):
        tclass = s.string()
        name = s.string()
        tmin = s.num()
        tmax = s.num()
        count_line = s.line
        n_items = int(s.num())
        if tclass == "IntervalTier":
            intervals = []
            prev_xmax: float | None = None
            for k in range(n_items):
                xmin = s.num()
                xmax = s.num()
                label = s.string()
                if xmin >= xmax:
                    raise TextGridParseError(
                        f"interval {k + 1} of tier {name!r} has xmin >= xmax", s.line
                    )
                if prev_xmax is not None and xmin < prev_xmax - BOUNDARY_JITTER:
                    raise TextGridParseError(
                        f"non-monotone boundaries in tier {name!r}", s.line
                    )
                if xmin < tmin - BOUNDARY_JITTER or xmax > tmax + BOUNDARY_JITTER:
                    raise TextGridParseError(
                        f"interval {k + 1} of tier {name!r} outside [{tmin}, {tmax}]",
                        s.line,
                    )
                prev_xmax = xmax
                intervals.append(Interval(label, xmin, xmax))
            if len(intervals) != n_items:
                raise TextGridParseError(
                    f"tier {name!r} declares {n_items} intervals", count_line
                )
            tiers.append(Tier(name, tuple(intervals), tmin, tmax))
        elif tclass == "TextTier":
            # Point tiers: consume structurally, drop (out of scope).
            for _ in range(n_items):
                s.num()
                s.string()
        else:
            raise TextGridParseError(f"unknown tier class {tclass!r}", s.line)
    return tiers


def load_textgrid(path: str | Path) -> list[Tier]:
    """Read and parse a TextGrid file."""
    return parse_textgrid(Path(path).read_bytes())


def normalize_label(
    raw: str, silence_labels: frozenset[str] = DEFAULT_SILENCE_LABELS
) -> str:
    """Normalize a phone label: strip stress digits, uppercase.

    Labels in ``silence_labels`` (case-insensitive, compared after
    whitespace trimming) map to :data:`SILENCE`, as does anything left
    empty once trailing digits are removed. Total and idempotent.
    """
    s = raw.strip()
    if s.lower() in silence_labels:
        return SILENCE
    s = s.rstrip("0123456789")
    if not s:
        return SILENCE
    return s.upper()


def phone_intervals(
    tiers: list[Tier],
    tier_name: str = "phones",
    silence_labels: frozenset[str] = DEFAULT_SILENCE_LABELS,
) -> list[tuple[str, Interval]]:
    """Normalized non-silence (label, interval) pairs of one tier, in order."""
    for tier in tiers:
        if tier.name == tier_name:
            out = []
            for iv in tier.intervals:
                label = normalize_label(iv.label, silence_labels)
                if label != SILENCE:
                    out.append((label, iv))
            return out
    available = ", ".join(repr(t.name) for t in tiers) or "none"
    raise KeyError(f"no tier named {tier_name!r}; available tiers: {available}")
