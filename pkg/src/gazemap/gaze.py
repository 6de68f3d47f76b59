"""Parsing of raw eye-tracker logs into validated, time-ordered gaze streams.

The log format is newline-delimited JSON: one flat object per line with keys
``ts`` (integer microseconds), ``type`` (pc|pd|gp|gp3|gd), ``s`` (0 = valid)
and a value key named after the type.  Lines starting with ``#`` are comments.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import IO, Iterable

from .errors import FormatError

KINDS = ("pc", "pd", "gp", "gp3", "gd")
EYES = ("left", "right", "combined")

# expected payload arity per record kind
_ARITY = {"pc": 3, "pd": 1, "gp": 2, "gp3": 3, "gd": 3}


@dataclass(frozen=True)
class GazeSample:
    """One timestamped eye-tracker record."""

    ts_us: int
    kind: str
    values: tuple[float, ...]
    valid: bool
    eye: str | None = None


@dataclass(frozen=True)
class GazeStream:
    """Immutable, time-ordered sequence of gaze samples."""

    samples: tuple[GazeSample, ...]
    nominal_rate_hz: float = 100.0

    @property
    def duration_us(self) -> int:
        if not self.samples:
            return 0
        return self.samples[-1].ts_us - self.samples[0].ts_us


@dataclass
class ParseSummary:
    """Per-record soft errors accumulated while parsing a log."""

    total_records: int = 0
    parsed: int = 0
    malformed: int = 0
    errors: list[str] = field(default_factory=list)

    _MAX_ERRORS = 50

    def note(self, line_no: int, reason: str) -> None:
        self.malformed += 1
        if len(self.errors) < self._MAX_ERRORS:
            self.errors.append(f"line {line_no}: {reason}")


@dataclass(frozen=True)
class StreamStats:
    sample_count: dict[str, int]
    gap_count: int
    invalid_count: int
    measured_rate_hz: float


def _parse_record(line: str) -> GazeSample:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise FormatError("record is not an object")

    for key in ("ts", "type", "s"):
        if key not in obj:
            raise FormatError(f"missing key {key!r}")

    ts = obj["ts"]
    if isinstance(ts, bool) or not isinstance(ts, int):
        raise FormatError("ts must be an integer (microseconds)")
    if ts < 0:
        raise FormatError("ts must be >= 0")

    kind = obj["type"]
    if kind not in KINDS:
        raise FormatError(f"unknown type {kind!r}")

    status = obj["s"]
    if isinstance(status, bool) or not isinstance(status, int):
        raise FormatError("s must be an integer status code")

    if kind not in obj:
        raise FormatError(f"missing value key {kind!r}")
    raw = obj[kind]
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        raw = [raw]
    if not isinstance(raw, list) or len(raw) != _ARITY[kind]:
        raise FormatError(f"{kind} payload must have {_ARITY[kind]} numbers")
    try:
        values = tuple(float(v) for v in raw)
    except (TypeError, ValueError):
        raise FormatError(f"{kind} payload must be numeric") from None

    eye = obj.get("eye")
    if eye is not None and eye not in ("left", "right"):
        raise FormatError(f"eye must be left|right, got {eye!r}")

    valid = status == 0
    if kind == "gp" and valid:
        x, y = values
        # out-of-range gaze positions are retained but flagged, never clamped
        if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
            valid = False

    return GazeSample(ts_us=ts, kind=kind, values=values, valid=valid, eye=eye)


def _merge_per_eye_gp(samples: list[GazeSample]) -> list[GazeSample]:
    """Resolve per-eye gp rows to a single gaze position per instant.

    Combined gp rows win; per-eye gp rows are dropped when combined rows
    exist, otherwise the two eyes are averaged per timestamp.
    """
    has_combined = any(s.kind == "gp" and s.eye is None for s in samples)
    if has_combined:
        return [s for s in samples if s.kind != "gp" or s.eye is None]

    per_ts: dict[int, list[GazeSample]] = defaultdict(list)
    out: list[GazeSample] = []
    for s in samples:
        if s.kind == "gp":
            per_ts[s.ts_us].append(s)
        else:
            out.append(s)
    for ts, group in per_ts.items():
        usable = [s for s in group if s.valid] or group
        x = sum(s.values[0] for s in usable) / len(usable)
        y = sum(s.values[1] for s in usable) / len(usable)
        valid = any(s.valid for s in group) and 0.0 <= x <= 1.0 and 0.0 <= y <= 1.0
        out.append(GazeSample(ts_us=ts, kind="gp", values=(x, y), valid=valid))
    return out


def parse_gaze_stream(
    data: str | bytes | IO, nominal_rate_hz: float = 100.0
) -> tuple[GazeStream, ParseSummary]:
    """Parse a newline-delimited gaze log.

    Malformed records are skipped and counted; a log with zero parseable
    records or a malformed fraction above 50% raises FormatError.
    """
    if hasattr(data, "read"):
        data = data.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")

    summary = ParseSummary()
    samples: list[GazeSample] = []
    for line_no, line in enumerate(data.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        summary.total_records += 1
        try:
            samples.append(_parse_record(line))
        except FormatError as exc:
            summary.note(line_no, str(exc))
    summary.parsed = len(samples)

    if summary.parsed == 0:
        raise FormatError("no records: input contains no parseable gaze data")
    if summary.malformed * 2 > summary.total_records:
        raise FormatError(
            f"{summary.malformed}/{summary.total_records} records malformed; "
            "this does not look like a gaze log"
        )

    samples = _merge_per_eye_gp(samples)
    samples.sort(key=lambda s: s.ts_us)
    return GazeStream(tuple(samples), nominal_rate_hz=nominal_rate_hz), summary


def serialize_gaze_stream(stream: GazeStream) -> str:
    """Write a stream back to the newline-delimited log format."""
    lines = []
    for s in stream.samples:
        obj: dict = {"ts": s.ts_us, "type": s.kind, "s": 0 if s.valid else 1}
        payload = list(s.values) if _ARITY[s.kind] > 1 else s.values[0]
        obj[s.kind] = payload
        if s.eye is not None:
            obj["eye"] = s.eye
        lines.append(json.dumps(obj, separators=(",", ":")))
    return "\n".join(lines) + ("\n" if lines else "")


def gaze_track(stream: GazeStream) -> list[tuple[int, tuple[float, float]]]:
    """Extract the valid 2-D gaze positions, order preserved."""
    return [
        (s.ts_us, (s.values[0], s.values[1]))
        for s in stream.samples
        if s.kind == "gp" and s.valid
    ]


def stream_stats(stream: GazeStream) -> StreamStats:
    counts: dict[str, int] = {k: 0 for k in KINDS}
    invalid = 0
    gp_ts: list[int] = []
    for s in stream.samples:
        counts[s.kind] += 1
        if not s.valid:
            invalid += 1
        if s.kind == "gp":
            gp_ts.append(s.ts_us)

    period_us = 1e6 / stream.nominal_rate_hz
    gaps = sum(
        1 for a, b in zip(gp_ts, gp_ts[1:]) if (b - a) > 2 * period_us
    )
    rate = 0.0
    if len(gp_ts) >= 2 and gp_ts[-1] > gp_ts[0]:
        rate = (len(gp_ts) - 1) * 1e6 / (gp_ts[-1] - gp_ts[0])
    return StreamStats(
        sample_count=counts,
        gap_count=gaps,
        invalid_count=invalid,
        measured_rate_hz=rate,
    )
