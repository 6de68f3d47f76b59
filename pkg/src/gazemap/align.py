"""Frame timeline and nearest-sample gaze-to-frame alignment.

A frame with no gaze sample within the staleness budget is declared
gaze-less rather than interpolated: fixation analysis needs a measured
sample, not a synthetic midpoint.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_left
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Sequence

from .errors import FormatError, GazemapError

DEFAULT_MAX_STALENESS_US = 20_000  # half the frame period at 25 fps


@dataclass(frozen=True)
class FrameTimeline:
    fps: float
    frame_count: int
    t0_us: int
    resolution: tuple[int, int]  # (width, height)

    def __post_init__(self):
        if self.fps <= 0:
            raise GazemapError("fps must be > 0")
        if self.frame_count < 0:
            raise GazemapError("frame_count must be >= 0")

    @property
    def frame_period_us(self) -> int:
        return round(1_000_000 / self.fps)


@dataclass(frozen=True)
class AlignmentPolicy:
    mode: str = "nearest"
    max_staleness_us: int = DEFAULT_MAX_STALENESS_US

    def __post_init__(self):
        if self.mode != "nearest":
            raise GazemapError(f"unknown alignment mode {self.mode!r}")
        if self.max_staleness_us <= 0:
            raise GazemapError("max_staleness_us must be > 0")


def frame_timestamp(tl: FrameTimeline, i: int) -> int:
    if not (0 <= i < tl.frame_count):
        raise GazemapError(f"frame index {i} out of range [0, {tl.frame_count})")
    return tl.t0_us + round(i * 1_000_000 / tl.fps)


def nearest_sample_index(
    ts_list: Sequence[int], t: int, max_staleness_us: int
) -> int | None:
    """Index of the timestamp closest to t (ties toward the earlier one),
    or None when the closest exceeds the staleness budget."""
    if not ts_list:
        return None
    pos = bisect_left(ts_list, t)
    best = None
    for cand in (pos - 1, pos):
        if 0 <= cand < len(ts_list):
            if best is None or abs(ts_list[cand] - t) < abs(ts_list[best] - t):
                best = cand
    if best is None or abs(ts_list[best] - t) > max_staleness_us:
        return None
    return best


def gaze_at_frame(
    track: Sequence[tuple[int, tuple[float, float]]],
    frame_ts: int,
    policy: AlignmentPolicy = AlignmentPolicy(),
) -> tuple[float, float] | None:
    """Normalized gaze point of the track sample nearest to frame_ts."""
    idx = nearest_sample_index(
        [ts for ts, _ in track], frame_ts, policy.max_staleness_us
    )
    return None if idx is None else track[idx][1]


def to_pixel(
    gp: tuple[float, float], resolution: tuple[int, int]
) -> tuple[int, int]:
    """Map a normalized point to a pixel; origin top-left, y down, clamped."""
    w, h = resolution
    if w <= 0 or h <= 0:
        raise GazemapError("resolution must be positive")
    x = min(max(math.floor(gp[0] * w), 0), w - 1)
    y = min(max(math.floor(gp[1] * h), 0), h - 1)
    return (x, y)


def load_metadata(source: str | Path | IO) -> FrameTimeline:
    """Parse the video metadata file (fps, frame_count, t0_us, resolution)."""
    if isinstance(source, (str, Path)):
        try:
            text = Path(source).read_text("utf-8")
        except OSError as exc:
            raise FormatError(f"cannot read metadata file: {exc}") from None
    else:
        text = source.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"metadata file is not valid JSON: {exc}") from None
    try:
        fps = float(doc["fps"])
        frame_count = int(doc["frame_count"])
        t0_us = int(doc["t0_us"])
        res = doc["resolution"]
        resolution = (int(res[0]), int(res[1]))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise FormatError(f"metadata file: {exc!r}") from None
    if fps <= 0 or frame_count < 0 or resolution[0] <= 0 or resolution[1] <= 0:
        raise FormatError("metadata file: fps/frame_count/resolution out of range")
    return FrameTimeline(
        fps=fps, frame_count=frame_count, t0_us=t0_us, resolution=resolution
    )


def save_metadata(tl: FrameTimeline, sink: str | Path | IO | None = None) -> str:
    doc = {
        "fps": tl.fps,
        "frame_count": tl.frame_count,
        "t0_us": tl.t0_us,
        "resolution": list(tl.resolution),
    }
    text = json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"
    if sink is not None:
        if isinstance(sink, (str, Path)):
            Path(sink).write_text(text, "utf-8")
        else:
            sink.write(text)
    return text
