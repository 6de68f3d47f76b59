"""Fixation detection over the per-frame gaze/mask verdict stream.

AOI fixations come from the consecutive-frame rule: a maximal run of at
least ``min_consecutive`` frames on the same AOI counts exactly once, and
its duration is the inclusive frame count times the frame period (7 frames
at 25 fps = 280 ms).  Off-target fixations come from a dispersion-based
detector run over the frames no AOI fixation consumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from . import masks as mask_store
from .align import AlignmentPolicy, FrameTimeline, frame_timestamp, gaze_at_frame, to_pixel
from .errors import ConfigError, InternalError

OFF_TARGET = "off_target"
NO_GAZE = "no_gaze"

DURATION_INCLUSIVE = "inclusive"  # (last - first + 1) * period; default
DURATION_SPAN = "span"  # (last - first) * period; literal timestamp difference


@dataclass(frozen=True)
class FrameHit:
    frame_index: int
    gaze_px: tuple[int, int] | None
    target: str  # AOI label, OFF_TARGET, or NO_GAZE

    def __post_init__(self):
        if (self.target == NO_GAZE) != (self.gaze_px is None):
            raise InternalError("no_gaze must coincide with an absent gaze pixel")


@dataclass(frozen=True)
class Fixation:
    target: str  # AOI label or OFF_TARGET
    first_frame: int
    last_frame: int
    start_us: int
    end_us: int
    duration_us: int
    centroid_px: tuple[float, float]


@dataclass(frozen=True)
class RunConfig:
    min_consecutive: int = 7
    gap_tolerance_frames: int = 0
    duration_convention: str = DURATION_INCLUSIVE

    def __post_init__(self):
        if self.min_consecutive < 1:
            raise ConfigError("min_consecutive must be >= 1")
        if self.gap_tolerance_frames < 0:
            raise ConfigError("gap_tolerance_frames must be >= 0")
        if self.duration_convention not in (DURATION_INCLUSIVE, DURATION_SPAN):
            raise ConfigError(
                f"unknown duration convention {self.duration_convention!r}"
            )


@dataclass(frozen=True)
class IdtConfig:
    dispersion_px: float = 50.0
    min_duration_ms: float = 280.0

    def __post_init__(self):
        if self.dispersion_px <= 0 or self.min_duration_ms <= 0:
            raise ConfigError("dispersion_px and min_duration_ms must be positive")


@dataclass
class TrialRecord:
    fixations: list[Fixation]
    hits: list[FrameHit]
    trial_duration_us: int
    frame_period_us: int


def classify_frames(
    timeline: FrameTimeline,
    track: Sequence[tuple[int, tuple[float, float]]],
    maskset: mask_store.MaskSet,
    score_threshold: float = mask_store.DEFAULT_SCORE_THRESHOLD,
    tie_break: str = mask_store.TIE_BREAK_SCORE_AREA_ID,
    policy: AlignmentPolicy = AlignmentPolicy(),
) -> list[FrameHit]:
    """One verdict per frame: which AOI (if any) the gaze pixel falls in."""
    ts_list = [ts for ts, _ in track]
    hits: list[FrameHit] = []
    for i in range(timeline.frame_count):
        fts = frame_timestamp(timeline, i)
        idx = _nearest(ts_list, fts, policy.max_staleness_us)
        if idx is None:
            hits.append(FrameHit(i, None, NO_GAZE))
            continue
        px = to_pixel(track[idx][1], timeline.resolution)
        label = mask_store.hit_test(
            px, maskset.frames.get(i), score_threshold, tie_break
        )
        hits.append(FrameHit(i, px, label if label is not None else OFF_TARGET))
    return hits


def _nearest(ts_list, t, staleness):
    from .align import nearest_sample_index

    return nearest_sample_index(ts_list, t, staleness)


def _duration_us(first: int, last: int, period: int, convention: str) -> int:
    if convention == DURATION_SPAN:
        return (last - first) * period
    return (last - first + 1) * period


def _centroid(hits: Sequence[FrameHit], first: int, last: int) -> tuple[float, float]:
    pts = [h.gaze_px for h in hits[first : last + 1] if h.gaze_px is not None]
    if not pts:
        return (math.nan, math.nan)
    return (
        sum(p[0] for p in pts) / len(pts),
        sum(p[1] for p in pts) / len(pts),
    )


def detect_aoi_fixations(
    hits: Sequence[FrameHit],
    cfg: RunConfig = RunConfig(),
    frame_period_us: int = 40_000,
    t0_us: int = 0,
) -> list[Fixation]:
    """Consecutive-frame rule: one fixation per maximal qualifying run."""
    # maximal raw runs of identical AOI labels
    runs: list[tuple[str, int, int]] = []
    for h in hits:
        if h.target in (OFF_TARGET, NO_GAZE):
            continue
        if runs and runs[-1][0] == h.target and runs[-1][2] == h.frame_index - 1:
            runs[-1] = (runs[-1][0], runs[-1][1], h.frame_index)
        else:
            runs.append((h.target, h.frame_index, h.frame_index))

    # optionally bridge same-label runs across short no_gaze dropouts
    if cfg.gap_tolerance_frames > 0:
        merged: list[tuple[str, int, int]] = []
        for run in runs:
            if merged and merged[-1][0] == run[0]:
                gap = range(merged[-1][2] + 1, run[1])
                if len(gap) <= cfg.gap_tolerance_frames and all(
                    hits[i].target == NO_GAZE for i in gap
                ):
                    merged[-1] = (run[0], merged[-1][1], run[2])
                    continue
            merged.append(run)
        runs = merged

    out: list[Fixation] = []
    for label, first, last in runs:
        if last - first + 1 < cfg.min_consecutive:
            continue
        start = t0_us + first * frame_period_us
        dur = _duration_us(first, last, frame_period_us, cfg.duration_convention)
        out.append(
            Fixation(
                target=label,
                first_frame=first,
                last_frame=last,
                start_us=start,
                end_us=start + dur,
                duration_us=dur,
                centroid_px=_centroid(hits, first, last),
            )
        )
    return out


def _dispersion(pts: Sequence[tuple[int, int]]) -> float:
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    return (max(xs) - min(xs)) + (max(ys) - min(ys))


def detect_offtarget_fixations(
    hits: Sequence[FrameHit],
    aoi_fixations: Sequence[Fixation],
    cfg: IdtConfig = IdtConfig(),
    frame_period_us: int = 40_000,
    t0_us: int = 0,
    duration_convention: str = DURATION_INCLUSIVE,
) -> list[Fixation]:
    """Dispersion-threshold identification over unconsumed gaze frames."""
    consumed = set()
    for f in aoi_fixations:
        consumed.update(range(f.first_frame, f.last_frame + 1))

    # contiguous segments of frames with a gaze pixel, outside AOI fixations
    segments: list[list[FrameHit]] = []
    for h in hits:
        if h.gaze_px is None or h.frame_index in consumed:
            continue
        if segments and segments[-1][-1].frame_index == h.frame_index - 1:
            segments[-1].append(h)
        else:
            segments.append([h])

    min_frames = max(1, math.ceil(cfg.min_duration_ms * 1000 / frame_period_us))
    out: list[Fixation] = []
    for seg in segments:
        i = 0
        while i + min_frames <= len(seg):
            window = seg[i : i + min_frames]
            if _dispersion([h.gaze_px for h in window]) > cfg.dispersion_px:
                i += 1
                continue
            j = i + min_frames
            while (
                j < len(seg)
                and _dispersion([h.gaze_px for h in seg[i : j + 1]])
                <= cfg.dispersion_px
            ):
                j += 1
            first = seg[i].frame_index
            last = seg[j - 1].frame_index
            start = t0_us + first * frame_period_us
            dur = _duration_us(first, last, frame_period_us, duration_convention)
            out.append(
                Fixation(
                    target=OFF_TARGET,
                    first_frame=first,
                    last_frame=last,
                    start_us=start,
                    end_us=start + dur,
                    duration_us=dur,
                    centroid_px=_centroid(hits, first, last),
                )
            )
            i = j
    return out


def build_trial(
    hits: Sequence[FrameHit],
    aoi_fixations: Sequence[Fixation],
    offtarget_fixations: Sequence[Fixation],
    frame_period_us: int = 40_000,
) -> TrialRecord:
    """Merge fixations in time order and attach the trial duration."""
    seen: set[int] = set()
    for f in list(aoi_fixations) + list(offtarget_fixations):
        frames = set(range(f.first_frame, f.last_frame + 1))
        if frames & seen:
            raise InternalError("AOI and off-target fixations overlap in frames")
        seen |= frames
    merged = sorted(
        list(aoi_fixations) + list(offtarget_fixations),
        key=lambda f: (f.start_us, f.first_frame),
    )
    return TrialRecord(
        fixations=merged,
        hits=list(hits),
        trial_duration_us=len(hits) * frame_period_us,
        frame_period_us=frame_period_us,
    )
