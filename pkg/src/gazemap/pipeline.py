"""End-to-end mapping: gaze log + mask file + video metadata -> trial metrics."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import IO

from . import fixations, gaze, masks, metrics
from .align import FrameTimeline, load_metadata
from .config import PipelineConfig
from .errors import FormatError


@dataclass
class PipelineResult:
    trial: fixations.TrialRecord
    metrics: metrics.TrialMetrics
    timeline: FrameTimeline
    parse_summary: gaze.ParseSummary
    maskset: masks.MaskSet


def run_map(
    gaze_path: str | Path,
    masks_path: str | Path,
    meta_path: str | Path,
    config: PipelineConfig = PipelineConfig(),
) -> PipelineResult:
    try:
        gaze_text = Path(gaze_path).read_text("utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read gaze log: {exc}") from None
    stream, summary = gaze.parse_gaze_stream(gaze_text)
    track = gaze.gaze_track(stream)

    maskset = masks.load_maskset(masks_path)
    problems = masks.validate_maskset(maskset)
    if problems:
        raise FormatError("mask file invalid: " + "; ".join(problems[:10]))
    if config.dilation_radius:
        maskset = masks.dilate_maskset(maskset, config.dilation_radius)

    timeline = load_metadata(meta_path)
    if timeline.resolution != maskset.resolution:
        raise FormatError(
            f"metadata resolution {timeline.resolution} != "
            f"mask resolution {maskset.resolution}"
        )

    hits = fixations.classify_frames(
        timeline,
        track,
        maskset,
        score_threshold=config.score_threshold,
        tie_break=config.tie_break,
        policy=config.alignment_policy,
    )
    period = timeline.frame_period_us
    aoi_fix = fixations.detect_aoi_fixations(
        hits, config.run_config, period, t0_us=timeline.t0_us
    )
    off_fix = fixations.detect_offtarget_fixations(
        hits,
        aoi_fix,
        config.idt_config,
        period,
        t0_us=timeline.t0_us,
        duration_convention=config.duration_convention,
    )
    trial = fixations.build_trial(hits, aoi_fix, off_fix, period)
    trial_metrics = metrics.compute_metrics(trial, labels=maskset.class_table)
    return PipelineResult(
        trial=trial,
        metrics=trial_metrics,
        timeline=timeline,
        parse_summary=summary,
        maskset=maskset,
    )
