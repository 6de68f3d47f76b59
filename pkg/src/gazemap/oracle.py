"""Brute-force reference implementation for differential testing.

Everything here is deliberately naive and independent of the main pipeline:
masks are fully materialized as bitmaps, nearest-sample search is a linear
argmin, and run/dispersion scans are plain loops.  Only file formats are
shared with the pipeline.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .config import PipelineConfig
from .errors import FormatError

_OFF = "off_target"
_NO_GAZE = "no_gaze"


def _decode_bitmap(size, counts) -> np.ndarray:
    h, w = size
    flat = np.zeros(h * w, dtype=bool)
    pos = 0
    value = False
    for c in counts:
        if value:
            flat[pos : pos + c] = True
        pos += c
        value = not value
    if pos != h * w:
        raise FormatError("oracle: RLE counts do not cover the bitmap")
    # column-major: flat index = x * h + y
    return flat.reshape(w, h).T


def _load_gaze(path) -> list[tuple[int, float, float]]:
    out = []
    for line in Path(path).read_text("utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        obj = json.loads(line)
        if obj.get("type") != "gp" or obj.get("s") != 0:
            continue
        x, y = obj["gp"]
        if 0.0 <= x <= 1.0 and 0.0 <= y <= 1.0:
            out.append((obj["ts"], x, y))
    out.sort(key=lambda r: r[0])
    return out


def _load_masks(path):
    doc = json.loads(Path(path).read_text("utf-8"))
    frames = {}
    for fobj in doc["frames"]:
        insts = []
        for iobj in fobj["instances"]:
            insts.append(
                {
                    "id": iobj["id"],
                    "label": iobj["label"],
                    "score": iobj["score"],
                    "bitmap": _decode_bitmap(
                        iobj["rle"]["size"], iobj["rle"]["counts"]
                    ),
                }
            )
        frames[fobj["frame"]] = insts
    return doc["resolution"], frames, sorted(doc["classes"])


def scan_aoi_runs(
    targets: list[str], min_consecutive: int, gap_tolerance: int
) -> list[tuple[str, int, int]]:
    """Maximal same-AOI runs of at least min_consecutive frames, optionally
    bridged across no_gaze gaps of at most gap_tolerance frames."""
    runs: list[tuple[str, int, int]] = []
    for i, t in enumerate(targets):
        if t in (_OFF, _NO_GAZE):
            continue
        if runs and runs[-1][0] == t and runs[-1][2] == i - 1:
            runs[-1] = (t, runs[-1][1], i)
        else:
            runs.append((t, i, i))
    if gap_tolerance > 0:
        merged: list[tuple[str, int, int]] = []
        for run in runs:
            if merged and merged[-1][0] == run[0]:
                gap = range(merged[-1][2] + 1, run[1])
                if len(gap) <= gap_tolerance and all(
                    targets[i] == _NO_GAZE for i in gap
                ):
                    merged[-1] = (run[0], merged[-1][1], run[2])
                    continue
            merged.append(run)
        runs = merged
    return [r for r in runs if r[2] - r[1] + 1 >= min_consecutive]


def idt_scan(
    frames: list[tuple[int, tuple[int, int]]],
    dispersion_px: float,
    min_frames: int,
) -> list[tuple[int, int]]:
    """Dispersion-threshold identification over one list of (frame, pixel)
    entries; entries must already exclude consumed/gaze-less frames."""
    segments: list[list[tuple[int, tuple[int, int]]]] = []
    for idx, px in frames:
        if segments and segments[-1][-1][0] == idx - 1:
            segments[-1].append((idx, px))
        else:
            segments.append([(idx, px)])

    def disp(entries):
        xs = [p[0] for _, p in entries]
        ys = [p[1] for _, p in entries]
        return (max(xs) - min(xs)) + (max(ys) - min(ys))

    found: list[tuple[int, int]] = []
    for seg in segments:
        i = 0
        while i + min_frames <= len(seg):
            if disp(seg[i : i + min_frames]) > dispersion_px:
                i += 1
                continue
            j = i + min_frames
            while j < len(seg) and disp(seg[i : j + 1]) <= dispersion_px:
                j += 1
            found.append((seg[i][0], seg[j - 1][0]))
            i = j
    return found


def fixations_from_targets(
    targets: list[str],
    pixels: list[tuple[int, int] | None],
    config: PipelineConfig,
    frame_period_us: int,
) -> list[dict]:
    """Run both detectors over a per-frame target/pixel sequence."""
    inclusive = config.duration_convention == "inclusive"

    def duration_ms(first, last):
        n = (last - first + 1) if inclusive else (last - first)
        return n * frame_period_us // 1000

    aoi_runs = scan_aoi_runs(
        targets, config.min_consecutive, config.gap_tolerance
    )
    consumed = set()
    for _, first, last in aoi_runs:
        consumed.update(range(first, last + 1))
    free = [
        (i, pixels[i])
        for i in range(len(targets))
        if pixels[i] is not None and i not in consumed
    ]
    min_frames = max(
        1, math.ceil(config.min_duration_ms * 1000 / frame_period_us)
    )
    off_runs = idt_scan(free, config.dispersion_px, min_frames)

    fixations = [
        {
            "target": label,
            "first_frame": first,
            "last_frame": last,
            "duration_ms": duration_ms(first, last),
        }
        for label, first, last in aoi_runs
    ] + [
        {
            "target": _OFF,
            "first_frame": first,
            "last_frame": last,
            "duration_ms": duration_ms(first, last),
        }
        for first, last in off_runs
    ]
    fixations.sort(key=lambda f: f["first_frame"])
    return fixations


def metrics_from_fixations(
    fixations: list[dict],
    labels: list[str],
    frame_count: int,
    frame_period_us: int,
) -> dict:
    dwell = {label: 0 for label in labels}
    on_target = 0
    for f in fixations:
        if f["target"] == _OFF:
            continue
        on_target += 1
        dwell[f["target"]] = dwell.get(f["target"], 0) + f["duration_ms"]
    fc = len(fixations)
    exact = on_target / fc if fc else 0.0
    reported = (on_target * 100 // fc) / 100 if fc else 0.0
    return {
        "trial_duration_ms": frame_count * frame_period_us // 1000,
        "dwell_ms": dwell,
        "fixation_count": fc,
        "on_target_count": on_target,
        "tfr_exact": exact,
        "tfr_reported": reported,
    }


def oracle_map(
    gaze_path, masks_path, meta_path, config: PipelineConfig = PipelineConfig()
) -> dict:
    """Full naive re-run of the mapping pipeline; returns per-frame targets,
    fixations and metrics as plain dicts."""
    meta = json.loads(Path(meta_path).read_text("utf-8"))
    fps = float(meta["fps"])
    frame_count = int(meta["frame_count"])
    t0 = int(meta["t0_us"])
    width, height = meta["resolution"]
    frame_period_us = round(1_000_000 / fps)

    samples = _load_gaze(gaze_path)
    ts_arr = np.array([s[0] for s in samples], dtype=np.int64)

    _, mask_frames, labels = _load_masks(masks_path)
    if config.dilation_radius:
        from scipy import ndimage

        k = 2 * config.dilation_radius + 1
        for insts in mask_frames.values():
            for inst in insts:
                inst["bitmap"] = ndimage.binary_dilation(
                    inst["bitmap"], structure=np.ones((k, k), dtype=bool)
                )

    targets: list[str] = []
    pixels: list[tuple[int, int] | None] = []
    for i in range(frame_count):
        fts = t0 + round(i * 1_000_000 / fps)
        if ts_arr.size == 0:
            targets.append(_NO_GAZE)
            pixels.append(None)
            continue
        # argmin returns the first (earlier) index on ties
        k = int(np.abs(ts_arr - fts).argmin())
        if abs(int(ts_arr[k]) - fts) > config.max_staleness_us:
            targets.append(_NO_GAZE)
            pixels.append(None)
            continue
        x = min(max(math.floor(samples[k][1] * width), 0), width - 1)
        y = min(max(math.floor(samples[k][2] * height), 0), height - 1)
        pixels.append((x, y))
        best = None
        for inst in mask_frames.get(i, []):
            if inst["score"] < config.score_threshold:
                continue
            if not inst["bitmap"][y, x]:
                continue
            key = (-inst["score"], int(inst["bitmap"].sum()), inst["id"])
            if best is None or key < best[0]:
                best = (key, inst["label"])
        targets.append(best[1] if best else _OFF)

    fixations = fixations_from_targets(targets, pixels, config, frame_period_us)
    return {
        "per_frame_target": targets,
        "fixations": fixations,
        "metrics": metrics_from_fixations(
            fixations, labels, frame_count, frame_period_us
        ),
    }
