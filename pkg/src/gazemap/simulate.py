"""Synthetic trials with exact ground truth.

A scenario scripts moving AOI actors and a gaze path over a shared frame
timeline.  The generator emits the three pipeline input files plus a ground
truth record computed from the same geometry, so every generated trial has
an exact expected answer.
"""

from __future__ import annotations

import json
import math
import random
from bisect import bisect_left
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO

import numpy as np

from . import oracle
from .config import PipelineConfig
from .errors import FormatError
from .masks import RleMask, encode_rle, tight_bbox

GAZE_PERIOD_US = 10_000  # 100 Hz device rate


@dataclass(frozen=True)
class Actor:
    actor_id: str
    label: str
    shape: str  # rect | ellipse
    size: tuple[float, float]  # (width, height) in pixels
    center: tuple[float, float]  # at frame 0
    velocity: tuple[float, float] = (0.0, 0.0)  # pixels per frame
    score: float = 0.9

    def center_at(self, frame: int) -> tuple[float, float]:
        return (
            self.center[0] + self.velocity[0] * frame,
            self.center[1] + self.velocity[1] * frame,
        )

    def contains(self, px: tuple[int, int], frame: int) -> bool:
        cx, cy = self.center_at(frame)
        x, y = px
        if self.shape == "rect":
            return (
                abs(x - cx) <= self.size[0] / 2 and abs(y - cy) <= self.size[1] / 2
            )
        rx, ry = self.size[0] / 2, self.size[1] / 2
        return ((x - cx) / rx) ** 2 + ((y - cy) / ry) ** 2 <= 1.0

    def rasterize(self, frame: int, resolution: tuple[int, int]) -> np.ndarray:
        w, h = resolution
        cx, cy = self.center_at(frame)
        bitmap = np.zeros((h, w), dtype=bool)
        if self.shape == "rect":
            x0 = max(math.ceil(cx - self.size[0] / 2), 0)
            x1 = min(math.floor(cx + self.size[0] / 2), w - 1)
            y0 = max(math.ceil(cy - self.size[1] / 2), 0)
            y1 = min(math.floor(cy + self.size[1] / 2), h - 1)
            bitmap[y0 : y1 + 1, x0 : x1 + 1] = True
        elif self.shape == "ellipse":
            rx, ry = self.size[0] / 2, self.size[1] / 2
            ys, xs = np.mgrid[0:h, 0:w]
            bitmap = ((xs - cx) / rx) ** 2 + ((ys - cy) / ry) ** 2 <= 1.0
        else:
            raise FormatError(f"unknown actor shape {self.shape!r}")
        return bitmap


@dataclass(frozen=True)
class Segment:
    kind: str  # dwell | saccade | dropout
    n_frames: int
    target: str | None = None  # actor id, for dwell-on-actor
    point: tuple[int, int] | None = None  # for dwell-on-point
    start: tuple[int, int] | None = None  # for saccade
    end: tuple[int, int] | None = None


@dataclass(frozen=True)
class ScenarioSpec:
    seed: int
    fps: float
    resolution: tuple[int, int]
    actors: tuple[Actor, ...]
    gaze_script: tuple[Segment, ...]
    t0_us: int = 0
    jitter_px: int = 0

    @property
    def frame_count(self) -> int:
        return sum(s.n_frames for s in self.gaze_script)

    @property
    def frame_period_us(self) -> int:
        return round(1_000_000 / self.fps)


@dataclass
class GroundTruth:
    per_frame_target: list[str]
    fixations: list[dict]
    metrics: dict
    config: dict = field(default_factory=dict)


def validate_spec(spec: ScenarioSpec) -> None:
    if spec.fps <= 0:
        raise FormatError("scenario: fps must be > 0")
    if not spec.gaze_script:
        raise FormatError("scenario: gaze_script must not be empty")
    w, h = spec.resolution
    ids = [a.actor_id for a in spec.actors]
    if len(set(ids)) != len(ids):
        raise FormatError("scenario: duplicate actor ids")
    for seg in spec.gaze_script:
        if seg.n_frames < 1:
            raise FormatError("scenario: segment n_frames must be >= 1")
        if seg.kind == "dwell" and (seg.target is None) == (seg.point is None):
            raise FormatError("scenario: dwell needs exactly one of target/point")
        if seg.kind == "saccade" and (seg.start is None or seg.end is None):
            raise FormatError("scenario: saccade needs start and end points")
        if seg.kind == "dwell" and seg.target is not None and seg.target not in ids:
            raise FormatError(f"scenario: unknown dwell target {seg.target!r}")
        if seg.kind not in ("dwell", "saccade", "dropout"):
            raise FormatError(f"scenario: unknown segment kind {seg.kind!r}")
    last = spec.frame_count - 1
    for a in spec.actors:
        for f in (0, last):
            cx, cy = a.center_at(f)
            if not (
                cx - a.size[0] / 2 >= 0
                and cx + a.size[0] / 2 <= w - 1
                and cy - a.size[1] / 2 >= 0
                and cy + a.size[1] / 2 <= h - 1
            ):
                raise FormatError(
                    f"scenario: actor {a.actor_id} leaves bounds at frame {f}"
                )


def load_scenario(source: str | Path | IO) -> ScenarioSpec:
    if isinstance(source, (str, Path)):
        try:
            text = Path(source).read_text("utf-8")
        except OSError as exc:
            raise FormatError(f"cannot read scenario file: {exc}") from None
    else:
        text = source.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"scenario file is not valid JSON: {exc}") from None
    try:
        actors = tuple(
            Actor(
                actor_id=str(a["id"]),
                label=str(a["label"]),
                shape=str(a["shape"]),
                size=(float(a["size"][0]), float(a["size"][1])),
                center=(float(a["center"][0]), float(a["center"][1])),
                velocity=tuple(a.get("velocity", [0.0, 0.0])),
                score=float(a.get("score", 0.9)),
            )
            for a in doc.get("actors", [])
        )
        segments = tuple(
            Segment(
                kind=str(s["kind"]),
                n_frames=int(s["n_frames"]),
                target=s.get("target"),
                point=tuple(s["point"]) if "point" in s else None,
                start=tuple(s["from"]) if "from" in s else None,
                end=tuple(s["to"]) if "to" in s else None,
            )
            for s in doc["gaze_script"]
        )
        spec = ScenarioSpec(
            seed=int(doc.get("seed", 0)),
            fps=float(doc["timeline"]["fps"]),
            resolution=tuple(doc["timeline"]["resolution"]),
            t0_us=int(doc["timeline"].get("t0_us", 0)),
            actors=actors,
            gaze_script=segments,
            jitter_px=int(doc.get("jitter_px", 0)),
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise FormatError(f"scenario file: {exc!r}") from None
    validate_spec(spec)
    return spec


def _dwell_pixel(
    spec: ScenarioSpec, seg: Segment, frame: int, rng: random.Random
) -> tuple[int, int]:
    if seg.target is not None:
        actor = next(a for a in spec.actors if a.actor_id == seg.target)
        cx, cy = actor.center_at(frame)
        base = (round(cx), round(cy))
        if spec.jitter_px:
            # jitter must keep the point strictly inside the actor
            for _ in range(20):
                cand = (
                    base[0] + rng.randint(-spec.jitter_px, spec.jitter_px),
                    base[1] + rng.randint(-spec.jitter_px, spec.jitter_px),
                )
                if actor.contains(cand, frame):
                    return cand
        return base
    px = seg.point
    if spec.jitter_px:
        w, h = spec.resolution
        px = (
            min(max(px[0] + rng.randint(-spec.jitter_px, spec.jitter_px), 0), w - 1),
            min(max(px[1] + rng.randint(-spec.jitter_px, spec.jitter_px), 0), h - 1),
        )
    return px


def _gaze_ticks(
    spec: ScenarioSpec, rng: random.Random
) -> list[tuple[int, tuple[int, int]]]:
    """Absolute-timestamped gaze pixels at the 100 Hz device rate."""
    fp = spec.frame_period_us
    ticks: list[tuple[int, tuple[int, int]]] = []
    frame_cursor = 0
    for seg in spec.gaze_script:
        t_start = frame_cursor * fp
        t_end = (frame_cursor + seg.n_frames) * fp
        k0 = math.ceil(t_start / GAZE_PERIOD_US)
        k1 = math.ceil(t_end / GAZE_PERIOD_US)
        if seg.kind == "dropout":
            frame_cursor += seg.n_frames
            continue
        n_ticks = k1 - k0
        for j, k in enumerate(range(k0, k1)):
            t = k * GAZE_PERIOD_US
            if seg.kind == "dwell":
                frame = min(frame_cursor + seg.n_frames - 1, t // fp)
                px = _dwell_pixel(spec, seg, int(frame), rng)
            else:  # saccade: first tick has already left the start point
                frac = (j + 1) / n_ticks
                px = (
                    round(seg.start[0] + (seg.end[0] - seg.start[0]) * frac),
                    round(seg.start[1] + (seg.end[1] - seg.start[1]) * frac),
                )
            ticks.append((spec.t0_us + t, px))
        frame_cursor += seg.n_frames
    return ticks


class _ActorRaster:
    """Rasterization cache keyed by actor position (static actors rasterize
    exactly once)."""

    def __init__(self, spec: ScenarioSpec):
        self.spec = spec
        self._cache: dict[tuple, tuple[np.ndarray, RleMask, tuple, int]] = {}

    def at(self, actor: Actor, frame: int):
        key = (actor.actor_id, actor.center_at(frame))
        entry = self._cache.get(key)
        if entry is None:
            bitmap = actor.rasterize(frame, self.spec.resolution)
            rle = encode_rle(bitmap)
            entry = (bitmap, rle, tight_bbox(bitmap), int(bitmap.sum()))
            self._cache[key] = entry
        return entry


def _render_gaze_log(spec: ScenarioSpec, ticks) -> str:
    w, h = spec.resolution
    lines = []
    for ts, (x, y) in ticks:
        gp = [(x + 0.5) / w, (y + 0.5) / h]
        lines.append(
            json.dumps(
                {"ts": ts, "type": "gp", "s": 0, "gp": gp},
                separators=(",", ":"),
            )
        )
    return "\n".join(lines) + "\n"


def _render_masks(spec: ScenarioSpec, raster: _ActorRaster) -> str:
    classes = {a.label: a.label for a in spec.actors}
    frames = []
    for i in range(spec.frame_count):
        instances = []
        for a in spec.actors:
            _, rle, bbox, _ = raster.at(a, i)
            instances.append(
                {
                    "id": a.actor_id,
                    "label": a.label,
                    "score": a.score,
                    "bbox": list(bbox),
                    "rle": {"size": list(rle.size), "counts": list(rle.counts)},
                }
            )
        frames.append({"frame": i, "instances": instances})
    doc = {
        "resolution": list(spec.resolution),
        "classes": dict(sorted(classes.items())),
        "frames": frames,
    }
    return json.dumps(doc, separators=(",", ":")) + "\n"


def _ground_truth(
    spec: ScenarioSpec, ticks, raster: _ActorRaster, config: PipelineConfig
) -> GroundTruth:
    fp = spec.frame_period_us
    w, h = spec.resolution
    tick_ts = [t for t, _ in ticks]

    targets: list[str] = []
    pixels: list[tuple[int, int] | None] = []
    for i in range(spec.frame_count):
        fts = spec.t0_us + round(i * 1_000_000 / spec.fps)
        idx = _nearest_tick(tick_ts, fts, config.max_staleness_us)
        if idx is None:
            targets.append("no_gaze")
            pixels.append(None)
            continue
        px = ticks[idx][1]
        px = (min(max(px[0], 0), w - 1), min(max(px[1], 0), h - 1))
        pixels.append(px)
        best = None
        for a in spec.actors:
            if a.score < config.score_threshold:
                continue
            bitmap, _, _, area = raster.at(a, i)
            if not bitmap[px[1], px[0]]:
                continue
            key = (-a.score, area, a.actor_id)
            if best is None or key < best[0]:
                best = (key, a.label)
        targets.append(best[1] if best else "off_target")

    fixations = oracle.fixations_from_targets(targets, pixels, config, fp)
    metrics = oracle.metrics_from_fixations(
        fixations,
        sorted({a.label for a in spec.actors}),
        spec.frame_count,
        fp,
    )
    return GroundTruth(
        per_frame_target=targets,
        fixations=fixations,
        metrics=metrics,
        config=config.as_dict(),
    )


def _nearest_tick(ts_list, t, staleness):
    if not ts_list:
        return None
    pos = bisect_left(ts_list, t)
    best = None
    for cand in (pos - 1, pos):
        if 0 <= cand < len(ts_list):
            if best is None or abs(ts_list[cand] - t) < abs(ts_list[best] - t):
                best = cand
    if best is None or abs(ts_list[best] - t) > staleness:
        return None
    return best


def generate(
    spec: ScenarioSpec,
    outdir: str | Path,
    config: PipelineConfig = PipelineConfig(),
) -> GroundTruth:
    """Write gaze.jsonl, masks.json, meta.json and ground_truth.json.

    Deterministic for a given spec (seed included).
    """
    validate_spec(spec)
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(spec.seed)

    ticks = _gaze_ticks(spec, rng)
    raster = _ActorRaster(spec)

    (outdir / "gaze.jsonl").write_text(_render_gaze_log(spec, ticks), "utf-8")
    (outdir / "masks.json").write_text(_render_masks(spec, raster), "utf-8")
    meta = {
        "fps": spec.fps,
        "frame_count": spec.frame_count,
        "t0_us": spec.t0_us,
        "resolution": list(spec.resolution),
    }
    (outdir / "meta.json").write_text(
        json.dumps(meta, sort_keys=True, separators=(",", ":")) + "\n", "utf-8"
    )

    gt = _ground_truth(spec, ticks, raster, config)
    gt_doc = {
        "config": gt.config,
        "per_frame_target": gt.per_frame_target,
        "fixations": gt.fixations,
        "metrics": gt.metrics,
    }
    (outdir / "ground_truth.json").write_text(
        json.dumps(gt_doc, sort_keys=True, separators=(",", ":")) + "\n", "utf-8"
    )
    return gt


def random_scenario(seed: int) -> ScenarioSpec:
    """A small random but valid scenario for differential testing."""
    rng = random.Random(seed)
    w, h = 320, 240
    labels = ["H1", "H2", "H3"]
    actors = []
    n_actors = rng.randint(1, 3)
    for i in range(n_actors):
        size = (rng.randint(36, 64), rng.randint(36, 64))
        margin_x = size[0] / 2 + 8
        margin_y = size[1] / 2 + 8
        actors.append(
            Actor(
                actor_id=f"a{i}",
                label=labels[i],
                shape=rng.choice(["rect", "ellipse"]),
                size=size,
                center=(
                    rng.uniform(margin_x, w - margin_x),
                    rng.uniform(margin_y, h - margin_y),
                ),
                velocity=(rng.uniform(-0.02, 0.02), rng.uniform(-0.02, 0.02)),
                score=rng.uniform(0.72, 0.98),
            )
        )

    def bg_point():
        return (rng.randint(4, w - 5), rng.randint(4, h - 5))

    segments: list[Segment] = []
    prev_point = bg_point()
    for _ in range(rng.randint(8, 14)):
        kind = rng.choice(["dwell_actor", "dwell_point", "saccade", "dropout"])
        if kind == "dwell_actor" and actors:
            target = rng.choice(actors)
            segments.append(
                Segment(
                    kind="dwell",
                    n_frames=rng.randint(4, 12),
                    target=target.actor_id,
                )
            )
            prev_point = (
                round(target.center[0]),
                round(target.center[1]),
            )
        elif kind == "dwell_point":
            pt = bg_point()
            segments.append(
                Segment(kind="dwell", n_frames=rng.randint(4, 12), point=pt)
            )
            prev_point = pt
        elif kind == "saccade":
            dest = bg_point()
            segments.append(
                Segment(
                    kind="saccade",
                    n_frames=rng.randint(2, 4),
                    start=prev_point,
                    end=dest,
                )
            )
            prev_point = dest
        else:
            segments.append(Segment(kind="dropout", n_frames=rng.randint(1, 3)))

    return ScenarioSpec(
        seed=seed,
        fps=25.0,
        resolution=(w, h),
        actors=tuple(actors),
        gaze_script=tuple(segments),
        jitter_px=rng.choice([0, 0, 2]),
    )
