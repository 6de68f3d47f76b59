"""Per-frame instance masks: RLE codec, validation and point-membership queries.

RLE convention (normative for the exchange format): column-major scan order,
counts alternate 0-run / 1-run starting with the 0-run, which may be zero.
Bounding boxes are half-open pixel rectangles (x0, y0, x1, y1).
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO

import numpy as np
from scipy import ndimage

from .errors import FormatError, GazemapError

RESERVED_LABELS = ("off_target", "no_gaze")

#: default detector operating point for hit testing
DEFAULT_SCORE_THRESHOLD = 0.7

#: the single supported overlap policy: highest score, then smaller mask
#: area, then lexicographic instance id
TIE_BREAK_SCORE_AREA_ID = "score_area_id"


@dataclass(eq=False)
class RleMask:
    size: tuple[int, int]  # (height, width)
    counts: tuple[int, ...]
    _cum: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RleMask)
            and self.size == other.size
            and self.counts == other.counts
        )

    @property
    def area(self) -> int:
        return sum(self.counts[1::2])

    def cumulative(self) -> np.ndarray:
        if self._cum is None:
            self._cum = np.cumsum(np.asarray(self.counts, dtype=np.int64))
        return self._cum


@dataclass
class Instance:
    instance_id: str
    label: str
    score: float
    mask: RleMask
    bbox: tuple[int, int, int, int]

    @property
    def area(self) -> int:
        return self.mask.area


@dataclass
class FrameMasks:
    frame_index: int
    instances: list[Instance]


@dataclass
class MaskSet:
    resolution: tuple[int, int]  # (width, height)
    frames: dict[int, FrameMasks]
    class_table: dict[str, str]


def decode_rle(mask: RleMask, where: str = "mask") -> np.ndarray:
    """Decode to an height x width boolean bitmap (column-major runs)."""
    h, w = mask.size
    counts = np.asarray(mask.counts, dtype=np.int64)
    if counts.size and counts.min() < 0:
        raise FormatError(f"{where}: negative run length")
    if counts.sum() != h * w:
        raise FormatError(
            f"{where}: RLE counts sum to {counts.sum()}, expected {h * w}"
        )
    pattern = np.zeros(counts.size, dtype=bool)
    pattern[1::2] = True
    flat = np.repeat(pattern, counts)
    return flat.reshape(w, h).T


def encode_rle(bitmap: np.ndarray) -> RleMask:
    """Encode a boolean bitmap to canonical RLE (leading 0-run, no empty
    interior runs)."""
    bitmap = np.asarray(bitmap, dtype=bool)
    if bitmap.ndim != 2:
        raise ValueError("bitmap must be 2-D")
    h, w = bitmap.shape
    flat = bitmap.T.ravel()
    if flat.size == 0:
        return RleMask(size=(h, w), counts=(0,))
    boundaries = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    edges = np.concatenate(([0], boundaries, [flat.size]))
    runs = np.diff(edges).tolist()
    if flat[0]:
        runs.insert(0, 0)
    return RleMask(size=(h, w), counts=tuple(int(r) for r in runs))


def tight_bbox(bitmap: np.ndarray) -> tuple[int, int, int, int]:
    ys, xs = np.nonzero(bitmap)
    if ys.size == 0:
        return (0, 0, 0, 0)
    return (int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1)


def rle_bbox(mask: RleMask) -> tuple[int, int, int, int]:
    """Tight bounding box computed directly from the runs (no decode)."""
    h, _ = mask.size
    x0 = y0 = None
    x1 = y1 = -1
    pos = 0
    one = False
    for c in mask.counts:
        if one and c > 0:
            s, e = pos, pos + c - 1
            xs, xe = s // h, e // h
            x0 = xs if x0 is None else min(x0, xs)
            x1 = max(x1, xe)
            if xs == xe:
                y0 = s % h if y0 is None else min(y0, s % h)
                y1 = max(y1, e % h)
            else:
                # a run crossing a column boundary covers y=0 and y=h-1
                y0 = 0
                y1 = h - 1
        pos += c
        one = not one
    if x0 is None:
        return (0, 0, 0, 0)
    return (x0, y0, x1 + 1, y1 + 1)


def make_instance(
    instance_id: str, label: str, score: float, bitmap: np.ndarray
) -> Instance:
    """Build an Instance from a bitmap, computing canonical RLE and bbox."""
    return Instance(
        instance_id=instance_id,
        label=label,
        score=score,
        mask=encode_rle(bitmap),
        bbox=tight_bbox(bitmap),
    )


def point_in_instance(p: tuple[int, int], inst: Instance) -> bool:
    """True iff the mask pixel at p is set; the bbox is only a fast path."""
    x, y = p
    h, w = inst.mask.size
    if not (0 <= x < w and 0 <= y < h):
        raise GazemapError(f"point {p} outside {w}x{h} mask bounds")
    x0, y0, x1, y1 = inst.bbox
    if not (x0 <= x < x1 and y0 <= y < y1):
        return False
    flat = x * h + y  # column-major flat index
    run = bisect_right(inst.mask.cumulative(), flat)
    return run % 2 == 1


def hit_test(
    p: tuple[int, int],
    fm: FrameMasks | None,
    score_threshold: float = DEFAULT_SCORE_THRESHOLD,
    tie_break: str = TIE_BREAK_SCORE_AREA_ID,
) -> str | None:
    """Label of the winning instance containing p, or None.

    Overlaps resolve by highest score, then smaller mask area, then
    lexicographic instance id; the result never depends on instance order.
    """
    if tie_break != TIE_BREAK_SCORE_AREA_ID:
        raise GazemapError(f"unknown tie-break policy {tie_break!r}")
    if fm is None:
        return None
    winner: Instance | None = None
    for inst in fm.instances:
        if inst.score < score_threshold:
            continue
        if not point_in_instance(p, inst):
            continue
        if winner is None or (
            (-inst.score, inst.area, inst.instance_id)
            < (-winner.score, winner.area, winner.instance_id)
        ):
            winner = inst
    return winner.label if winner is not None else None


def dilate_instance(inst: Instance, radius: int) -> Instance:
    """Dilate the mask by a square structuring element; bbox recomputed."""
    if radius < 0:
        raise GazemapError("dilation radius must be >= 0")
    if radius == 0:
        return inst
    bitmap = decode_rle(inst.mask)
    grown = ndimage.binary_dilation(
        bitmap, structure=np.ones((2 * radius + 1, 2 * radius + 1), dtype=bool)
    )
    return Instance(
        instance_id=inst.instance_id,
        label=inst.label,
        score=inst.score,
        mask=encode_rle(grown),
        bbox=tight_bbox(grown),
    )


def dilate_maskset(ms: MaskSet, radius: int) -> MaskSet:
    if radius == 0:
        return ms
    frames = {
        idx: FrameMasks(idx, [dilate_instance(i, radius) for i in fm.instances])
        for idx, fm in ms.frames.items()
    }
    return MaskSet(resolution=ms.resolution, frames=frames, class_table=dict(ms.class_table))


# ---------------------------------------------------------------------------
# exchange file


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise FormatError(f"{where}: missing key {key!r}")
    return obj[key]


def load_maskset(source: str | Path | IO) -> MaskSet:
    """Parse the mask exchange file. Format errors are fatal and name the
    offending frame/instance."""
    if isinstance(source, (str, Path)):
        try:
            text = Path(source).read_text("utf-8")
        except OSError as exc:
            raise FormatError(f"cannot read mask file: {exc}") from None
    else:
        text = source.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"mask file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise FormatError("mask file: top level must be an object")

    res = _require(doc, "resolution", "mask file")
    if (
        not isinstance(res, list)
        or len(res) != 2
        or not all(isinstance(v, int) and v > 0 for v in res)
    ):
        raise FormatError("mask file: resolution must be [width, height] of positive ints")
    classes = _require(doc, "classes", "mask file")
    if not isinstance(classes, dict):
        raise FormatError("mask file: classes must be a map label -> description")

    frames: dict[int, FrameMasks] = {}
    raw_frames = _require(doc, "frames", "mask file")
    if not isinstance(raw_frames, list):
        raise FormatError("mask file: frames must be an array")
    for fi, fobj in enumerate(raw_frames):
        where = f"frame entry {fi}"
        idx = _require(fobj, "frame", where)
        if not isinstance(idx, int) or idx < 0:
            raise FormatError(f"{where}: frame index must be a non-negative int")
        if idx in frames:
            raise FormatError(f"{where}: duplicate frame index {idx}")
        instances: list[Instance] = []
        for ii, iobj in enumerate(_require(fobj, "instances", where)):
            iwhere = f"frame {idx}, instance {ii}"
            rle = _require(iobj, "rle", iwhere)
            size = _require(rle, "size", iwhere)
            counts = _require(rle, "counts", iwhere)
            if (
                not isinstance(size, list)
                or len(size) != 2
                or not all(isinstance(v, int) for v in size)
            ):
                raise FormatError(f"{iwhere}: rle size must be [height, width]")
            if not isinstance(counts, list) or not all(
                isinstance(c, int) for c in counts
            ):
                raise FormatError(f"{iwhere}: rle counts must be integers")
            bbox = _require(iobj, "bbox", iwhere)
            if not isinstance(bbox, list) or len(bbox) != 4:
                raise FormatError(f"{iwhere}: bbox must be [x0,y0,x1,y1]")
            instances.append(
                Instance(
                    instance_id=str(_require(iobj, "id", iwhere)),
                    label=str(_require(iobj, "label", iwhere)),
                    score=float(_require(iobj, "score", iwhere)),
                    mask=RleMask(size=(size[0], size[1]), counts=tuple(counts)),
                    bbox=tuple(int(v) for v in bbox),
                )
            )
        frames[idx] = FrameMasks(frame_index=idx, instances=instances)

    return MaskSet(
        resolution=(res[0], res[1]),
        frames=frames,
        class_table={str(k): str(v) for k, v in classes.items()},
    )


def save_maskset(ms: MaskSet, sink: str | Path | IO | None = None) -> str:
    """Serialize deterministically (byte-stable for equal MaskSets)."""
    doc = {
        "resolution": list(ms.resolution),
        "classes": dict(sorted(ms.class_table.items())),
        "frames": [
            {
                "frame": idx,
                "instances": [
                    {
                        "id": inst.instance_id,
                        "label": inst.label,
                        "score": inst.score,
                        "bbox": list(inst.bbox),
                        "rle": {
                            "size": list(inst.mask.size),
                            "counts": list(inst.mask.counts),
                        },
                    }
                    for inst in ms.frames[idx].instances
                ],
            }
            for idx in sorted(ms.frames)
        ],
    }
    text = json.dumps(doc, separators=(",", ":")) + "\n"
    if sink is not None:
        if isinstance(sink, (str, Path)):
            Path(sink).write_text(text, "utf-8")
        else:
            sink.write(text)
    return text


def validate_maskset(ms: MaskSet) -> list[str]:
    """Check every type invariant; returns one message per violation."""
    problems: list[str] = []
    w, h = ms.resolution
    if w <= 0 or h <= 0:
        problems.append("resolution must be positive")
        return problems
    for label in ms.class_table:
        if label in RESERVED_LABELS:
            problems.append(f"class label {label!r} is reserved")
    for idx in sorted(ms.frames):
        fm = ms.frames[idx]
        if fm.frame_index != idx:
            problems.append(f"frame {idx}: index mismatch ({fm.frame_index})")
        for ii, inst in enumerate(fm.instances):
            where = f"frame {idx}, instance {ii} ({inst.instance_id})"
            if inst.mask.size != (h, w):
                problems.append(
                    f"{where}: mask size {inst.mask.size} != resolution ({h}, {w})"
                )
                continue
            if not (0.0 <= inst.score <= 1.0):
                problems.append(f"{where}: score {inst.score} outside [0,1]")
            if inst.label in RESERVED_LABELS:
                problems.append(f"{where}: label {inst.label!r} is reserved")
            counts = inst.mask.counts
            if any(c < 0 for c in counts):
                problems.append(f"{where}: negative run length")
                continue
            if sum(counts) != h * w:
                problems.append(
                    f"{where}: RLE counts sum {sum(counts)} != {h * w}"
                )
                continue
            if any(c == 0 for c in counts[1:]):
                problems.append(f"{where}: non-canonical RLE (empty interior run)")
            expected_bbox = rle_bbox(inst.mask)
            if tuple(inst.bbox) != expected_bbox:
                problems.append(
                    f"{where}: bbox {inst.bbox} is not the tight box {expected_bbox}"
                )
    return problems
