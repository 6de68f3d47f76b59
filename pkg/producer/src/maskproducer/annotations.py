"""Polygon annotation documents and their conversion to the exchange format.

The accepted document is a JSON object:

    {
      "resolution": [width, height],
      "images": [
        {"frame": int,
         "instances": [
           {"label": str, "polygon": [[x, y], ...]}]}]
    }

Manual annotations are authoritative, so converted instances carry score 1.0.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .config import RESERVED_LABELS
from .errors import InputError
from .exchange import MaskInstance, build_document
from .rasterize import rasterize_polygon

log = logging.getLogger(__name__)

Polygon = list[tuple[float, float]]


@dataclass(frozen=True)
class AnnotationRecord:
    """All annotated instances for one image/frame."""

    frame: int
    instances: tuple[tuple[str, tuple[tuple[float, float], ...]], ...]
    # each instance is (label, polygon-vertices)


def load_annotations(path: str | Path) -> tuple[tuple[int, int], list[AnnotationRecord]]:
    """Parse an annotation document; returns (resolution, records)."""
    try:
        doc = json.loads(Path(path).read_text("utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read annotations: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"annotations are not valid JSON: {exc}") from None
    return parse_annotations(doc)


def parse_annotations(doc: dict) -> tuple[tuple[int, int], list[AnnotationRecord]]:
    if not isinstance(doc, dict):
        raise InputError("annotations: top level must be an object")
    res = doc.get("resolution")
    if (
        not isinstance(res, list)
        or len(res) != 2
        or not all(isinstance(v, int) and v > 0 for v in res)
    ):
        raise InputError("annotations: resolution must be [width, height]")
    w, h = res
    records: list[AnnotationRecord] = []
    seen: set[int] = set()
    for img in doc.get("images", []):
        frame = img.get("frame")
        if not isinstance(frame, int) or frame < 0:
            raise InputError("annotations: frame must be a non-negative int")
        if frame in seen:
            raise InputError(f"annotations: duplicate frame {frame}")
        seen.add(frame)
        instances = []
        for inst in img.get("instances", []):
            label = inst.get("label")
            poly = inst.get("polygon")
            if not isinstance(label, str) or not label:
                raise InputError(f"frame {frame}: instance label missing")
            if label in RESERVED_LABELS:
                raise InputError(f"frame {frame}: label {label!r} is reserved")
            if not isinstance(poly, list):
                raise InputError(f"frame {frame}: polygon must be an array")
            vertices = []
            for pt in poly:
                if not isinstance(pt, list) or len(pt) != 2:
                    raise InputError(f"frame {frame}: polygon vertex malformed")
                x, y = float(pt[0]), float(pt[1])
                if not (0.0 <= x <= w and 0.0 <= y <= h):
                    raise InputError(
                        f"frame {frame}: vertex ({x}, {y}) outside image bounds"
                    )
                vertices.append((x, y))
            instances.append((label, tuple(vertices)))
        records.append(AnnotationRecord(frame, tuple(instances)))
    return (w, h), records


def convert_annotations(
    resolution: tuple[int, int], records: list[AnnotationRecord]
) -> dict:
    """Rasterize every polygon and assemble an exchange document.

    Degenerate polygons (fewer than 3 vertices or zero covered pixels) are
    skipped with a warning rather than failing the whole document.
    """
    w, h = resolution
    classes: dict[str, str] = {}
    frames: dict[int, list[MaskInstance]] = {}
    for rec in records:
        emitted: list[MaskInstance] = []
        for k, (label, vertices) in enumerate(rec.instances):
            bitmap = rasterize_polygon(list(vertices), w, h)
            if not bitmap.any():
                log.warning(
                    "frame %d, instance %d (%s): degenerate polygon skipped",
                    rec.frame, k, label,
                )
                continue
            classes.setdefault(label, label)
            emitted.append(
                MaskInstance(f"f{rec.frame}_i{k}", label, 1.0, bitmap)
            )
        frames[rec.frame] = emitted
    return build_document(resolution, classes, frames)
