"""Emission of the mask exchange file format.

Schema (the contract boundary with the consumer):

    {
      "resolution": [width, height],
      "classes": {label: description, ...},
      "frames": [
        {"frame": int,
         "instances": [
           {"id": str, "label": str, "score": float,
            "bbox": [x0, y0, x1, y1],
            "rle": {"size": [h, w], "counts": [..]}}]}]
    }

``bbox`` is the tight half-open box of the mask; ``rle`` is canonical
column-major run-length coding (see :mod:`maskproducer.rle`).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import rle
from .errors import InputError


@dataclass(frozen=True)
class MaskInstance:
    """One emitted instance: a labelled, scored bitmap."""

    instance_id: str
    label: str
    score: float
    bitmap: np.ndarray

    def to_json(self) -> dict:
        size, counts = rle.encode(self.bitmap)
        return {
            "id": self.instance_id,
            "label": self.label,
            "score": self.score,
            "bbox": list(rle.tight_bbox(self.bitmap)),
            "rle": {"size": list(size), "counts": list(counts)},
        }


def build_document(
    resolution: tuple[int, int],
    classes: dict[str, str],
    frames: dict[int, list[MaskInstance]],
) -> dict:
    """Assemble the exchange document; checks the invariants the consumer
    will re-validate so problems fail fast on the producing side."""
    w, h = resolution
    if w <= 0 or h <= 0:
        raise InputError("resolution must be positive")
    for idx, instances in frames.items():
        for inst in instances:
            if inst.bitmap.shape != (h, w):
                raise InputError(
                    f"frame {idx}, instance {inst.instance_id}: bitmap shape "
                    f"{inst.bitmap.shape} != resolution ({h}, {w})"
                )
            if not 0.0 <= inst.score <= 1.0:
                raise InputError(
                    f"frame {idx}, instance {inst.instance_id}: score "
                    f"{inst.score} outside [0, 1]"
                )
            if inst.label not in classes:
                raise InputError(
                    f"frame {idx}, instance {inst.instance_id}: label "
                    f"{inst.label!r} not in class table"
                )
    return {
        "resolution": [w, h],
        "classes": dict(sorted(classes.items())),
        "frames": [
            {
                "frame": idx,
                "instances": [inst.to_json() for inst in frames[idx]],
            }
            for idx in sorted(frames)
        ],
    }


def save_document(doc: dict, path: str | Path) -> None:
    """Write deterministically (byte-stable for equal documents)."""
    Path(path).write_text(json.dumps(doc, separators=(",", ":")) + "\n", "utf-8")
