"""Producer configuration."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InputError

RESERVED_LABELS = frozenset({"off_target", "no_gaze"})


@dataclass(frozen=True)
class TrainableHeadSpec:
    """Descriptive record of which layer groups are retrained when the
    segmentation model is fine-tuned.  Recorded as configuration metadata
    only; this package never trains."""

    backbone_layers: int = 8
    rpn_layers: int = 3
    mask_head_layers: int = 16

    @property
    def total(self) -> int:
        return self.backbone_layers + self.rpn_layers + self.mask_head_layers


@dataclass(frozen=True)
class ProducerConfig:
    """Settings for inference and conversion.

    ``class_map`` maps raw model class names (e.g. ``"machinery"``) to the
    AOI labels used downstream (e.g. ``"H1"``).  Detections whose class is
    not in the map are dropped.
    """

    class_map: dict[str, str] = field(
        default_factory=lambda: {
            "machinery": "H1",
            "cable": "H2",
            "generator": "H3",
        }
    )
    score_floor: float = 0.5
    frame_stride: int = 1
    model_id: str = "maskrcnn_resnet101_fpn"
    trainable_head: TrainableHeadSpec = field(default_factory=TrainableHeadSpec)

    def __post_init__(self) -> None:
        if not 0.0 <= self.score_floor <= 1.0:
            raise InputError(f"score_floor {self.score_floor} outside [0, 1]")
        if self.frame_stride < 1:
            raise InputError("frame_stride must be >= 1")
        if not self.class_map:
            raise InputError("class_map must not be empty")
        for raw, label in self.class_map.items():
            if not label or not isinstance(label, str):
                raise InputError(f"class_map[{raw!r}] must be a non-empty label")
            if label in RESERVED_LABELS:
                raise InputError(f"class_map[{raw!r}] uses reserved label {label!r}")

    @property
    def labels(self) -> tuple[str, ...]:
        """Sorted, de-duplicated AOI labels the producer may emit."""
        return tuple(sorted(set(self.class_map.values())))


def load_config(path: str | Path) -> ProducerConfig:
    """Load a JSON config file; unknown keys are rejected."""
    try:
        doc = json.loads(Path(path).read_text("utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"config is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise InputError("config: top level must be an object")
    known = {"class_map", "score_floor", "frame_stride", "model_id", "trainable_head"}
    unknown = set(doc) - known
    if unknown:
        raise InputError(f"config: unknown keys {sorted(unknown)}")
    if "trainable_head" in doc:
        doc["trainable_head"] = TrainableHeadSpec(**doc["trainable_head"])
    try:
        return ProducerConfig(**doc)
    except TypeError as exc:
        raise InputError(f"config: {exc}") from None
