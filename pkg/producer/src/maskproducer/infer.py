"""Frame inference against a pluggable instance-segmentation model.

The model interface is a single ``predict`` method so any backend (a
torchvision Mask R-CNN, a remote service, or a deterministic fixture model
in tests) can drive the same emission path.  Class mapping, score flooring,
and exchange-format assembly all live here, outside the model.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol

import numpy as np

from .config import ProducerConfig
from .errors import InputError, ModelError
from .exchange import MaskInstance, build_document


@dataclass(frozen=True)
class Detection:
    """One raw model detection, in model-vocabulary class names."""

    class_name: str
    score: float
    bitmap: np.ndarray


class SegmentationModel(Protocol):
    def predict(self, image: np.ndarray) -> list[Detection]:
        """Return all detections for one H x W (or H x W x C) image."""
        ...


class ThresholdBlobModel:
    """Deterministic fixture model: connected bright regions become
    detections of a single configured class.  Useful for tests and smoke
    runs; not a substitute for a trained network."""

    def __init__(self, class_name: str = "machinery", threshold: float = 0.5):
        self.class_name = class_name
        self.threshold = threshold

    def predict(self, image: np.ndarray) -> list[Detection]:
        gray = image.astype(float)
        if gray.ndim == 3:
            gray = gray.mean(axis=2)
        if gray.max() > 1.0:
            gray = gray / 255.0
        from scipy import ndimage

        labelled, n = ndimage.label(gray > self.threshold)
        out = []
        for k in range(1, n + 1):
            bitmap = labelled == k
            mean = float(gray[bitmap].mean())
            out.append(Detection(self.class_name, min(mean, 1.0), bitmap))
        return out


def load_model(model_id: str) -> SegmentationModel:
    """Instantiate the configured backend.  Torchvision backends are
    imported lazily so the package works without torch installed."""
    if model_id == "threshold_blob":
        return ThresholdBlobModel()
    if model_id.startswith("maskrcnn"):
        try:
            return _TorchvisionMaskRCNN()
        except ImportError as exc:
            raise ModelError(
                f"model {model_id!r} needs torchvision (pip install "
                f"maskproducer[inference]): {exc}"
            ) from None
    raise ModelError(f"unknown model identifier {model_id!r}")


class _TorchvisionMaskRCNN:
    def __init__(self):
        import torch
        import torchvision

        weights = torchvision.models.detection.MaskRCNN_ResNet50_FPN_Weights.DEFAULT
        self._categories = weights.meta["categories"]
        self._model = torchvision.models.detection.maskrcnn_resnet50_fpn(
            weights=weights
        ).eval()
        self._torch = torch

    def predict(self, image: np.ndarray) -> list[Detection]:
        torch = self._torch
        arr = image.astype(np.float32)
        if arr.max() > 1.0:
            arr = arr / 255.0
        if arr.ndim == 2:
            arr = np.stack([arr] * 3, axis=-1)
        tensor = torch.from_numpy(arr).permute(2, 0, 1)
        with torch.no_grad():
            result = self._model([tensor])[0]
        out = []
        for label, score, mask in zip(
            result["labels"], result["scores"], result["masks"]
        ):
            out.append(
                Detection(
                    self._categories[int(label)],
                    float(score),
                    mask[0].numpy() > 0.5,
                )
            )
        return out


def infer_frames(
    frames: Iterable[tuple[int, np.ndarray]],
    config: ProducerConfig,
    model: SegmentationModel,
) -> dict:
    """Run the model over (frame_index, image) pairs and assemble an
    exchange document.  Every processed frame appears in the output, with an
    empty instance list when nothing survives mapping and flooring."""
    resolution: tuple[int, int] | None = None
    emitted: dict[int, list[MaskInstance]] = {}
    for idx, image in frames:
        h, w = image.shape[:2]
        if resolution is None:
            resolution = (w, h)
        elif resolution != (w, h):
            raise InputError(
                f"frame {idx}: resolution ({w}, {h}) differs from first "
                f"frame {resolution}"
            )
        instances: list[MaskInstance] = []
        for det in model.predict(image):
            label = config.class_map.get(det.class_name)
            if label is None or det.score < config.score_floor:
                continue
            if not det.bitmap.any():
                continue
            instances.append(
                MaskInstance(
                    f"f{idx}_i{len(instances)}", label, round(det.score, 6),
                    np.asarray(det.bitmap, dtype=bool),
                )
            )
        emitted[idx] = instances
    if resolution is None:
        raise InputError("no frames to infer")
    classes = {label: _describe(label, config) for label in config.labels}
    return build_document(resolution, classes, emitted)


def _describe(label: str, config: ProducerConfig) -> str:
    raws = sorted(r for r, lbl in config.class_map.items() if lbl == label)
    return "model classes: " + ", ".join(raws)


def infer_video(
    image_paths: list[str | Path],
    config: ProducerConfig,
    model: SegmentationModel | None = None,
) -> dict:
    """Infer over image files in order, honouring ``frame_stride``.  Frame
    indices are the positions in the input list."""
    if model is None:
        model = load_model(config.model_id)

    def frames():
        try:
            from PIL import Image
        except ImportError as exc:
            raise ModelError(f"reading image files needs pillow: {exc}") from None
        for idx, path in enumerate(image_paths):
            if idx % config.frame_stride:
                continue
            try:
                with Image.open(path) as img:
                    yield idx, np.asarray(img)
            except OSError as exc:
                raise InputError(f"cannot decode frame {idx} ({path}): {exc}") from None

    return infer_frames(frames(), config, model)
