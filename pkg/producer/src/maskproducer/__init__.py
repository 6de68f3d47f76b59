"""maskproducer: emit mask-exchange files from video frames, polygon
annotations, and augmentation."""

from .annotations import AnnotationRecord, convert_annotations, load_annotations
from .augment import AugmentedItem, Variant, augment, make_variants
from .config import ProducerConfig, TrainableHeadSpec, load_config
from .errors import InputError, ModelError, ProducerError
from .exchange import MaskInstance, build_document, save_document
from .infer import Detection, SegmentationModel, ThresholdBlobModel, infer_frames, infer_video, load_model
from .rasterize import rasterize_polygon

__version__ = "0.1.0"

__all__ = [
    "AnnotationRecord",
    "AugmentedItem",
    "Detection",
    "InputError",
    "MaskInstance",
    "ModelError",
    "ProducerConfig",
    "ProducerError",
    "SegmentationModel",
    "ThresholdBlobModel",
    "TrainableHeadSpec",
    "Variant",
    "augment",
    "build_document",
    "convert_annotations",
    "infer_frames",
    "infer_video",
    "load_annotations",
    "load_config",
    "load_model",
    "make_variants",
    "rasterize_polygon",
    "save_document",
]
