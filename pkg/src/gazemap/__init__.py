"""gazemap: map wearable eye-tracker fixations onto per-frame AOI instance
masks and compute visual attention metrics."""

from .align import AlignmentPolicy, FrameTimeline, frame_timestamp, gaze_at_frame, to_pixel
from .config import PipelineConfig, load_config
from .errors import ConfigError, FormatError, GazemapError, InternalError
from .fixations import (
    Fixation,
    FrameHit,
    IdtConfig,
    RunConfig,
    TrialRecord,
    build_trial,
    classify_frames,
    detect_aoi_fixations,
    detect_offtarget_fixations,
)
from .gaze import (
    GazeSample,
    GazeStream,
    StreamStats,
    gaze_track,
    parse_gaze_stream,
    serialize_gaze_stream,
    stream_stats,
)
from .masks import (
    FrameMasks,
    Instance,
    MaskSet,
    RleMask,
    decode_rle,
    dilate_instance,
    encode_rle,
    hit_test,
    load_maskset,
    point_in_instance,
    save_maskset,
    validate_maskset,
)
from .metrics import TrialMetrics, ValidationReport, compute_metrics, dwell_time, validate
from .pipeline import PipelineResult, run_map

__version__ = "0.1.0"
