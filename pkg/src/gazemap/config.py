"""Run configuration shared by the CLI and the pipeline.

Every key has a built-in default; the optional config file may override any
subset.  Unknown keys are rejected so typos never silently fall back to a
default.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import IO

from .align import DEFAULT_MAX_STALENESS_US, AlignmentPolicy
from .errors import ConfigError
from .fixations import DURATION_INCLUSIVE, DURATION_SPAN, IdtConfig, RunConfig
from .masks import DEFAULT_SCORE_THRESHOLD, TIE_BREAK_SCORE_AREA_ID


@dataclass(frozen=True)
class PipelineConfig:
    score_threshold: float = DEFAULT_SCORE_THRESHOLD
    tie_break: str = TIE_BREAK_SCORE_AREA_ID
    min_consecutive: int = 7
    gap_tolerance: int = 0
    duration_convention: str = DURATION_INCLUSIVE
    dispersion_px: float = 50.0
    min_duration_ms: float = 280.0
    dilation_radius: int = 0
    max_staleness_us: int = DEFAULT_MAX_STALENESS_US

    def __post_init__(self):
        if not (0.0 <= self.score_threshold <= 1.0):
            raise ConfigError("score_threshold must be in [0, 1]")
        if self.tie_break != TIE_BREAK_SCORE_AREA_ID:
            raise ConfigError(f"unknown tie_break {self.tie_break!r}")
        if self.min_consecutive < 1:
            raise ConfigError("min_consecutive must be >= 1")
        if self.gap_tolerance < 0:
            raise ConfigError("gap_tolerance must be >= 0")
        if self.duration_convention not in (DURATION_INCLUSIVE, DURATION_SPAN):
            raise ConfigError(
                f"unknown duration_convention {self.duration_convention!r}"
            )
        if self.dispersion_px <= 0:
            raise ConfigError("dispersion_px must be > 0")
        if self.min_duration_ms <= 0:
            raise ConfigError("min_duration_ms must be > 0")
        if self.dilation_radius < 0:
            raise ConfigError("dilation_radius must be >= 0")
        if self.max_staleness_us <= 0:
            raise ConfigError("max_staleness_us must be > 0")

    @property
    def run_config(self) -> RunConfig:
        return RunConfig(
            min_consecutive=self.min_consecutive,
            gap_tolerance_frames=self.gap_tolerance,
            duration_convention=self.duration_convention,
        )

    @property
    def idt_config(self) -> IdtConfig:
        return IdtConfig(
            dispersion_px=self.dispersion_px,
            min_duration_ms=self.min_duration_ms,
        )

    @property
    def alignment_policy(self) -> AlignmentPolicy:
        return AlignmentPolicy(max_staleness_us=self.max_staleness_us)

    def as_dict(self) -> dict:
        return asdict(self)


def load_config(source: str | Path | IO | None) -> PipelineConfig:
    """Load a config file, or the defaults when source is None."""
    if source is None:
        return PipelineConfig()
    if isinstance(source, (str, Path)):
        try:
            text = Path(source).read_text("utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
    else:
        text = source.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config file: top level must be an object")

    known = set(PipelineConfig.__dataclass_fields__)
    unknown = sorted(set(doc) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    try:
        return PipelineConfig(**doc)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
