"""Visual attention metrics (dwell time, fixation count, on-target ratio)
and ground-truth validation reports.

The on-target fixation ratio is reported truncated to two decimals (not
rounded); the exact value is retained alongside.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from io import StringIO
from pathlib import Path
from typing import IO, Iterable, Sequence

from .errors import FormatError
from .fixations import OFF_TARGET, Fixation, TrialRecord


@dataclass(frozen=True)
class TrialMetrics:
    trial_duration_ms: int
    dwell_ms: dict[str, int]
    fixation_count: int
    on_target_count: int
    tfr_exact: float
    tfr_reported: float


@dataclass(frozen=True)
class ValidationRow:
    frame_index: int
    sys_px: tuple[int, int]
    sys_label: str
    gt_px: tuple[int, int]
    gt_label: str
    match: bool
    remark: str = ""


@dataclass(frozen=True)
class ValidationReport:
    rows: tuple[ValidationRow, ...]
    accuracy: float
    px_deviation_mean: float
    px_deviation_max: float


def dwell_time(fixations: Sequence[Fixation], aoi: str) -> int:
    """Total fixation duration on one AOI, in milliseconds."""
    return sum(f.duration_us for f in fixations if f.target == aoi) // 1000


def truncate2(x: float) -> float:
    return math.floor(x * 100) / 100


def compute_metrics(
    trial: TrialRecord, labels: Iterable[str] = ()
) -> TrialMetrics:
    """Dwell per AOI, total and on-target fixation counts, and TFR."""
    dwell: dict[str, int] = {label: 0 for label in labels}
    on_target = 0
    for f in trial.fixations:
        if f.target == OFF_TARGET:
            continue
        on_target += 1
        dwell[f.target] = dwell.get(f.target, 0) + f.duration_us // 1000
    fc = len(trial.fixations)
    if fc:
        exact = on_target / fc
        reported = (on_target * 100 // fc) / 100
    else:
        exact = reported = 0.0
    return TrialMetrics(
        trial_duration_ms=trial.trial_duration_us // 1000,
        dwell_ms=dwell,
        fixation_count=fc,
        on_target_count=on_target,
        tfr_exact=exact,
        tfr_reported=reported,
    )


# ---------------------------------------------------------------------------
# validation against manually obtained ground truth


def _load_rows(source: str | Path | IO | list) -> list[dict]:
    if isinstance(source, list):
        doc = source
    else:
        if isinstance(source, (str, Path)):
            try:
                text = Path(source).read_text("utf-8")
            except OSError as exc:
                raise FormatError(f"cannot read rows file: {exc}") from None
        else:
            text = source.read()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"rows file is not valid JSON: {exc}") from None
    if not isinstance(doc, list):
        raise FormatError("rows file: top level must be an array")
    rows = []
    for i, obj in enumerate(doc):
        try:
            rows.append(
                {
                    "frame": int(obj["frame"]),
                    "px": (int(obj["px"][0]), int(obj["px"][1])),
                    "label": str(obj["label"]),
                    "remark": str(obj.get("remark", "")),
                }
            )
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise FormatError(f"rows file, entry {i}: {exc!r}") from None
    return rows


def validate(
    sys_rows: str | Path | IO | list, gt_rows: str | Path | IO | list
) -> ValidationReport:
    """Row-by-row comparison of system fixation labels against ground truth."""
    sys_by_frame = {r["frame"]: r for r in _load_rows(sys_rows)}
    gt_by_frame = {r["frame"]: r for r in _load_rows(gt_rows)}
    if sys_by_frame.keys() != gt_by_frame.keys():
        missing = sorted(sys_by_frame.keys() ^ gt_by_frame.keys())
        raise FormatError(f"frame keys differ between system and ground truth: {missing}")
    if not sys_by_frame:
        raise FormatError("validation requires at least one row")

    rows: list[ValidationRow] = []
    deviations: list[float] = []
    for frame in sorted(sys_by_frame):
        s, g = sys_by_frame[frame], gt_by_frame[frame]
        dev = math.hypot(s["px"][0] - g["px"][0], s["px"][1] - g["px"][1])
        deviations.append(dev)
        rows.append(
            ValidationRow(
                frame_index=frame,
                sys_px=s["px"],
                sys_label=s["label"],
                gt_px=g["px"],
                gt_label=g["label"],
                match=s["label"] == g["label"],
                remark=g["remark"] or s["remark"],
            )
        )
    matches = sum(r.match for r in rows)
    return ValidationReport(
        rows=tuple(rows),
        accuracy=matches / len(rows),
        px_deviation_mean=sum(deviations) / len(deviations),
        px_deviation_max=max(deviations),
    )


# ---------------------------------------------------------------------------
# report emission


def _fixation_obj(f: Fixation) -> dict:
    return {
        "target": f.target,
        "first_frame": f.first_frame,
        "last_frame": f.last_frame,
        "start_us": f.start_us,
        "end_us": f.end_us,
        "duration_us": f.duration_us,
        "centroid_px": [round(f.centroid_px[0], 3), round(f.centroid_px[1], 3)],
    }


def emit_trial_report(
    metrics: TrialMetrics,
    trial: TrialRecord,
    config: dict,
    timestamp: str | None = None,
) -> str:
    """Structured trial report; byte-stable for identical inputs."""
    doc = {
        "config": dict(sorted(config.items())),
        "trial_duration_ms": metrics.trial_duration_ms,
        "dwell_ms": dict(sorted(metrics.dwell_ms.items())),
        "fixation_count": metrics.fixation_count,
        "on_target_count": metrics.on_target_count,
        "tfr_exact": metrics.tfr_exact,
        "tfr_reported": metrics.tfr_reported,
        "fixations": [_fixation_obj(f) for f in trial.fixations],
    }
    if timestamp is not None:
        doc["generated_at"] = timestamp
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def emit_trial_csv(metrics: TrialMetrics) -> str:
    """Tabular export: one row with trial duration, per-AOI dwell, FC, TFR."""
    labels = sorted(metrics.dwell_ms)
    out = StringIO()
    header = ["trial_duration_ms"] + [f"DT_{label}" for label in labels] + ["FC", "TFR"]
    out.write(",".join(header) + "\n")
    row = (
        [str(metrics.trial_duration_ms)]
        + [str(metrics.dwell_ms[label]) for label in labels]
        + [str(metrics.fixation_count), f"{metrics.tfr_reported:.2f}"]
    )
    out.write(",".join(row) + "\n")
    return out.getvalue()


def emit_validation_report(report: ValidationReport, fmt: str = "structured") -> str:
    if fmt == "tabular":
        out = StringIO()
        out.write("frame,sys_x,sys_y,sys_label,gt_x,gt_y,gt_label,match,remark\n")
        for r in report.rows:
            out.write(
                f"{r.frame_index},{r.sys_px[0]},{r.sys_px[1]},{r.sys_label},"
                f"{r.gt_px[0]},{r.gt_px[1]},{r.gt_label},"
                f"{int(r.match)},{r.remark}\n"
            )
        return out.getvalue()
    doc = {
        "accuracy": report.accuracy,
        "px_deviation_mean": round(report.px_deviation_mean, 6),
        "px_deviation_max": round(report.px_deviation_max, 6),
        "rows": [
            {
                "frame": r.frame_index,
                "sys_px": list(r.sys_px),
                "sys_label": r.sys_label,
                "gt_px": list(r.gt_px),
                "gt_label": r.gt_label,
                "match": r.match,
                "remark": r.remark,
            }
            for r in report.rows
        ],
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def parse_trial_report(source: str | Path | IO) -> tuple[TrialMetrics, list[Fixation]]:
    """Read back a structured trial report (round-trips emit_trial_report)."""
    if isinstance(source, (str, Path)):
        text = Path(source).read_text("utf-8")
    else:
        text = source.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"trial report is not valid JSON: {exc}") from None
    try:
        metrics = TrialMetrics(
            trial_duration_ms=doc["trial_duration_ms"],
            dwell_ms=dict(doc["dwell_ms"]),
            fixation_count=doc["fixation_count"],
            on_target_count=doc["on_target_count"],
            tfr_exact=doc["tfr_exact"],
            tfr_reported=doc["tfr_reported"],
        )
        fixations = [
            Fixation(
                target=f["target"],
                first_frame=f["first_frame"],
                last_frame=f["last_frame"],
                start_us=f["start_us"],
                end_us=f["end_us"],
                duration_us=f["duration_us"],
                centroid_px=(f["centroid_px"][0], f["centroid_px"][1]),
            )
            for f in doc["fixations"]
        ]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"trial report: {exc!r}") from None
    return metrics, fixations
