"""Command-line entry point.

Exit codes: 0 success, 2 input format error, 3 config error, 4 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import gaze, masks, metrics as metrics_mod, simulate
from .config import load_config
from .errors import ConfigError, FormatError, GazemapError, InternalError
from .metrics import (
    emit_trial_csv,
    emit_trial_report,
    emit_validation_report,
    validate,
)
from .pipeline import run_map

EXIT_FORMAT = 2
EXIT_CONFIG = 3
EXIT_INTERNAL = 4


def _write(path: str | None, text: str, quiet: bool) -> None:
    if path:
        Path(path).write_text(text, "utf-8")
    elif not quiet:
        sys.stdout.write(text)


def _require_files(*paths: str) -> None:
    for p in paths:
        if p is not None and not Path(p).is_file():
            raise FormatError(f"input file not found: {p}")


def cmd_map(args) -> int:
    _require_files(args.gaze, args.masks, args.meta)
    if args.config:
        _require_files(args.config)
    config = load_config(args.config)
    result = run_map(args.gaze, args.masks, args.meta, config)
    report = emit_trial_report(
        result.metrics, result.trial, config.as_dict(), timestamp=args.timestamp
    )
    _write(args.out, report, args.quiet)
    if not args.quiet and args.out:
        fc = result.metrics.fixation_count
        print(f"wrote {args.out}: {fc} fixations, TFR {result.metrics.tfr_reported:.2f}")
    return 0


def cmd_metrics(args) -> int:
    _require_files(args.report)
    trial_metrics, _ = metrics_mod.parse_trial_report(args.report)
    _write(args.out, emit_trial_csv(trial_metrics), args.quiet)
    return 0


def cmd_validate(args) -> int:
    _require_files(args.system, args.ground_truth)
    report = validate(args.system, args.ground_truth)
    _write(args.out, emit_validation_report(report, args.format), args.quiet)
    if not args.quiet:
        print(f"accuracy {report.accuracy:.2f} ({sum(r.match for r in report.rows)}/{len(report.rows)})")
    return 0


def cmd_simulate(args) -> int:
    _require_files(args.spec)
    if args.config:
        _require_files(args.config)
    spec = simulate.load_scenario(args.spec)
    config = load_config(args.config)
    simulate.generate(spec, args.outdir, config)
    if not args.quiet:
        print(f"wrote scenario artifacts to {args.outdir}")
    return 0


def cmd_inspect(args) -> int:
    if not args.gaze and not args.masks:
        raise ConfigError("inspect needs --gaze and/or --masks")
    if args.gaze:
        _require_files(args.gaze)
        stream, summary = gaze.parse_gaze_stream(Path(args.gaze).read_text("utf-8"))
        stats = gaze.stream_stats(stream)
        print(f"gaze log: {summary.parsed} records ({summary.malformed} malformed)")
        print(f"  duration_us: {stream.duration_us}")
        print(f"  per-kind counts: {stats.sample_count}")
        print(f"  invalid: {stats.invalid_count}  gaps: {stats.gap_count}")
        print(f"  measured_rate_hz: {stats.measured_rate_hz:.2f}")
    if args.masks:
        _require_files(args.masks)
        ms = masks.load_maskset(args.masks)
        problems = masks.validate_maskset(ms)
        n_inst = sum(len(fm.instances) for fm in ms.frames.values())
        print(
            f"mask set: {len(ms.frames)} frames, {n_inst} instances, "
            f"resolution {ms.resolution[0]}x{ms.resolution[1]}"
        )
        if problems:
            for p in problems:
                print(f"  INVALID: {p}", file=sys.stderr)
            raise FormatError(f"mask set has {len(problems)} violations")
        print("  validation: ok")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gazemap",
        description="Map eye-tracker gaze fixations onto AOI instance masks "
        "and compute visual attention metrics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("map", help="run the full fixation-mapping pipeline")
    p.add_argument("--gaze", required=True, help="gaze log (JSONL)")
    p.add_argument("--masks", required=True, help="mask exchange file")
    p.add_argument("--meta", required=True, help="video metadata file")
    p.add_argument("--config", help="optional run configuration file")
    p.add_argument("--out", help="trial report output path")
    p.add_argument("--quiet", action="store_true")
    p.add_argument(
        "--timestamp",
        help="embed this timestamp string in the report (omitted by default "
        "so identical inputs give byte-identical reports)",
    )
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("metrics", help="re-emit a trial report as tabular CSV")
    p.add_argument("--report", required=True, help="structured trial report")
    p.add_argument("--out")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("validate", help="compare system fixations to ground truth")
    p.add_argument("--system", required=True, help="per-frame system rows (JSON)")
    p.add_argument("--ground-truth", required=True, help="per-frame ground truth rows")
    p.add_argument("--format", choices=["structured", "tabular"], default="structured")
    p.add_argument("--out")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("simulate", help="generate a synthetic trial with ground truth")
    p.add_argument("--spec", required=True, help="scenario spec file")
    p.add_argument("--outdir", required=True)
    p.add_argument("--config", help="optional run configuration file")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("inspect", help="print stream/mask statistics and validate")
    p.add_argument("--gaze")
    p.add_argument("--masks")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_inspect)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InternalError, GazemapError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
