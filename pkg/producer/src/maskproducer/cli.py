"""Command-line interface: convert, augment, infer."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .annotations import convert_annotations, load_annotations
from .augment import augment
from .config import ProducerConfig, load_config
from .errors import InputError, ModelError
from .exchange import save_document
from .infer import infer_video

EXIT_INPUT = 2
EXIT_MODEL = 3


def cmd_convert(args) -> int:
    resolution, records = load_annotations(args.annotations)
    doc = convert_annotations(resolution, records)
    save_document(doc, args.out)
    if not args.quiet:
        print(f"wrote {args.out}: {len(doc['frames'])} frames")
    return 0


def cmd_augment(args) -> int:
    resolution, records = load_annotations(args.annotations)
    angles = tuple(int(a) for a in args.angles.split(","))
    if len(angles) != 2:
        raise InputError("--angles must be two comma-separated values")
    items = [(None, resolution, rec) for rec in records]
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    count = 0
    for item in augment(items, angles):
        doc = {
            "resolution": list(item.resolution),
            "images": [
                {
                    "frame": item.record.frame,
                    "instances": [
                        {"label": label, "polygon": [list(p) for p in vertices]}
                        for label, vertices in item.record.instances
                    ],
                }
            ],
        }
        path = outdir / f"frame{item.record.frame}_{item.tag}.json"
        path.write_text(json.dumps(doc, separators=(",", ":")) + "\n", "utf-8")
        count += 1
    if not args.quiet:
        print(f"wrote {count} annotation documents to {outdir}")
    return 0


def cmd_infer(args) -> int:
    config = load_config(args.config) if args.config else ProducerConfig()
    paths = sorted(Path(args.frames).iterdir())
    doc = infer_video(paths, config)
    save_document(doc, args.out)
    if not args.quiet:
        total = sum(len(f["instances"]) for f in doc["frames"])
        print(f"wrote {args.out}: {len(doc['frames'])} frames, {total} instances")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="maskproducer")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="rasterize polygon annotations to a mask file")
    p.add_argument("--annotations", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("augment", help="expand annotations with flip/rotation variants")
    p.add_argument("--annotations", required=True)
    p.add_argument("--outdir", required=True)
    p.add_argument("--angles", default="90,180")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("infer", help="run the segmentation model over image frames")
    p.add_argument("--frames", required=True, help="directory of ordered image files")
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_infer)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ModelError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_MODEL


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
