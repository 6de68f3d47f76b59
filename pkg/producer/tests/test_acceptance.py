"""Acceptance suite for the producer: one test per criterion, each printing
a pass/fail line.  Run with `pytest tests/test_acceptance.py -v -s`.
"""

import numpy as np

from helpers import annotation_doc, primary_validator_exit_code
from maskproducer.annotations import AnnotationRecord, convert_annotations, parse_annotations
from maskproducer.augment import augment, hflip_image, hflip_point, make_variants
from maskproducer.config import ProducerConfig
from maskproducer.exchange import save_document
from maskproducer.infer import ThresholdBlobModel, infer_frames


def report(name, ok):
    print(f"{'PASS' if ok else 'FAIL'}  {name}")
    assert ok, name


def test_every_output_passes_primary_validator(tmp_path):
    produced = []

    # route 1: annotation conversion
    res, records = parse_annotations(annotation_doc())
    path = tmp_path / "convert.json"
    save_document(convert_annotations(res, records), path)
    produced.append(path)

    # route 2: conversion of every augmented variant
    for item in augment([(None, res, records[0])]):
        path = tmp_path / f"aug_{item.tag}.json"
        save_document(
            convert_annotations(item.resolution, [item.record]), path
        )
        produced.append(path)

    # route 3: model inference (blank, blob, and multi-frame inputs)
    blob = np.zeros((15, 20), dtype=np.uint8)
    blob[4:11, 6:16] = 230
    frames = [(0, np.zeros((15, 20), dtype=np.uint8)), (1, blob), (2, blob)]
    path = tmp_path / "infer.json"
    save_document(
        infer_frames(frames, ProducerConfig(), ThresholdBlobModel()), path
    )
    produced.append(path)

    # route 4: empty document
    path = tmp_path / "empty.json"
    save_document(convert_annotations(res, []), path)
    produced.append(path)

    codes = {p.name: primary_validator_exit_code(p) for p in produced}
    ok = all(code == 0 for code in codes.values())
    report(
        f"primary validator: {len(produced)} producer outputs all exit 0",
        ok,
    )
    assert codes == {name: 0 for name in codes}


def test_four_variants_and_flip_involution():
    res = (16, 12)
    record = AnnotationRecord(
        0, (("H1", ((1.0, 1.0), (11.0, 1.0), (1.0, 9.0))),)
    )
    out = augment([(np.zeros((12, 16), dtype=np.uint8), res, record)])
    variants = [o for o in out if o.tag != "orig"]
    four = len(variants) == 4 and len(out) == 5

    flipped = tuple(hflip_point(p, res) for p in record.instances[0][1])
    unflipped = tuple(hflip_point(p, res) for p in flipped)
    involution = unflipped == record.instances[0][1]

    img = out[0].image
    involution = involution and (hflip_image(hflip_image(img)) == img).all()

    names = [v.name for v in make_variants()]
    report(
        f"augment: exactly 4 variants {names} per image; flip∘flip = id",
        four and involution,
    )
