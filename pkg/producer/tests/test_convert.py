import json
import logging

import numpy as np
import pytest

from helpers import (
    RECTANGLE,
    TRIANGLE,
    annotation_doc,
    primary_validator_exit_code,
    reference_rasterize,
)
from maskproducer import rle
from maskproducer.annotations import convert_annotations, parse_annotations
from maskproducer.errors import InputError
from maskproducer.exchange import save_document
from maskproducer.rasterize import rasterize_polygon


def decoded_instance(doc, frame_pos, inst_pos):
    inst = doc["frames"][frame_pos]["instances"][inst_pos]
    return rle.decode(tuple(inst["rle"]["size"]), tuple(inst["rle"]["counts"]))


def test_rectangle_area_exact():
    # axis-aligned rectangle: decoded area equals width * height
    doc = convert_annotations((16, 12), parse_annotations(
        annotation_doc(instances=[("H2", RECTANGLE)])
    )[1])
    bitmap = decoded_instance(doc, 0, 0)
    assert int(bitmap.sum()) == (10 - 2) * (8 - 3)
    assert doc["frames"][0]["instances"][0]["bbox"] == [2, 3, 10, 8]


def test_triangle_matches_reference_rasterizer():
    doc = convert_annotations((16, 12), parse_annotations(
        annotation_doc(instances=[("H1", TRIANGLE)])
    )[1])
    bitmap = decoded_instance(doc, 0, 0)
    assert (bitmap == reference_rasterize(TRIANGLE, 16, 12)).all()


def test_scanline_equals_reference_on_fixtures():
    for poly in (TRIANGLE, RECTANGLE):
        got = rasterize_polygon(list(poly), 16, 12)
        assert (got == reference_rasterize(poly, 16, 12)).all()


def test_converted_score_is_one():
    doc = convert_annotations((16, 12), parse_annotations(annotation_doc())[1])
    for inst in doc["frames"][0]["instances"]:
        assert inst["score"] == 1.0


def test_empty_record_set_is_valid(tmp_path):
    doc = convert_annotations((16, 12), [])
    assert doc["frames"] == []
    out = tmp_path / "empty.json"
    save_document(doc, out)
    assert primary_validator_exit_code(out) == 0


def test_degenerate_polygon_skipped_with_warning(caplog):
    degenerate = [("H1", [(3.0, 3.0), (3.0, 3.0), (3.0, 3.0)])]
    with caplog.at_level(logging.WARNING, logger="maskproducer.annotations"):
        doc = convert_annotations(
            (16, 12), parse_annotations(annotation_doc(instances=degenerate))[1]
        )
    assert doc["frames"][0]["instances"] == []
    assert any("degenerate" in r.message for r in caplog.records)


def test_out_of_bounds_vertex_rejected():
    bad = annotation_doc(instances=[("H1", [(0.0, 0.0), (99.0, 0.0), (0.0, 5.0)])])
    with pytest.raises(InputError, match="bounds"):
        parse_annotations(bad)


def test_reserved_label_rejected():
    bad = annotation_doc(instances=[("off_target", TRIANGLE)])
    with pytest.raises(InputError, match="reserved"):
        parse_annotations(bad)


def test_converted_file_passes_primary_validator(tmp_path):
    doc = convert_annotations((16, 12), parse_annotations(annotation_doc())[1])
    out = tmp_path / "masks.json"
    save_document(doc, out)
    assert primary_validator_exit_code(out) == 0
