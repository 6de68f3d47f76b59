import numpy as np
import pytest

from helpers import RECTANGLE, TRIANGLE
from maskproducer.annotations import AnnotationRecord
from maskproducer.augment import (
    AugmentedItem,
    augment,
    hflip_image,
    hflip_point,
    make_variants,
)
from maskproducer.errors import InputError
from maskproducer.rasterize import rasterize_polygon

RES = (16, 12)
RECORD = AnnotationRecord(
    0, (("H1", tuple(TRIANGLE)), ("H2", tuple(RECTANGLE)))
)


def checker_image():
    rng = np.random.default_rng(5)
    return rng.integers(0, 256, size=(RES[1], RES[0], 3), dtype=np.uint8)


def test_exactly_four_variants_plus_original():
    out = augment([(checker_image(), RES, RECORD)])
    assert len(out) == 5
    assert [o.tag for o in out] == ["orig", "hflip", "rot90", "hflip_rot90", "rot180"]


def test_set_arithmetic_five_per_image():
    items = [(None, RES, AnnotationRecord(i, RECORD.instances)) for i in range(10)]
    assert len(augment(items)) == 50  # 1000 images would give 5000


def test_flip_is_an_involution():
    # on annotations
    res2 = RES
    flipped_once = tuple(hflip_point(p, RES) for p in TRIANGLE)
    flipped_twice = tuple(hflip_point(p, res2) for p in flipped_once)
    assert flipped_twice == tuple(TRIANGLE)
    # and on images
    img = checker_image()
    assert (hflip_image(hflip_image(img)) == img).all()


def test_rotation_cycles_back_to_identity():
    variants = {v.name: v for v in make_variants()}
    rot90 = variants["rot90"]
    img = checker_image()
    res = RES
    rec = RECORD
    out_img, out_rec = img, rec
    for _ in range(4):
        out_rec = rot90.apply_record(out_rec, res)
        out_img = rot90.apply_image(out_img)
        res = rot90.apply_resolution(res)
    assert res == RES
    assert (out_img == img).all()
    assert out_rec == rec


def test_transforms_commute_with_rasterization():
    # rasterize(transform(polygon)) == transform(rasterize(polygon))
    for variant in make_variants():
        for _, vertices in RECORD.instances:
            w0, h0 = RES
            mask_then_transform = variant.apply_image(
                rasterize_polygon(list(vertices), w0, h0)
            )
            moved = [variant.apply_point(p, RES) for p in vertices]
            w1, h1 = variant.apply_resolution(RES)
            transform_then_mask = rasterize_polygon(moved, w1, h1)
            assert (mask_then_transform == transform_then_mask).all(), variant.name


def test_annotations_follow_the_image():
    # each variant's rasterized annotations coincide with the transformed
    # image of a synthetic mask painted from the original annotations
    img = np.zeros((RES[1], RES[0]), dtype=bool)
    for _, vertices in RECORD.instances:
        img |= rasterize_polygon(list(vertices), *RES)
    for item in augment([(img, RES, RECORD)]):
        painted = np.zeros((item.resolution[1], item.resolution[0]), dtype=bool)
        for _, vertices in item.record.instances:
            painted |= rasterize_polygon(list(vertices), *item.resolution)
        assert (painted == item.image).all(), item.tag


def test_configurable_angles():
    out = augment([(None, RES, RECORD)], angles=(270, 90))
    assert [o.tag for o in out] == ["orig", "hflip", "rot270", "hflip_rot270", "rot90"]


def test_bad_angles_rejected():
    with pytest.raises(InputError, match="angle"):
        augment([(None, RES, RECORD)], angles=(45, 90))
    with pytest.raises(InputError, match="differ"):
        augment([(None, RES, RECORD)], angles=(90, 90))


def test_image_resolution_mismatch_rejected():
    with pytest.raises(InputError, match="shape"):
        augment([(np.zeros((5, 5), dtype=bool), RES, RECORD)])
