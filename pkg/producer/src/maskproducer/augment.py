"""Label-preserving dataset augmentation: horizontal flip and right-angle
rotations, applied to images and their polygon annotations together.

Only right-angle rotations are offered because they map the pixel grid onto
itself: no interpolation, and the polygon transform commutes exactly with
rasterization (pixel centers map to pixel centers).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .annotations import AnnotationRecord
from .errors import InputError

Point = tuple[float, float]
Resolution = tuple[int, int]  # (width, height)

ALLOWED_ANGLES = (90, 180, 270)


# --- primitive transforms -------------------------------------------------
# Each maps continuous image coordinates; pixel (x, y) has center
# (x + 0.5, y + 0.5), and every transform below sends centers to centers.

def hflip_point(p: Point, res: Resolution) -> Point:
    w, _ = res
    return (w - p[0], p[1])


def rotate_point(p: Point, res: Resolution, angle: int) -> Point:
    w, h = res
    x, y = p
    if angle == 90:  # clockwise quarter turn
        return (h - y, x)
    if angle == 180:
        return (w - x, h - y)
    if angle == 270:
        return (y, w - x)
    raise InputError(f"unsupported rotation angle {angle}")


def hflip_image(img: np.ndarray) -> np.ndarray:
    return img[:, ::-1].copy()


def rotate_image(img: np.ndarray, angle: int) -> np.ndarray:
    if angle == 90:
        return np.rot90(img, k=-1, axes=(0, 1)).copy()
    if angle == 180:
        return np.rot90(img, k=2, axes=(0, 1)).copy()
    if angle == 270:
        return np.rot90(img, k=1, axes=(0, 1)).copy()
    raise InputError(f"unsupported rotation angle {angle}")


def transformed_resolution(res: Resolution, angle: int) -> Resolution:
    w, h = res
    return (h, w) if angle in (90, 270) else (w, h)


# --- composite variants ----------------------------------------------------

@dataclass(frozen=True)
class Variant:
    """A named sequence of primitive steps ('hflip' or an angle)."""

    name: str
    steps: tuple[object, ...]  # each step: "hflip" | int angle

    def apply_point(self, p: Point, res: Resolution) -> Point:
        for step in self.steps:
            if step == "hflip":
                p = hflip_point(p, res)
            else:
                p = rotate_point(p, res, step)
                res = transformed_resolution(res, step)
        return p

    def apply_image(self, img: np.ndarray) -> np.ndarray:
        for step in self.steps:
            img = hflip_image(img) if step == "hflip" else rotate_image(img, step)
        return img

    def apply_resolution(self, res: Resolution) -> Resolution:
        for step in self.steps:
            if step != "hflip":
                res = transformed_resolution(res, step)
        return res

    def apply_record(self, rec: AnnotationRecord, res: Resolution) -> AnnotationRecord:
        return AnnotationRecord(
            rec.frame,
            tuple(
                (label, tuple(self.apply_point(p, res) for p in vertices))
                for label, vertices in rec.instances
            ),
        )


def make_variants(angles: tuple[int, int] = (90, 180)) -> tuple[Variant, ...]:
    """The four emitted variants: flip, first rotation, flipped-rotation,
    second rotation."""
    a1, a2 = angles
    for a in angles:
        if a not in ALLOWED_ANGLES:
            raise InputError(f"rotation angle must be one of {ALLOWED_ANGLES}")
    if a1 == a2:
        raise InputError("the two rotation angles must differ")
    return (
        Variant("hflip", ("hflip",)),
        Variant(f"rot{a1}", (a1,)),
        Variant(f"hflip_rot{a1}", ("hflip", a1)),
        Variant(f"rot{a2}", (a2,)),
    )


@dataclass(frozen=True)
class AugmentedItem:
    """One output image with its transformed annotations."""

    tag: str  # "orig" or the variant name
    image: np.ndarray | None
    resolution: Resolution
    record: AnnotationRecord


def augment(
    items: list[tuple[np.ndarray | None, Resolution, AnnotationRecord]],
    angles: tuple[int, int] = (90, 180),
) -> list[AugmentedItem]:
    """Expand each (image, resolution, annotations) item into the original
    plus exactly four variants.  ``image`` may be None when only the
    annotations are being augmented."""
    variants = make_variants(angles)
    out: list[AugmentedItem] = []
    for img, res, rec in items:
        if img is not None and img.shape[:2] != (res[1], res[0]):
            raise InputError(
                f"frame {rec.frame}: image shape {img.shape[:2]} does not "
                f"match resolution {res}"
            )
        out.append(AugmentedItem("orig", img, res, rec))
        for v in variants:
            out.append(
                AugmentedItem(
                    v.name,
                    None if img is None else v.apply_image(img),
                    v.apply_resolution(res),
                    v.apply_record(rec, res),
                )
            )
    return out
