"""Column-major run-length coding for binary masks.

Canonical form: the first count is the leading zero-run (possibly 0) and
every later count is positive.  The scan order is column-major: flat index
``x * h + y``.  ``size`` is recorded as ``(h, w)``.

This module is self-contained on purpose: the producer emits the exchange
format from its own encoder and the consumer re-validates it, so a shared
codec bug cannot hide on both sides of the contract.
"""

from __future__ import annotations

import numpy as np


def encode(bitmap: np.ndarray) -> tuple[tuple[int, int], tuple[int, ...]]:
    """Encode a boolean ``(h, w)`` bitmap; returns ``(size, counts)``."""
    bitmap = np.asarray(bitmap, dtype=bool)
    if bitmap.ndim != 2:
        raise ValueError("bitmap must be 2-D")
    h, w = bitmap.shape
    flat = bitmap.T.ravel()
    if flat.size == 0:
        return (h, w), (0,)
    counts: list[int] = []
    current = False  # canonical streams start with a zero-run
    run = 0
    for value in flat:
        if value == current:
            run += 1
        else:
            counts.append(run)
            current = bool(value)
            run = 1
    counts.append(run)
    return (h, w), tuple(counts)


def decode(size: tuple[int, int], counts: tuple[int, ...]) -> np.ndarray:
    """Inverse of :func:`encode`; returns a boolean ``(h, w)`` bitmap."""
    h, w = size
    values = np.zeros(len(counts), dtype=bool)
    values[1::2] = True
    flat = np.repeat(values, counts)
    if flat.size != h * w:
        raise ValueError(f"counts sum {flat.size} != {h * w}")
    return flat.reshape(w, h).T


def tight_bbox(bitmap: np.ndarray) -> tuple[int, int, int, int]:
    """Half-open ``(x0, y0, x1, y1)`` box around set pixels; zeros if empty."""
    ys, xs = np.nonzero(bitmap)
    if ys.size == 0:
        return (0, 0, 0, 0)
    return (int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1)
