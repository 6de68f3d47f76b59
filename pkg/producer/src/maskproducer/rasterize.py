"""Even-odd scanline polygon rasterization.

A pixel ``(x, y)`` is set when its center ``(x + 0.5, y + 0.5)`` lies inside
the polygon under the even-odd rule.  Crossings use half-open edge intervals
so vertices are never double-counted, and the fill interval is half-open in
x, which makes the axis-aligned geometric transforms in
:mod:`maskproducer.augment` commute exactly with rasterization.
"""

from __future__ import annotations

import math

import numpy as np

Point = tuple[float, float]


def rasterize_polygon(
    vertices: list[Point], width: int, height: int
) -> np.ndarray:
    """Rasterize one simple polygon into a boolean ``(height, width)`` mask."""
    out = np.zeros((height, width), dtype=bool)
    if len(vertices) < 3:
        return out
    n = len(vertices)
    for row in range(height):
        yc = row + 0.5
        crossings: list[float] = []
        for i in range(n):
            x0, y0 = vertices[i]
            x1, y1 = vertices[(i + 1) % n]
            if (y0 <= yc < y1) or (y1 <= yc < y0):
                t = (yc - y0) / (y1 - y0)
                crossings.append(x0 + t * (x1 - x0))
        crossings.sort()
        for xa, xb in zip(crossings[0::2], crossings[1::2]):
            # pixel centers x + 0.5 in [xa, xb)
            lo = max(math.ceil(xa - 0.5), 0)
            hi = min(math.ceil(xb - 0.5), width)
            if hi > lo:
                out[row, lo:hi] = True
    return out
