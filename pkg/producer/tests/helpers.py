import subprocess
import sys
from pathlib import Path

import numpy as np


def primary_validator_exit_code(mask_path: Path) -> int:
    """Run the consumer's validator over a produced mask file.

    This is the contract boundary: the producer is only ever checked
    through the consumer CLI, never by importing its code.
    """
    proc = subprocess.run(
        [sys.executable, "-m", "gazemap.cli", "inspect", "--masks", str(mask_path)],
        capture_output=True,
        text=True,
    )
    return proc.returncode


def reference_point_in_polygon(vertices, xc: float, yc: float) -> bool:
    """Independent inclusion test: crossing-number ray cast in +x.

    Deliberately structured differently from the package's scanline fill so
    the two can disagree if either is wrong.
    """
    inside = False
    n = len(vertices)
    for i in range(n):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % n]
        if (y0 > yc) != (y1 > yc):
            x_at = x0 + (yc - y0) * (x1 - x0) / (y1 - y0)
            if x_at > xc:
                inside = not inside
    return inside


def reference_rasterize(vertices, width: int, height: int) -> np.ndarray:
    out = np.zeros((height, width), dtype=bool)
    for y in range(height):
        for x in range(width):
            out[y, x] = reference_point_in_polygon(vertices, x + 0.5, y + 0.5)
    return out


# triangle whose slanted edge never passes through a pixel center, so the
# even-odd fill is unambiguous
TRIANGLE = [(1.0, 1.0), (11.0, 1.0), (1.0, 9.0)]
RECTANGLE = [(2.0, 3.0), (10.0, 3.0), (10.0, 8.0), (2.0, 8.0)]


def annotation_doc(resolution=(16, 12), instances=None, frame=0):
    if instances is None:
        instances = [("H1", TRIANGLE), ("H2", RECTANGLE)]
    return {
        "resolution": list(resolution),
        "images": [
            {
                "frame": frame,
                "instances": [
                    {"label": label, "polygon": [list(p) for p in poly]}
                    for label, poly in instances
                ],
            }
        ],
    }
