"""Deterministic rasterizer: Scene -> uint8 RGB buffer of shape (h, w, 3).

Integer-only fills, no anti-aliasing, so buffers are byte-identical across
platforms and runs.  Painter's order is the canonical object order (the
same sort the fingerprint uses), though with non-overlapping scenes the
order cannot show.

Fill rules, fixed as the golden contract for an object of side s drawn
into its bounding box (local pixel column i, row j):

  square    whole box
  circle    (2i+1-s)^2 + (2j+1-s)^2 <= s^2     (disk inscribed in the box)
  triangle  |2i+1-s| <= j+1                    (apex top-center, full base)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image

from .scene import Color, Scene, Shape, bounding_box

RGB = tuple[int, int, int]


@dataclass(frozen=True)
class Palette:
    background: RGB = (211, 211, 211)
    separator: RGB = (100, 100, 100)
    black: RGB = (0, 0, 0)
    blue: RGB = (0, 102, 255)
    yellow: RGB = (255, 204, 0)

    def __post_init__(self) -> None:
        for value in (self.background, self.separator, self.black,
                      self.blue, self.yellow):
            if len(value) != 3 or not all(0 <= c <= 255 for c in value):
                raise ValueError(f"not an RGB triple: {value!r}")
        if not all(s < b for s, b in zip(self.separator, self.background)):
            raise ValueError("separator must be strictly darker than background")
        five = [self.background, self.separator, self.black, self.blue, self.yellow]
        if len(set(five)) != 5:
            raise ValueError("palette colors must be pairwise distinct")

    def object_color(self, color: Color) -> RGB:
        return {Color.BLACK: self.black, Color.BLUE: self.blue,
                Color.YELLOW: self.yellow}[color]


DEFAULT_PALETTE = Palette()


def _shape_mask(shape: Shape, s: int) -> np.ndarray:
    jj, ii = np.ogrid[0:s, 0:s]
    if shape is Shape.SQUARE:
        return np.ones((s, s), dtype=bool)
    if shape is Shape.CIRCLE:
        return (2 * ii + 1 - s) ** 2 + (2 * jj + 1 - s) ** 2 <= s * s
    if shape is Shape.TRIANGLE:
        return np.abs(2 * ii + 1 - s) <= jj + 1
    raise ValueError(f"unknown shape {shape!r}")


def render(scene: Scene, palette: Palette = DEFAULT_PALETTE) -> np.ndarray:
    """Rasterize a (valid) scene.  Pure; same scene -> same bytes."""
    layout = scene.layout
    buf = np.empty((layout.canvas_h, layout.canvas_w, 3), dtype=np.uint8)
    buf[:, :] = palette.background
    for x0, y0, x1, y1 in layout.separator_rects():
        buf[y0:y1, x0:x1] = palette.separator
    key = lambda o: (o.x, o.y, o.shape.value, o.color.value, o.size.value)
    for o in sorted(scene.objects, key=key):
        x0, y0, x1, y1 = bounding_box(o, layout)
        mask = _shape_mask(o.shape, x1 - x0)
        region = buf[y0:y1, x0:x1]
        region[mask] = palette.object_color(o.color)
    return buf


def export_png(buffer: np.ndarray, path) -> None:
    """Lossless 8-bit RGB PNG."""
    try:
        Image.fromarray(buffer, mode="RGB").save(path, format="PNG")
    except OSError as exc:
        raise OSError(f"could not write PNG to {path}: {exc}") from exc


def load_png(path) -> np.ndarray:
    """Inverse of export_png (useful for golden comparisons)."""
    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"))
