"""Geometry layer: the partitioned canvas, placed objects, scenes, fingerprints.

Coordinates are integer pixels with the origin at the top-left corner and y
growing downward.  A bounding box (x0, y0, x1, y1) covers pixel columns
[x0, x1) and rows [y0, y1); the right/bottom edges are exclusive as pixel
sets, which makes edge contact between rects an exact integer test.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace
from enum import Enum
from itertools import combinations

Rect = tuple[int, int, int, int]


class Shape(str, Enum):
    CIRCLE = "circle"
    SQUARE = "square"
    TRIANGLE = "triangle"


class Color(str, Enum):
    BLACK = "black"
    BLUE = "blue"
    YELLOW = "yellow"


class Size(str, Enum):
    SMALL = "small"
    MEDIUM = "medium"
    LARGE = "large"


class Side(str, Enum):
    TOP = "top"
    BOTTOM = "bottom"
    LEFT = "left"
    RIGHT = "right"


class Variant(str, Enum):
    """Which structural regime a scene lives in.

    TOWER scenes stack uniform blocks from the box floor; SCATTER scenes
    allow free placement of any shape/color/size combination.
    """

    TOWER = "tower"
    SCATTER = "scatter"


class SceneError(ValueError):
    """A scene violates the structural rules of its variant."""


@dataclass(frozen=True)
class Layout:
    """Canvas geometry: equal-width boxes separated by vertical bands.

    The defaults describe a 380x100 canvas split into three 120-wide boxes
    by two 10-wide separators.
    """

    canvas_w: int = 380
    canvas_h: int = 100
    box_count: int = 3
    separator_width: int = 10
    small_px: int = 10
    medium_px: int = 20
    large_px: int = 30
    tower_capacity: int = 4

    def __post_init__(self) -> None:
        usable = self.canvas_w - (self.box_count - 1) * self.separator_width
        if self.box_count < 1 or usable <= 0 or usable % self.box_count != 0:
            raise ValueError(
                f"canvas width {self.canvas_w} does not split into "
                f"{self.box_count} equal boxes with {self.separator_width}px separators"
            )
        if not 0 < self.small_px < self.medium_px < self.large_px:
            raise ValueError("object sizes must be strictly increasing")
        if self.large_px > min(self.box_width, self.canvas_h):
            raise ValueError("largest object does not fit inside a box")
        if self.tower_capacity * self.medium_px > self.canvas_h:
            raise ValueError("a full stack must fit inside the canvas height")

    @property
    def box_width(self) -> int:
        return (self.canvas_w - (self.box_count - 1) * self.separator_width) // self.box_count

    def box_rect(self, index: int) -> Rect:
        if not 0 <= index < self.box_count:
            raise IndexError(f"box index {index} out of range")
        x0 = index * (self.box_width + self.separator_width)
        return (x0, 0, x0 + self.box_width, self.canvas_h)

    def box_rects(self) -> list[Rect]:
        return [self.box_rect(i) for i in range(self.box_count)]

    def separator_rects(self) -> list[Rect]:
        rects = []
        for i in range(self.box_count - 1):
            x0 = (i + 1) * self.box_width + i * self.separator_width
            rects.append((x0, 0, x0 + self.separator_width, self.canvas_h))
        return rects

    def size_px(self, size: Size) -> int:
        return {
            Size.SMALL: self.small_px,
            Size.MEDIUM: self.medium_px,
            Size.LARGE: self.large_px,
        }[size]

    def box_of_rect(self, rect: Rect) -> int | None:
        """Index of the box fully containing ``rect``, or None.

        Containment is closed on every edge: a rect ending exactly on the
        box's right or bottom boundary is still inside.
        """
        x0, y0, x1, y1 = rect
        for i in range(self.box_count):
            bx0, by0, bx1, by1 = self.box_rect(i)
            if bx0 <= x0 and x1 <= bx1 and by0 <= y0 and y1 <= by1:
                return i
        return None

    def tower_x(self, box_index: int) -> int:
        """x of a stacked block: horizontally centered in its box."""
        bx0 = self.box_rect(box_index)[0]
        return bx0 + (self.box_width - self.medium_px) // 2


@dataclass(frozen=True)
class PlacedObject:
    """One object on the canvas, keyed by (x, y) of its top-left corner."""

    id: int
    shape: Shape
    color: Color
    size: Size
    x: int
    y: int


@dataclass(frozen=True)
class Scene:
    variant: Variant
    objects: tuple[PlacedObject, ...] = ()
    layout: Layout = Layout()

    def with_objects(self, objects) -> "Scene":
        return replace(self, objects=tuple(objects))


def bounding_box(obj: PlacedObject, layout: Layout) -> Rect:
    px = layout.size_px(obj.size)
    return (obj.x, obj.y, obj.x + px, obj.y + px)


def gap(a: Rect, b: Rect) -> int:
    """Separation between two rects under the Chebyshev (L-infinity) metric.

    Returns -1 when the interiors overlap, 0 when the rects touch along an
    edge or at a corner, and otherwise the smallest number of pixels either
    rect would have to travel (along one axis, or diagonally) to touch the
    other.

    >>> gap((0, 0, 10, 10), (10, 0, 20, 10))
    0
    >>> gap((0, 0, 10, 10), (13, 0, 23, 10))
    3
    >>> gap((0, 0, 10, 10), (5, 5, 15, 15))
    -1
    """
    ax0, ay0, ax1, ay1 = a
    bx0, by0, bx1, by1 = b
    dx = max(bx0 - ax1, ax0 - bx1)
    dy = max(by0 - ay1, ay0 - by1)
    if dx < 0 and dy < 0:
        return -1
    return max(dx, dy, 0)


def object_box(obj: PlacedObject, layout: Layout) -> int:
    """Index of the box holding ``obj``; raises if it straddles a separator."""
    idx = layout.box_of_rect(bounding_box(obj, layout))
    if idx is None:
        raise SceneError(f"object {obj.id} at ({obj.x}, {obj.y}) is not inside a box")
    return idx


def objects_in_box(scene: Scene, box_index: int) -> tuple[PlacedObject, ...]:
    return tuple(
        o for o in scene.objects if object_box(o, scene.layout) == box_index
    )


def tower_stack(scene: Scene, box_index: int) -> tuple[PlacedObject, ...]:
    """Objects of one box ordered floor-first (descending y)."""
    stack = objects_in_box(scene, box_index)
    return tuple(sorted(stack, key=lambda o: -o.y))


def next_object_id(scene: Scene) -> int:
    return max((o.id for o in scene.objects), default=-1) + 1


def scene_problems(scene: Scene) -> list[str]:
    """Structural violations of a scene, empty when it is well-formed.

    Every variant requires distinct ids, objects fully inside boxes, and
    pairwise non-overlapping interiors.  TOWER additionally requires each
    box to hold a floor-anchored stack of centered medium squares, at most
    ``layout.tower_capacity`` tall.
    """
    layout = scene.layout
    problems = []

    ids = [o.id for o in scene.objects]
    if len(set(ids)) != len(ids):
        problems.append("duplicate object ids")

    placed = []
    for o in scene.objects:
        box = layout.box_of_rect(bounding_box(o, layout))
        if box is None:
            problems.append(f"object {o.id} is not fully inside a box")
        else:
            placed.append(o)

    for a, b in combinations(placed, 2):
        if gap(bounding_box(a, layout), bounding_box(b, layout)) == -1:
            problems.append(f"objects {a.id} and {b.id} overlap")

    if scene.variant is Variant.TOWER:
        for o in placed:
            if o.shape is not Shape.SQUARE or o.size is not Size.MEDIUM:
                problems.append(f"object {o.id} is not a medium square")
        for i in range(layout.box_count):
            stack = tower_stack(scene, i)
            if len(stack) > layout.tower_capacity:
                problems.append(f"box {i} stack exceeds capacity {layout.tower_capacity}")
            want_x = layout.tower_x(i)
            for level, o in enumerate(stack):
                want_y = layout.canvas_h - (level + 1) * layout.medium_px
                if (o.x, o.y) != (want_x, want_y):
                    problems.append(
                        f"object {o.id} is not at stack level {level} of box {i}"
                    )
                    break

    return problems


def validate_scene(scene: Scene) -> None:
    problems = scene_problems(scene)
    if problems:
        raise SceneError("; ".join(problems))


def scene_fingerprint(scene: Scene) -> int:
    """64-bit digest of what the scene looks like.

    Two scenes get equal fingerprints iff they render identically: object
    ids, tuple order, and the variant tag do not contribute.  Objects are
    canonicalized by sorting on (x, y, shape, color, size).
    """
    h = hashlib.blake2b(digest_size=8)
    layout = scene.layout
    h.update(
        f"{layout.canvas_w},{layout.canvas_h},{layout.box_count},"
        f"{layout.separator_width},{layout.small_px},{layout.medium_px},"
        f"{layout.large_px}".encode()
    )
    key = lambda o: (o.x, o.y, o.shape.value, o.color.value, o.size.value)
    for o in sorted(scene.objects, key=key):
        h.update(f"|{o.x},{o.y},{o.shape.value},{o.color.value},{o.size.value}".encode())
    return int.from_bytes(h.digest(), "big")


def fingerprint_hex(fp: int) -> str:
    return f"{fp:016x}"
