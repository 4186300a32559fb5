"""Scenes, the three-box canvas, and the pixel geometry underneath.

Run:  python3 demos/01_scenes_and_geometry.py
"""

from tribox import (
    Color,
    Layout,
    PlacedObject,
    Scene,
    Shape,
    Size,
    Variant,
    bounding_box,
    fingerprint_hex,
    gap,
    object_box,
    scene_fingerprint,
    scene_problems,
)

layout = Layout()
print(f"canvas {layout.canvas_w}x{layout.canvas_h}, "
      f"{layout.box_count} boxes of {layout.box_rect(0)[2]}px, "
      f"separators {layout.separator_width}px")
for i in range(layout.box_count):
    print(f"  box {i}: rect {layout.box_rect(i)}")

# A scatter scene is just a tuple of placed objects.  Coordinates are the
# top-left corner of the bounding square; y grows downward.
scene = Scene(Variant.SCATTER, (
    PlacedObject(0, Shape.SQUARE, Color.BLUE, Size.MEDIUM, x=10, y=20),
    PlacedObject(1, Shape.CIRCLE, Color.YELLOW, Size.SMALL, x=30, y=20),
    PlacedObject(2, Shape.TRIANGLE, Color.BLACK, Size.LARGE, x=140, y=60),
), layout)

for o in scene.objects:
    print(f"object {o.id}: {o.size.value} {o.color.value} {o.shape.value} "
          f"at bbox {bounding_box(o, layout)} in box {object_box(o, layout)}")

# gap() is the Chebyshev set distance between bounding boxes:
# 0 = touching, -1 = interiors overlap, k>0 = k pixels apart.
a = bounding_box(scene.objects[0], layout)
b = bounding_box(scene.objects[1], layout)
print(f"gap(blue square, yellow circle) = {gap(a, b)}")

# Fingerprints are order-insensitive 64-bit digests of the visible
# content; they are what trajectory logs and the protocol ship around.
shuffled = scene.with_objects(tuple(reversed(scene.objects)))
print(f"fingerprint  {fingerprint_hex(scene_fingerprint(scene))}")
print(f"same content {fingerprint_hex(scene_fingerprint(shuffled))}")

# scene_problems() explains structural violations instead of raising.
broken = scene.with_objects(scene.objects + (
    PlacedObject(3, Shape.SQUARE, Color.BLUE, Size.LARGE, x=12, y=22),
))
for problem in scene_problems(broken):
    print(f"problem: {problem}")
