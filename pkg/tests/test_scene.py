import random

import pytest

from tribox.scene import (
    Color,
    Layout,
    PlacedObject,
    Scene,
    SceneError,
    Shape,
    Side,
    Size,
    Variant,
    bounding_box,
    fingerprint_hex,
    gap,
    next_object_id,
    object_box,
    objects_in_box,
    scene_fingerprint,
    scene_problems,
    tower_stack,
    validate_scene,
)

L = Layout()


def obj(id=0, shape=Shape.SQUARE, color=Color.BLUE, size=Size.MEDIUM, x=0, y=0):
    return PlacedObject(id=id, shape=shape, color=color, size=size, x=x, y=y)


def test_layout_defaults():
    assert L.canvas_w == 380 and L.canvas_h == 100
    assert L.box_width == 120
    assert L.box_rects() == [(0, 0, 120, 100), (130, 0, 250, 100), (260, 0, 380, 100)]
    assert L.separator_rects() == [(120, 0, 130, 100), (250, 0, 260, 100)]
    assert L.size_px(Size.SMALL) == 10
    assert L.size_px(Size.MEDIUM) == 20
    assert L.size_px(Size.LARGE) == 30


def test_layout_invariant_holds():
    # box_count * box_width + (box_count - 1) * separator_width == canvas_w
    assert L.box_count * L.box_width + (L.box_count - 1) * L.separator_width == L.canvas_w


def test_layout_rejects_bad_geometry():
    with pytest.raises(ValueError):
        Layout(canvas_w=381)  # 361 not divisible by 3
    with pytest.raises(ValueError):
        Layout(small_px=20, medium_px=20)
    with pytest.raises(ValueError):
        Layout(large_px=150)
    with pytest.raises(ValueError):
        Layout(canvas_h=70)  # four mediums no longer fit


def test_bounding_box_and_corner_containment():
    o = obj(x=360, y=80)
    assert bounding_box(o, L) == (360, 80, 380, 100)
    # flush against the right/bottom edges of box 2 is still inside it
    assert object_box(o, L) == 2
    assert L.box_of_rect((360, 80, 381, 100)) is None
    with pytest.raises(SceneError):
        object_box(obj(x=110, y=0), L)  # straddles the first separator


def test_gap_frozen_examples():
    assert gap((0, 0, 10, 10), (10, 0, 20, 10)) == 0
    assert gap((0, 0, 10, 10), (13, 0, 23, 10)) == 3
    assert gap((0, 0, 10, 10), (5, 5, 15, 15)) == -1
    # corner contact counts as touching
    assert gap((0, 0, 10, 10), (10, 10, 20, 20)) == 0
    # diagonal separation is the Chebyshev distance, not the sum
    assert gap((0, 0, 10, 10), (12, 13, 22, 23)) == 3


def naive_gap(a, b):
    """Pixel-set oracle: min Chebyshev distance between covered pixels.

    Rects cover [x0, x1) x [y0, y1).  Distance 0 means a shared pixel
    (interior overlap); adjacency gives pixel distance gap + 1.
    """
    ax0, ay0, ax1, ay1 = a
    bx0, by0, bx1, by1 = b
    best = None
    for ax in range(ax0, ax1):
        for ay in range(ay0, ay1):
            for bx in range(bx0, bx1):
                for by in range(by0, by1):
                    d = max(abs(ax - bx), abs(ay - by))
                    if best is None or d < best:
                        best = d
    if best == 0:
        return -1
    return best - 1


def test_gap_matches_pixel_oracle():
    rng = random.Random(1)
    for _ in range(200):
        rects = []
        for _ in range(2):
            w, h = rng.randint(1, 7), rng.randint(1, 7)
            x, y = rng.randint(0, 18), rng.randint(0, 18)
            rects.append((x, y, x + w, y + h))
        a, b = rects
        assert gap(a, b) == naive_gap(a, b)
        assert gap(a, b) == gap(b, a)


def test_objects_in_box_and_stack_order():
    scene = Scene(
        Variant.TOWER,
        objects=(
            obj(id=0, x=L.tower_x(1), y=80),
            obj(id=1, x=L.tower_x(1), y=60, color=Color.BLACK),
            obj(id=2, x=L.tower_x(0), y=80, color=Color.YELLOW),
        ),
    )
    assert [o.id for o in objects_in_box(scene, 1)] == [0, 1]
    assert [o.id for o in tower_stack(scene, 1)] == [0, 1]  # floor first
    assert objects_in_box(scene, 2) == ()
    assert next_object_id(scene) == 3
    assert next_object_id(Scene(Variant.TOWER)) == 0


def test_tower_validator():
    good = Scene(
        Variant.TOWER,
        objects=(
            obj(id=0, x=L.tower_x(0), y=80),
            obj(id=1, x=L.tower_x(0), y=60),
            obj(id=2, x=L.tower_x(2), y=80),
        ),
    )
    validate_scene(good)

    floating = Scene(Variant.TOWER, objects=(obj(id=0, x=L.tower_x(0), y=60),))
    assert scene_problems(floating)

    off_center = Scene(Variant.TOWER, objects=(obj(id=0, x=L.tower_x(0) + 1, y=80),))
    assert scene_problems(off_center)

    wrong_kind = Scene(
        Variant.TOWER, objects=(obj(id=0, shape=Shape.CIRCLE, x=L.tower_x(0), y=80),)
    )
    assert scene_problems(wrong_kind)

    over = Scene(
        Variant.TOWER,
        objects=tuple(
            obj(id=k, x=L.tower_x(0), y=80 - 20 * k) for k in range(5)
        ),
    )
    assert any("capacity" in p for p in scene_problems(over))


def test_scatter_validator():
    good = Scene(
        Variant.SCATTER,
        objects=(
            obj(id=0, shape=Shape.CIRCLE, size=Size.SMALL, x=5, y=5),
            obj(id=1, shape=Shape.TRIANGLE, size=Size.LARGE, x=140, y=30),
        ),
    )
    validate_scene(good)

    overlapping = Scene(
        Variant.SCATTER,
        objects=(
            obj(id=0, size=Size.LARGE, x=10, y=10),
            obj(id=1, size=Size.LARGE, x=20, y=20),
        ),
    )
    assert any("overlap" in p for p in scene_problems(overlapping))

    dup = Scene(
        Variant.SCATTER,
        objects=(obj(id=0, x=0, y=0), obj(id=0, x=300, y=50, size=Size.SMALL)),
    )
    assert any("ids" in p for p in scene_problems(dup))

    astray = Scene(Variant.SCATTER, objects=(obj(id=0, x=115, y=0),))
    assert any("inside" in p for p in scene_problems(astray))


def random_scatter_scene(rng, max_objects=6):
    objects = []
    tries = 0
    while len(objects) < max_objects and tries < 200:
        tries += 1
        size = rng.choice(list(Size))
        px = L.size_px(size)
        box = rng.randrange(3)
        bx0, by0, bx1, by1 = L.box_rect(box)
        x = rng.randint(bx0, bx1 - px)
        y = rng.randint(by0, by1 - px)
        cand = PlacedObject(
            id=len(objects),
            shape=rng.choice(list(Shape)),
            color=rng.choice(list(Color)),
            size=size,
            x=x,
            y=y,
        )
        if all(
            gap(bounding_box(cand, L), bounding_box(o, L)) != -1 for o in objects
        ):
            objects.append(cand)
    return Scene(Variant.SCATTER, objects=tuple(objects))


def test_fingerprint_ignores_ids_order_and_variant():
    rng = random.Random(7)
    for _ in range(50):
        scene = random_scatter_scene(rng)
        fp = scene_fingerprint(scene)
        shuffled = list(scene.objects)
        rng.shuffle(shuffled)
        relabeled = tuple(
            PlacedObject(id=90 + i, shape=o.shape, color=o.color, size=o.size, x=o.x, y=o.y)
            for i, o in enumerate(shuffled)
        )
        assert scene_fingerprint(scene.with_objects(relabeled)) == fp
        assert scene_fingerprint(Scene(Variant.TOWER, scene.objects)) == fp


def test_fingerprint_sensitive_to_visible_change():
    rng = random.Random(8)
    for _ in range(50):
        scene = random_scatter_scene(rng)
        if not scene.objects:
            continue
        fp = scene_fingerprint(scene)
        victim = rng.choice(scene.objects)
        moved = tuple(
            PlacedObject(o.id, o.shape, o.color, o.size, o.x, o.y + 1)
            if o.id == victim.id
            else o
            for o in scene.objects
        )
        assert scene_fingerprint(scene.with_objects(moved)) != fp
        grown = scene.with_objects(scene.objects + (obj(id=99, size=Size.SMALL, x=0, y=0),))
        assert scene_fingerprint(grown) != fp


def test_fingerprint_hex_shape():
    fp = scene_fingerprint(Scene(Variant.SCATTER))
    s = fingerprint_hex(fp)
    assert len(s) == 16
    assert int(s, 16) == fp


def test_sides_enumerate_walls():
    assert {s.value for s in Side} == {"top", "bottom", "left", "right"}
