import hashlib
import random

import numpy as np
import pytest

from oracles import random_scatter
from tribox.render import DEFAULT_PALETTE, Palette, export_png, load_png, render
from tribox.scene import (
    Color,
    Layout,
    PlacedObject,
    Scene,
    Shape,
    Size,
    Variant,
    bounding_box,
)

L = Layout()


def sq(id, box, level, color):
    return PlacedObject(id, Shape.SQUARE, color, Size.MEDIUM,
                        L.tower_x(box), L.canvas_h - (level + 1) * L.medium_px)


EMPTY = Scene(Variant.SCATTER)
TOWER4 = Scene(Variant.TOWER, tuple(
    sq(i, 1, i, [Color.BLUE, Color.BLACK, Color.YELLOW, Color.BLUE][i])
    for i in range(4)
))
MIXED = Scene(Variant.SCATTER, (
    PlacedObject(0, Shape.CIRCLE, Color.BLUE, Size.LARGE, 10, 10),
    PlacedObject(1, Shape.TRIANGLE, Color.BLACK, Size.MEDIUM, 140, 0),
    PlacedObject(2, Shape.SQUARE, Color.YELLOW, Size.SMALL, 360, 90),
    PlacedObject(3, Shape.TRIANGLE, Color.YELLOW, Size.SMALL, 270, 45),
))

# hashes generated once from this renderer, then frozen
GOLDEN_SHA256 = {
    "empty": "cb73eb1830d546b088fbb28635ada0e6dab33f4f3abac0ebae5dae516ed4cd77",
    "tower4": "96fd256a504e7570e9c01eae3be2e2d08bc72a1040bdaba1d18e90b596212d04",
    "mixed": "a5c01cf24560fae188a842ea9fce8f70f641b75d3fda55cbe228ce9e0c139e94",
}


def count_color(buf, rgb):
    return int((buf == np.array(rgb, dtype=np.uint8)).all(axis=2).sum())


def test_buffer_shape_and_dtype():
    buf = render(EMPTY)
    assert buf.shape == (100, 380, 3)
    assert buf.dtype == np.uint8


def test_empty_scene_pixel_audit():
    buf = render(EMPTY)
    sep = count_color(buf, DEFAULT_PALETTE.separator)
    bg = count_color(buf, DEFAULT_PALETTE.background)
    assert sep == 2 * L.separator_width * L.canvas_h == 2000
    assert bg == 380 * 100 - 2000


def test_medium_square_is_400_pixels():
    scene = Scene(Variant.SCATTER,
                  (PlacedObject(0, Shape.SQUARE, Color.BLUE, Size.MEDIUM, 30, 40),))
    buf = render(scene)
    assert count_color(buf, DEFAULT_PALETTE.blue) == 400


def test_shape_fill_counts():
    # frozen integer-rasterization counts per size
    expected = {
        (Shape.CIRCLE, Size.SMALL): 80,
        (Shape.CIRCLE, Size.MEDIUM): 316,
        (Shape.CIRCLE, Size.LARGE): 716,
        (Shape.TRIANGLE, Size.SMALL): 60,
        (Shape.TRIANGLE, Size.MEDIUM): 220,
        (Shape.TRIANGLE, Size.LARGE): 480,
        (Shape.SQUARE, Size.SMALL): 100,
        (Shape.SQUARE, Size.LARGE): 900,
    }
    for (shape, size), count in expected.items():
        scene = Scene(Variant.SCATTER,
                      (PlacedObject(0, shape, Color.BLACK, size, 40, 30),))
        assert count_color(render(scene), DEFAULT_PALETTE.black) == count


def test_fills_stay_inside_bounding_box_and_are_symmetric():
    for shape in (Shape.CIRCLE, Shape.TRIANGLE, Shape.SQUARE):
        scene = Scene(Variant.SCATTER,
                      (PlacedObject(0, shape, Color.BLUE, Size.MEDIUM, 50, 40),))
        buf = render(scene)
        hit = (buf == np.array(DEFAULT_PALETTE.blue, dtype=np.uint8)).all(axis=2)
        ys, xs = np.nonzero(hit)
        assert xs.min() >= 50 and xs.max() < 70
        assert ys.min() >= 40 and ys.max() < 60
        window = hit[40:60, 50:70]
        assert (window == window[:, ::-1]).all()  # left-right mirror
        if shape is Shape.TRIANGLE:
            assert window[0].sum() == 2    # two-pixel apex at even size
            assert window[-1].sum() == 20  # full base row
            assert (window.sum(axis=1)[1:] >= window.sum(axis=1)[:-1]).all()
        if shape is Shape.CIRCLE:
            assert not window[0, 0] and not window[0, -1]
            assert not window[-1, 0] and not window[-1, -1]
            assert (window == window[::-1, :]).all()  # top-bottom mirror too


def test_determinism_and_painter_order():
    rng = random.Random(5)
    for _ in range(20):
        scene = random_scatter(rng)
        a = render(scene)
        b = render(scene)
        assert a.tobytes() == b.tobytes()
        shuffled = list(scene.objects)
        rng.shuffle(shuffled)
        relabeled = tuple(
            PlacedObject(40 + i, o.shape, o.color, o.size, o.x, o.y)
            for i, o in enumerate(shuffled)
        )
        assert render(scene.with_objects(relabeled)).tobytes() == a.tobytes()


def test_object_regions_are_disjoint():
    rng = random.Random(13)
    for _ in range(10):
        scene = random_scatter(rng)
        buf = render(scene)
        non_scene = (count_color(buf, DEFAULT_PALETTE.background)
                     + count_color(buf, DEFAULT_PALETTE.separator))
        object_pixels = 380 * 100 - non_scene
        per_object = 0
        for o in scene.objects:
            x0, y0, x1, y1 = bounding_box(o, L)
            window = buf[y0:y1, x0:x1]
            per_object += int(
                (window == np.array(DEFAULT_PALETTE.object_color(o.color),
                                    dtype=np.uint8)).all(axis=2).sum())
        assert per_object == object_pixels


def test_goldens():
    for name, scene in [("empty", EMPTY), ("tower4", TOWER4), ("mixed", MIXED)]:
        digest = hashlib.sha256(render(scene).tobytes()).hexdigest()
        assert digest == GOLDEN_SHA256[name], name


def test_png_round_trip(tmp_path):
    buf = render(MIXED)
    out = tmp_path / "scene.png"
    export_png(buf, out)
    back = load_png(out)
    assert np.array_equal(back, buf)


def test_png_write_error_names_path(tmp_path):
    buf = render(EMPTY)
    bad = tmp_path / "missing-dir" / "scene.png"
    with pytest.raises(OSError, match="missing-dir"):
        export_png(buf, bad)


def test_palette_invariants():
    with pytest.raises(ValueError):
        Palette(separator=(211, 211, 211))  # not darker than background
    with pytest.raises(ValueError):
        Palette(separator=(90, 90, 290))
    with pytest.raises(ValueError):
        Palette(blue=(255, 204, 0))  # collides with yellow
    custom = Palette(background=(240, 240, 240), separator=(10, 10, 10))
    scene = Scene(Variant.SCATTER,
                  (PlacedObject(0, Shape.SQUARE, Color.BLUE, Size.SMALL, 0, 0),))
    buf = render(scene, custom)
    assert count_color(buf, (240, 240, 240)) > 0
