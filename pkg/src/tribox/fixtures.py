"""Deterministic synthetic MDP generation.

Every generated MDP is checked at build time: the program compiles, the
scenes pass the validator, flipit scenes disagree with the target, and a
plan found by the bundled solvers replays to a successful Stop from every
start state.  The whole pipeline is a pure function of the seed, so two
runs with the same arguments produce byte-identical files.
"""

from __future__ import annotations

import random
from hashlib import blake2b
from pathlib import Path

from .dataio import MdpSpec, mdp_problems, save_dataset
from .env import (
    COLORS,
    SHAPES,
    SIZES,
    Condition,
    EnvConfig,
    EpisodeState,
    GridAdd,
    TowerAdd,
    apply_transition,
    validate,
)
from .harness import describe_program, solve, solve_from
from .programs import compile_program, evaluate
from .scene import (
    PlacedObject,
    Scene,
    Side,
    Variant,
    bounding_box,
    object_box,
    scene_problems,
)

_FILES = (
    (Variant.TOWER, Condition.SCRATCH, "tower-scratch.jsonl"),
    (Variant.TOWER, Condition.FLIPIT, "tower-flipit.jsonl"),
    (Variant.SCATTER, Condition.SCRATCH, "scatter-scratch.jsonl"),
    (Variant.SCATTER, Condition.FLIPIT, "scatter-flipit.jsonl"),
)

_COUNT_WORDS = {2: "two", 3: "three"}


# ---------------------------------------------------------------------------
# program makers: (statement, source) pairs

def _t_exist(rng):
    c = rng.choice(COLORS).value
    return (f"there is a {c} block",
            f"exist(filter_obj(all_items, is_{c}))")


def _t_height(rng):
    k = rng.choice((2, 3, 4))
    return (f"some tower is exactly {k} blocks tall",
            f"exist(filter_obj(all_boxes, lambda x: x.is_tower() "
            f"and count(x.all_items_in_box()) == {k}))")


def _t_base(rng):
    c = rng.choice(COLORS).value
    return (f"a {c} block sits on the floor of some box",
            f"exist(filter_obj(all_items, lambda o: is_bottom(o) and is_{c}(o)))")


def _t_top(rng):
    c = rng.choice(COLORS).value
    return (f"some tower has a {c} block on top",
            f"exist(filter_obj(all_items, lambda o: is_top(o) and is_{c}(o)))")


def _t_count(rng):
    c = rng.choice(COLORS).value
    k = rng.choice((2, 3))
    return (f"there are at least {k} {c} blocks",
            f"count(filter_obj(all_items, is_{c})) >= {k}")


def _t_palette(rng):
    return ("blocks of exactly two colors are present",
            "count(get_set_colors(all_items)) == 2")


def _t_exist_not(rng):
    c1, c2 = rng.sample(COLORS, 2)
    return (f"there is a {c1.value} block but no {c2.value} block",
            f"exist(filter_obj(all_items, is_{c1.value})) "
            f"and not exist(filter_obj(all_items, is_{c2.value}))")


def _t_above(rng):
    c1, c2 = rng.sample(COLORS, 2)
    return (f"a {c1.value} block is somewhere above a {c2.value} block",
            f"exist(filter_obj(all_items, lambda a: is_{c1.value}(a) and "
            f"exist(filter_obj(all_items, lambda b: is_{c2.value}(b) "
            f"and above(a, b)))))")


_TOWER_MAKERS = (_t_exist, _t_height, _t_base, _t_top, _t_count,
                 _t_palette, _t_exist_not, _t_above)


def _rand_attrs(rng):
    keys = rng.sample(("color", "shape", "size"), rng.choice((1, 2)))
    pools = {"color": COLORS, "shape": SHAPES, "size": SIZES}
    return {key: rng.choice(pools[key]) for key in sorted(keys)}


def _attr_phrase(attrs) -> str:
    words = []
    if "size" in attrs:
        words.append(attrs["size"].value)
    if "color" in attrs:
        words.append(attrs["color"].value)
    words.append(attrs["shape"].value if "shape" in attrs else "item")
    return " ".join(words)


def _pred_source(attrs, var: str) -> str:
    terms = []
    for key in ("color", "shape", "size"):
        if key in attrs:
            terms.append(f"is_{attrs[key].value}({var})")
    return " and ".join(terms)


def _filter_source(attrs) -> str:
    if len(attrs) == 1:
        (value,) = attrs.values()
        return f"filter_obj(all_items, is_{value.value})"
    return f"filter_obj(all_items, lambda o: {_pred_source(attrs, 'o')})"


def _s_exist(rng):
    attrs = _rand_attrs(rng)
    return (f"there is at least one {_attr_phrase(attrs)}",
            f"exist({_filter_source(attrs)})")


def _s_count(rng):
    attrs = {"color": rng.choice(COLORS)}
    op, k = rng.choice((("==", 2), ("==", 3), (">=", 2), (">=", 3)))
    quant = "exactly" if op == "==" else "at least"
    return (f"there are {quant} {k} {attrs['color'].value} items",
            f"count({_filter_source(attrs)}) {op} {k}")


def _s_palette(rng):
    k = rng.choice((2, 3))
    return (f"items of exactly {_COUNT_WORDS[k]} different colors are present",
            f"count(get_set_colors(all_items)) == {k}")


def _s_box_palette(rng):
    k = rng.choice((2, 3))
    return (f"some box holds items of exactly {_COUNT_WORDS[k]} colors",
            f"exist(filter_obj(all_boxes, lambda x: "
            f"count(get_set_colors(x.all_items_in_box())) == {k}))")


def _s_touch(rng):
    c1, c2 = rng.sample(COLORS, 2)
    return (f"a {c1.value} item is touching a {c2.value} item",
            f"exist(filter_obj(all_items, lambda a: is_{c1.value}(a) and "
            f"exist(filter_obj(all_items, lambda b: is_{c2.value}(b) "
            f"and is_touching(a, b)))))")


def _s_near(rng):
    c1, c2 = rng.sample(COLORS, 2)
    return (f"a {c1.value} item sits close to a {c2.value} item "
            f"without touching it",
            f"exist(filter_obj(all_items, lambda a: is_{c1.value}(a) and "
            f"exist(filter_obj(all_items, lambda b: is_{c2.value}(b) "
            f"and is_nearly_touching(a, b)))))")


def _s_wall(rng):
    c = rng.choice(COLORS).value
    side = rng.choice(tuple(Side))
    return (f"a {c} item touches the {side.value} wall of its box",
            f"exist(filter_obj(all_items, lambda o: is_{c}(o) "
            f"and is_touching_wall(o, Side.{side.name})))")


def _s_exist_not(rng):
    c1, c2 = rng.sample(COLORS, 2)
    return (f"there is a {c1.value} item but no {c2.value} item",
            f"exist(filter_obj(all_items, is_{c1.value})) "
            f"and not exist(filter_obj(all_items, is_{c2.value}))")


_SCATTER_SCRATCH_MAKERS = (_s_exist, _s_count, _s_palette, _s_box_palette,
                           _s_touch, _s_wall, _s_exist_not)
# nearly-touching layouts cannot be built through the snapping grid, so the
# family only appears as a flipit start state to be dismantled
_SCATTER_FLIPIT_MAKERS = _SCATTER_SCRATCH_MAKERS + (_s_near,)


# ---------------------------------------------------------------------------
# conditioned scene construction

def _obj_matches(obj, attrs) -> bool:
    return all(getattr(obj, key) == value for key, value in attrs.items())


def _rand_spec(rng, attrs):
    shape = attrs["shape"] if "shape" in attrs else rng.choice(SHAPES)
    color = attrs["color"] if "color" in attrs else rng.choice(COLORS)
    size = attrs["size"] if "size" in attrs else rng.choice(SIZES)
    return (shape, color, size)


def _next_id(objs) -> int:
    return max((o.id for o in objs), default=-1) + 1


def _place(rng, objs, spec, config, box=None, side=None, attempts=50):
    """A validator-clean placement of ``spec`` among ``objs``, optionally
    pinned to a box or flush against one side of it."""
    layout = config.layout
    px = layout.size_px(spec[2])
    for _ in range(attempts):
        b = box if box is not None else rng.randrange(layout.box_count)
        bx0, _, bx1, _ = layout.box_rect(b)
        x = rng.randrange(bx0, bx1 - px + 1)
        y = rng.randrange(0, layout.canvas_h - px + 1)
        if side is Side.TOP:
            y = 0
        elif side is Side.BOTTOM:
            y = layout.canvas_h - px
        elif side is Side.LEFT:
            x = bx0
        elif side is Side.RIGHT:
            x = bx1 - px
        candidate = PlacedObject(_next_id(objs), spec[0], spec[1], spec[2], x, y)
        trial = Scene(Variant.SCATTER, tuple(objs) + (candidate,), layout)
        if not scene_problems(trial):
            return candidate
    return None


def _touches_side(obj, side: Side, layout) -> bool:
    bb = bounding_box(obj, layout)
    bx0, _, bx1, _ = layout.box_rect(object_box(obj, layout))
    return {
        Side.TOP: bb[1] == 0,
        Side.BOTTOM: bb[3] == layout.canvas_h,
        Side.LEFT: bb[0] == bx0,
        Side.RIGHT: bb[2] == bx1,
    }[side]


def _random_scatter_objects(rng, config, n_max=5):
    scene = Scene(Variant.SCATTER, (), config.layout)
    for _ in range(rng.randrange(0, n_max + 1)):
        for _attempt in range(20):
            action = GridAdd(rng.randrange(config.grid_cols),
                             rng.randrange(config.grid_rows),
                             rng.choice(SHAPES), rng.choice(COLORS),
                             rng.choice(SIZES))
            if validate(EpisodeState(scene), action, config) is None:
                scene = apply_transition(scene, action, config)
                break
    return list(scene.objects)


def _scatter_scene_for(rng, program, desc, desired: bool, config):
    """A scatter scene whose truth value under ``program`` is ``desired``,
    shaped so the scripted solver can flip it; None when a draw fails."""
    layout = config.layout
    objs = _random_scatter_objects(rng, config)
    kind = desc[0]

    if kind == "exist":
        attrs = desc[1]
        if desired:
            got = _place(rng, objs, _rand_spec(rng, attrs), config)
            if got is None:
                return None
            objs.append(got)
        else:
            objs = [o for o in objs if not _obj_matches(o, attrs)]

    elif kind == "count":
        _, op, attrs, k = desc
        objs = [o for o in objs if not _obj_matches(o, attrs)]
        if op == "==":
            j = k if desired else rng.choice([x for x in range(k + 2) if x != k])
        else:
            j = k + rng.randrange(0, 2) if desired else rng.randrange(0, k)
        for _ in range(j):
            got = _place(rng, objs, _rand_spec(rng, attrs), config)
            if got is None:
                return None
            objs.append(got)

    elif kind == "palette":
        k = desc[1]
        objs = []
        m = k if desired else rng.choice([x for x in (1, 2, 3) if x != k])
        for color in rng.sample(COLORS, m):
            for _ in range(1 + rng.randrange(0, 2)):
                got = _place(rng, objs, _rand_spec(rng, {"color": color}), config)
                if got is None:
                    return None
                objs.append(got)

    elif kind == "box_palette":
        k = desc[1]
        objs = []
        lucky = rng.randrange(layout.box_count) if desired else None
        for b in range(layout.box_count):
            if b == lucky:
                m = k
            else:
                m = rng.choice([x for x in (0, 1, 2, 3) if x != k])
            for color in rng.sample(COLORS, m):
                got = _place(rng, objs, _rand_spec(rng, {"color": color}),
                             config, box=b)
                if got is None:
                    return None
                objs.append(got)

    elif kind == "pair":
        _, a_attrs, b_attrs, mode = desc
        objs = [o for o in objs
                if not (_obj_matches(o, a_attrs) or _obj_matches(o, b_attrs))]
        if desired:
            spec_a = _rand_spec(rng, a_attrs)
            spec_b = _rand_spec(rng, b_attrs)
            pxa = layout.size_px(spec_a[2])
            pxb = layout.size_px(spec_b[2])
            gap = 0 if mode == "touch" else rng.randrange(1, 5)
            for _attempt in range(60):
                b = rng.randrange(layout.box_count)
                bx0, _, bx1, _ = layout.box_rect(b)
                span = pxa + gap + pxb
                if span > bx1 - bx0:
                    continue
                x = rng.randrange(bx0, bx1 - span + 1)
                y = rng.randrange(0, layout.canvas_h - max(pxa, pxb) + 1)
                nid = _next_id(objs)
                pair = (
                    PlacedObject(nid, *spec_a, x, y),
                    PlacedObject(nid + 1, *spec_b, x + pxa + gap, y),
                )
                trial = Scene(Variant.SCATTER, tuple(objs) + pair, layout)
                if not scene_problems(trial):
                    objs.extend(pair)
                    break
            else:
                return None

    elif kind == "wall":
        _, attrs, side = desc
        if desired:
            got = _place(rng, objs, _rand_spec(rng, attrs), config, side=side)
            if got is None:
                return None
            objs.append(got)
        else:
            objs = [o for o in objs
                    if not (_obj_matches(o, attrs)
                            and _touches_side(o, side, layout))]

    elif kind == "exist_not":
        _, a_attrs, b_attrs = desc
        if desired:
            objs = [o for o in objs if not _obj_matches(o, b_attrs)]
            if not any(_obj_matches(o, a_attrs) for o in objs):
                got = _place(rng, objs, _rand_spec(rng, a_attrs), config)
                if got is None:
                    return None
                objs.append(got)
        else:
            got = _place(rng, objs, _rand_spec(rng, b_attrs), config)
            if got is None:
                return None
            objs.append(got)

    else:
        return None

    scene = Scene(Variant.SCATTER, tuple(objs), layout)
    if scene_problems(scene) or evaluate(program, scene) != desired:
        return None
    return scene


def _random_tower_scene(rng, config):
    scene = Scene(Variant.TOWER, (), config.layout)
    for box in range(config.layout.box_count):
        for _ in range(rng.randrange(0, 4)):
            scene = apply_transition(scene, TowerAdd(box, rng.choice(COLORS)),
                                     config)
    return scene


def _tower_scene_for(rng, program, desired: bool, config):
    for _ in range(200):
        scene = _random_tower_scene(rng, config)
        if evaluate(program, scene) == desired:
            return scene
    return None


# ---------------------------------------------------------------------------
# assembly

def _split_for(index: int, count: int) -> str:
    n_train = (count * 3) // 5
    n_dev = count // 5
    if index < n_train:
        return "train"
    if index < n_train + n_dev:
        return "dev"
    return "test"


def _make_mdp(rng, variant: Variant, condition: Condition, index: int,
              count: int) -> MdpSpec:
    split = _split_for(index, count)
    mdp_id = f"{variant.value}-{condition.value}-{index:03d}"
    config = EnvConfig(variant=variant, condition=condition)
    if variant is Variant.TOWER:
        makers = _TOWER_MAKERS
    elif condition is Condition.SCRATCH:
        makers = _SCATTER_SCRATCH_MAKERS
    else:
        makers = _SCATTER_FLIPIT_MAKERS

    for _attempt in range(120):
        maker = rng.choice(makers)
        statement, source = maker(rng)
        program = compile_program(source)

        if condition is Condition.SCRATCH:
            spec = MdpSpec(mdp_id, variant, condition, statement, source,
                           True, (), split)
            if solve(spec, config=config) is not None:
                return spec
            continue

        desc = describe_program(program) if variant is Variant.SCATTER else None
        if variant is Variant.SCATTER and desc is None:
            continue
        if desc is not None and desc[0] == "pair" and desc[3] == "near":
            desired = True  # the solver can only take such pairs apart
        else:
            desired = rng.random() < 0.5
        n_scenes = rng.randrange(1, 4)
        scenes = []
        guard = 0
        while len(scenes) < n_scenes and guard < 120:
            guard += 1
            if variant is Variant.TOWER:
                scene = _tower_scene_for(rng, program, desired, config)
            else:
                scene = _scatter_scene_for(rng, program, desc, desired, config)
            if scene is None:
                continue
            probe = MdpSpec(mdp_id, variant, condition, statement, source,
                            not desired, (scene,), split)
            if solve_from(probe, scene, config) is not None:
                scenes.append(scene)
        if len(scenes) == n_scenes:
            spec = MdpSpec(mdp_id, variant, condition, statement, source,
                           not desired, tuple(scenes), split)
            assert not mdp_problems(spec)
            return spec
    raise RuntimeError(f"could not assemble a solvable MDP for {mdp_id}")


def _stream_seed(seed: int, variant: Variant, condition: Condition) -> int:
    digest = blake2b(f"{seed}:{variant.value}:{condition.value}".encode(),
                     digest_size=8)
    return int.from_bytes(digest.digest(), "big")


def generate_fixtures(seed: int, count: int, out_dir):
    """Write the four dataset files into ``out_dir`` and return their paths
    in a fixed order."""
    if count < 1:
        raise ValueError("count must be at least 1")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for variant, condition, name in _FILES:
        rng = random.Random(_stream_seed(seed, variant, condition))
        specs = [_make_mdp(rng, variant, condition, i, count)
                 for i in range(count)]
        path = out / name
        save_dataset(path, specs)
        paths.append(path)
    return tuple(paths)
