"""The decision-process engine: actions, validity, transitions, reward.

An episode is a pure state machine.  ``step`` implements the four-case
reward, checked top-down:

1. Stop while the program's truth value equals the target  -> +1.0
2. Stop otherwise                                          -> -1.0
3. invalid action, or a valid non-stop action that lands
   on the horizon                                          -> -1.0
4. any other valid action                                  -> -verbosity_penalty

Invalid actions never change the scene; the horizon case applies its
transition first.  The context (statement, program, target) is never
modified by stepping.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .programs import evaluate
from .scene import (
    Color,
    Layout,
    PlacedObject,
    Scene,
    Shape,
    Size,
    Variant,
    bounding_box,
    gap,
    next_object_id,
    objects_in_box,
    scene_fingerprint,
    tower_stack,
)

SHAPES = tuple(Shape)
COLORS = tuple(Color)
SIZES = tuple(Size)


class Condition(str, Enum):
    SCRATCH = "scratch"  # start from an empty canvas, build toward the target
    FLIPIT = "flipit"    # start from a drawn scene, flip its truth value


class ActionMode(str, Enum):
    PIXEL = "pixel"
    GRID = "grid"


class InvalidReason(str, Enum):
    TOWER_ADD_FULL = "tower_add_full"
    TOWER_REMOVE_EMPTY = "tower_remove_empty"
    SCATTER_OVERLAP = "scatter_overlap"
    SCATTER_OUT_OF_BOUNDS = "scatter_out_of_bounds"
    SCATTER_REMOVE_EMPTY = "scatter_remove_empty"
    GRID_ADD_NO_FIT = "grid_add_no_fit"
    GRID_REMOVE_EMPTY = "grid_remove_empty"


class VariantMismatch(TypeError):
    """Action type does not belong to the configured action space."""


class EpisodeDone(RuntimeError):
    """Stepping a finished episode is a usage error."""


@dataclass(frozen=True)
class EnvConfig:
    variant: Variant = Variant.TOWER
    condition: Condition = Condition.SCRATCH
    horizon: int = 12
    verbosity_penalty: float = 0.02
    action_mode: ActionMode = ActionMode.GRID  # scatter only; tower ignores it
    grid_cols: int = 19
    grid_rows: int = 5
    snap_threshold: int = 4
    layout: Layout = Layout()

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if not 0 <= self.verbosity_penalty < 1:
            raise ValueError("verbosity penalty must lie in [0, 1)")
        if self.grid_cols < 1 or self.grid_rows < 1:
            raise ValueError("grid dimensions must be positive")
        if (self.layout.canvas_w % self.grid_cols
                or self.layout.canvas_h % self.grid_rows):
            raise ValueError("grid cells must tile the canvas evenly")
        if self.snap_threshold < 0:
            raise ValueError("snap threshold must be non-negative")

    @property
    def cell_w(self) -> int:
        return self.layout.canvas_w // self.grid_cols

    @property
    def cell_h(self) -> int:
        return self.layout.canvas_h // self.grid_rows

    def cell_rect(self, col: int, row: int):
        if not (0 <= col < self.grid_cols and 0 <= row < self.grid_rows):
            raise ValueError(f"cell ({col}, {row}) out of grid bounds")
        x0, y0 = col * self.cell_w, row * self.cell_h
        return (x0, y0, x0 + self.cell_w, y0 + self.cell_h)


# ---------------------------------------------------------------------------
# actions

@dataclass(frozen=True)
class Stop:
    pass


@dataclass(frozen=True)
class TowerAdd:
    box: int
    color: Color


@dataclass(frozen=True)
class TowerRemove:
    box: int


@dataclass(frozen=True)
class ScatterAdd:
    x: int
    y: int
    shape: Shape
    color: Color
    size: Size


@dataclass(frozen=True)
class ScatterRemove:
    x: int
    y: int


@dataclass(frozen=True)
class GridAdd:
    col: int
    row: int
    shape: Shape
    color: Color
    size: Size


@dataclass(frozen=True)
class GridRemove:
    col: int
    row: int


Action = Stop | TowerAdd | TowerRemove | ScatterAdd | ScatterRemove | GridAdd | GridRemove

_N_COMBOS = len(SHAPES) * len(COLORS) * len(SIZES)  # 27 object specs


def action_space_size(config: EnvConfig) -> int:
    """Exact cardinality of the configured action set (Stop included)."""
    if config.variant is Variant.TOWER:
        boxes = config.layout.box_count
        return 1 + boxes * len(COLORS) + boxes
    if config.action_mode is ActionMode.PIXEL:
        pixels = config.layout.canvas_w * config.layout.canvas_h
        return 1 + pixels * (_N_COMBOS + 1)
    cells = config.grid_cols * config.grid_rows
    return 1 + cells * (_N_COMBOS + 1)


def _combo_index(shape: Shape, color: Color, size: Size) -> int:
    return (SHAPES.index(shape) * len(COLORS) + COLORS.index(color)) * len(SIZES) + SIZES.index(size)


def _combo_from_index(i: int):
    zi = i % len(SIZES)
    ci = (i // len(SIZES)) % len(COLORS)
    si = i // (len(SIZES) * len(COLORS))
    return SHAPES[si], COLORS[ci], SIZES[zi]


def action_index(action: Action, config: EnvConfig) -> int:
    """Position of an action in the canonical enumeration: Stop, then every
    ADD (row-major coordinates, then shape/color/size), then every REMOVE."""
    _check_action_domain(action, config)
    if isinstance(action, Stop):
        return 0
    if config.variant is Variant.TOWER:
        boxes = config.layout.box_count
        if isinstance(action, TowerAdd):
            return 1 + action.box * len(COLORS) + COLORS.index(action.color)
        return 1 + boxes * len(COLORS) + action.box
    if config.action_mode is ActionMode.PIXEL:
        w = config.layout.canvas_w
        pixels = w * config.layout.canvas_h
        if isinstance(action, ScatterAdd):
            flat = action.y * w + action.x
            return 1 + flat * _N_COMBOS + _combo_index(action.shape, action.color, action.size)
        return 1 + pixels * _N_COMBOS + action.y * w + action.x
    cells = config.grid_cols * config.grid_rows
    if isinstance(action, GridAdd):
        flat = action.row * config.grid_cols + action.col
        return 1 + flat * _N_COMBOS + _combo_index(action.shape, action.color, action.size)
    return 1 + cells * _N_COMBOS + action.row * config.grid_cols + action.col


def action_from_index(index: int, config: EnvConfig) -> Action:
    size = action_space_size(config)
    if not 0 <= index < size:
        raise ValueError(f"action index {index} out of range [0, {size})")
    if index == 0:
        return Stop()
    index -= 1
    if config.variant is Variant.TOWER:
        boxes = config.layout.box_count
        if index < boxes * len(COLORS):
            return TowerAdd(box=index // len(COLORS), color=COLORS[index % len(COLORS)])
        return TowerRemove(box=index - boxes * len(COLORS))
    if config.action_mode is ActionMode.PIXEL:
        w = config.layout.canvas_w
        pixels = w * config.layout.canvas_h
        if index < pixels * _N_COMBOS:
            flat, combo = divmod(index, _N_COMBOS)
            shape, color, sz = _combo_from_index(combo)
            return ScatterAdd(x=flat % w, y=flat // w, shape=shape, color=color, size=sz)
        flat = index - pixels * _N_COMBOS
        return ScatterRemove(x=flat % w, y=flat // w)
    cells = config.grid_cols * config.grid_rows
    if index < cells * _N_COMBOS:
        flat, combo = divmod(index, _N_COMBOS)
        shape, color, sz = _combo_from_index(combo)
        return GridAdd(col=flat % config.grid_cols, row=flat // config.grid_cols,
                       shape=shape, color=color, size=sz)
    flat = index - cells * _N_COMBOS
    return GridRemove(col=flat % config.grid_cols, row=flat // config.grid_cols)


def iter_actions(config: EnvConfig):
    """Every action in index order.  Fine for TOWER and GRID; the PIXEL
    space has a million entries, so iterate it knowingly."""
    for i in range(action_space_size(config)):
        yield action_from_index(i, config)


def _check_action_domain(action: Action, config: EnvConfig) -> None:
    """Raise VariantMismatch / ValueError for actions outside the space."""
    layout = config.layout
    if isinstance(action, Stop):
        return
    if config.variant is Variant.TOWER:
        if not isinstance(action, (TowerAdd, TowerRemove)):
            raise VariantMismatch(f"{type(action).__name__} in a TOWER environment")
        if not 0 <= action.box < layout.box_count:
            raise ValueError(f"box {action.box} out of range")
        return
    if config.action_mode is ActionMode.PIXEL:
        if not isinstance(action, (ScatterAdd, ScatterRemove)):
            raise VariantMismatch(f"{type(action).__name__} in a SCATTER/PIXEL environment")
        if not (0 <= action.x < layout.canvas_w and 0 <= action.y < layout.canvas_h):
            raise ValueError(f"pixel ({action.x}, {action.y}) out of canvas")
        return
    if not isinstance(action, (GridAdd, GridRemove)):
        raise VariantMismatch(f"{type(action).__name__} in a SCATTER/GRID environment")
    if not (0 <= action.col < config.grid_cols and 0 <= action.row < config.grid_rows):
        raise ValueError(f"cell ({action.col}, {action.row}) out of grid bounds")


# JSON codec ---------------------------------------------------------------

_ACTION_TAGS = {
    Stop: "stop",
    TowerAdd: "tower_add",
    TowerRemove: "tower_remove",
    ScatterAdd: "scatter_add",
    ScatterRemove: "scatter_remove",
    GridAdd: "grid_add",
    GridRemove: "grid_remove",
}


def action_to_json(action: Action) -> dict:
    out = {"type": _ACTION_TAGS[type(action)]}
    for name in getattr(action, "__dataclass_fields__", {}):
        value = getattr(action, name)
        out[name] = value.value if isinstance(value, Enum) else value
    return out


def action_from_json(data: dict) -> Action:
    if not isinstance(data, dict) or "type" not in data:
        raise ValueError("action JSON must be an object with a 'type' tag")
    tag = data["type"]
    try:
        if tag == "stop":
            return Stop()
        if tag == "tower_add":
            return TowerAdd(box=int(data["box"]), color=Color(data["color"]))
        if tag == "tower_remove":
            return TowerRemove(box=int(data["box"]))
        if tag == "scatter_add":
            return ScatterAdd(x=int(data["x"]), y=int(data["y"]),
                              shape=Shape(data["shape"]), color=Color(data["color"]),
                              size=Size(data["size"]))
        if tag == "scatter_remove":
            return ScatterRemove(x=int(data["x"]), y=int(data["y"]))
        if tag == "grid_add":
            return GridAdd(col=int(data["col"]), row=int(data["row"]),
                           shape=Shape(data["shape"]), color=Color(data["color"]),
                           size=Size(data["size"]))
        if tag == "grid_remove":
            return GridRemove(col=int(data["col"]), row=int(data["row"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed action JSON for type {tag!r}: {exc}") from exc
    raise ValueError(f"unknown action type {tag!r}")


# ---------------------------------------------------------------------------
# episode state

@dataclass(frozen=True)
class Stopped:
    success: bool

    @property
    def kind(self) -> str:
        return "stopped_success" if self.success else "stopped_failure"


@dataclass(frozen=True)
class InvalidAction:
    reason: InvalidReason
    kind: str = field(default="invalid_action", init=False)


@dataclass(frozen=True)
class Horizon:
    kind: str = field(default="horizon", init=False)


Termination = Stopped | InvalidAction | Horizon


def termination_string(termination) -> str:
    return "none" if termination is None else termination.kind


@dataclass(frozen=True)
class Context:
    """What conditions an episode: the statement, its program, the target."""
    statement: str
    program: object  # kind-checked AST
    target: bool


@dataclass(frozen=True)
class EpisodeState:
    scene: Scene
    t: int = 0
    termination: Termination | None = None

    @property
    def done(self) -> bool:
        return self.termination is not None


# ---------------------------------------------------------------------------
# validity

def validate(state: EpisodeState, action: Action, config: EnvConfig) -> InvalidReason | None:
    """None when the action is applicable, otherwise why it is not.

    Stop is always valid.  Malformed actions (wrong variant/mode, coords
    outside the canvas or grid) are usage errors and raise instead.
    """
    _check_action_domain(action, config)
    scene = state.scene
    layout = config.layout
    if isinstance(action, Stop):
        return None
    if isinstance(action, TowerAdd):
        if len(objects_in_box(scene, action.box)) >= layout.tower_capacity:
            return InvalidReason.TOWER_ADD_FULL
        return None
    if isinstance(action, TowerRemove):
        if not objects_in_box(scene, action.box):
            return InvalidReason.TOWER_REMOVE_EMPTY
        return None
    if isinstance(action, ScatterAdd):
        px = layout.size_px(action.size)
        rect = (action.x, action.y, action.x + px, action.y + px)
        if layout.box_of_rect(rect) is None:
            return InvalidReason.SCATTER_OUT_OF_BOUNDS
        for o in scene.objects:
            if gap(rect, bounding_box(o, layout)) == -1:
                return InvalidReason.SCATTER_OVERLAP
        return None
    if isinstance(action, ScatterRemove):
        if _object_covering(scene, action.x, action.y) is None:
            return InvalidReason.SCATTER_REMOVE_EMPTY
        return None
    if isinstance(action, GridAdd):
        spec = (action.shape, action.color, action.size)
        if grid_place(scene, (action.col, action.row), spec, config) is None:
            return InvalidReason.GRID_ADD_NO_FIT
        return None
    if isinstance(action, GridRemove):
        if grid_remove_target(scene, (action.col, action.row), config) is None:
            return InvalidReason.GRID_REMOVE_EMPTY
        return None
    raise VariantMismatch(f"unhandled action {action!r}")


def _object_covering(scene: Scene, x: int, y: int) -> PlacedObject | None:
    """The object whose bounding box covers pixel (x, y): closed on the
    top/left edges, open on the bottom/right."""
    for o in scene.objects:
        x0, y0, x1, y1 = bounding_box(o, scene.layout)
        if x0 <= x < x1 and y0 <= y < y1:
            return o
    return None


# ---------------------------------------------------------------------------
# grid simplification heuristics

def _fits(scene: Scene, rect) -> bool:
    if scene.layout.box_of_rect(rect) is None:
        return False
    return all(gap(rect, bounding_box(o, scene.layout)) != -1 for o in scene.objects)


def grid_place(scene: Scene, cell, spec, config: EnvConfig):
    """Concrete top-left pixel for an ADD aimed at a grid cell, or None.

    Candidate anchors are scanned row-major from the cell's upper-left
    corner (the object itself may extend past the cell).  The first
    candidate that fits is taken, except that a candidate whose nearest
    same-box neighbour sits within snap range (gap in [1, snap_threshold])
    is translated to touch that neighbour; if the translated position no
    longer fits, the candidate is rejected and the scan moves on.
    """
    col, row = cell
    cx0, cy0, cx1, cy1 = config.cell_rect(col, row)
    shape, color, size = spec
    layout = config.layout
    px = layout.size_px(size)
    for y in range(cy0, cy1):
        for x in range(cx0, cx1):
            rect = (x, y, x + px, y + px)
            if not _fits(scene, rect):
                continue
            snapped = _snap(scene, rect, config)
            if snapped is None:
                return (x, y)
            if _fits(scene, snapped):
                return (snapped[0], snapped[1])
            # snap target blocked: reject this candidate, keep scanning
    return None


def _snap(scene: Scene, rect, config: EnvConfig):
    """Translated rect touching its nearest in-range neighbour, or None
    when no snap applies (nothing nearby, or already touching)."""
    layout = config.layout
    box = layout.box_of_rect(rect)
    neighbours = []
    for o in scene.objects:
        ob = bounding_box(o, layout)
        if layout.box_of_rect(ob) == box:
            neighbours.append((gap(rect, ob), o.id, ob))
    if not neighbours:
        return None
    g, _, target = min(neighbours)
    if not 1 <= g <= config.snap_threshold:
        return None
    x0, y0, x1, y1 = rect
    tx0, ty0, tx1, ty1 = target
    dx = dy = 0
    if tx0 - x1 > 0:        # neighbour to the right
        dx = tx0 - x1
    elif x0 - tx1 > 0:      # neighbour to the left
        dx = -(x0 - tx1)
    if ty0 - y1 > 0:        # neighbour below
        dy = ty0 - y1
    elif y0 - ty1 > 0:      # neighbour above
        dy = -(y0 - ty1)
    return (x0 + dx, y0 + dy, x1 + dx, y1 + dy)


def grid_remove_target(scene: Scene, cell, config: EnvConfig) -> int | None:
    """Id of the object with the largest bounding-box intersection with the
    cell rectangle (ties to the lowest id); None when nothing intersects."""
    col, row = cell
    cx0, cy0, cx1, cy1 = config.cell_rect(col, row)
    best = None
    for o in scene.objects:
        x0, y0, x1, y1 = bounding_box(o, scene.layout)
        area = max(0, min(x1, cx1) - max(x0, cx0)) * max(0, min(y1, cy1) - max(y0, cy0))
        if area > 0:
            key = (-area, o.id)
            if best is None or key < best[0]:
                best = (key, o.id)
    return None if best is None else best[1]


# ---------------------------------------------------------------------------
# transition

def apply_transition(scene: Scene, action: Action, config: EnvConfig) -> Scene:
    """Scene after a *valid* non-stop action."""
    layout = config.layout
    if isinstance(action, TowerAdd):
        stack = tower_stack(scene, action.box)
        new = PlacedObject(
            id=next_object_id(scene),
            shape=Shape.SQUARE, color=action.color, size=Size.MEDIUM,
            x=layout.tower_x(action.box),
            y=layout.canvas_h - (len(stack) + 1) * layout.medium_px,
        )
        return scene.with_objects(scene.objects + (new,))
    if isinstance(action, TowerRemove):
        top = tower_stack(scene, action.box)[-1]
        return scene.with_objects(o for o in scene.objects if o.id != top.id)
    if isinstance(action, ScatterAdd):
        new = PlacedObject(id=next_object_id(scene), shape=action.shape,
                           color=action.color, size=action.size,
                           x=action.x, y=action.y)
        return scene.with_objects(scene.objects + (new,))
    if isinstance(action, ScatterRemove):
        victim = _object_covering(scene, action.x, action.y)
        return scene.with_objects(o for o in scene.objects if o.id != victim.id)
    if isinstance(action, GridAdd):
        spec = (action.shape, action.color, action.size)
        x, y = grid_place(scene, (action.col, action.row), spec, config)
        new = PlacedObject(id=next_object_id(scene), shape=action.shape,
                           color=action.color, size=action.size, x=x, y=y)
        return scene.with_objects(scene.objects + (new,))
    if isinstance(action, GridRemove):
        victim = grid_remove_target(scene, (action.col, action.row), config)
        return scene.with_objects(o for o in scene.objects if o.id != victim)
    raise VariantMismatch(f"no transition for {action!r}")


# ---------------------------------------------------------------------------
# stepping

def _step_with(state: EpisodeState, action: Action, config: EnvConfig, stop_succeeds):
    if state.done:
        raise EpisodeDone("episode already terminated")
    if isinstance(action, Stop):
        _check_action_domain(action, config)
        success = stop_succeeds(state.scene)
        nxt = EpisodeState(state.scene, state.t, Stopped(success))
        return nxt, (1.0 if success else -1.0), {}
    reason = validate(state, action, config)
    if reason is not None:
        nxt = EpisodeState(state.scene, state.t, InvalidAction(reason))
        return nxt, -1.0, {"reason": reason.value}
    scene = apply_transition(state.scene, action, config)
    t = state.t + 1
    if t >= config.horizon:
        return EpisodeState(scene, t, Horizon()), -1.0, {}
    return EpisodeState(scene, t, None), -config.verbosity_penalty, {}


def step(state: EpisodeState, action: Action, context: Context, config: EnvConfig):
    """(next state, reward, info) under the program-evaluation reward."""
    return _step_with(
        state, action, config,
        lambda scene: evaluate(context.program, scene) == context.target,
    )


def goal_set_step(state: EpisodeState, action: Action, goal_fingerprints, config: EnvConfig):
    """Ablation stepping: Stop succeeds iff the scene's fingerprint is one
    of the goals; every other case is identical to ``step``."""
    if not goal_fingerprints:
        raise ValueError("goal set must be non-empty")
    goals = frozenset(goal_fingerprints)
    return _step_with(
        state, action, config,
        lambda scene: scene_fingerprint(scene) in goals,
    )


def goal_set_reward(state: EpisodeState, action: Action, goal_fingerprints, config: EnvConfig) -> float:
    """Reward of ``goal_set_step`` alone."""
    return goal_set_step(state, action, goal_fingerprints, config)[1]


# ---------------------------------------------------------------------------
# resets and targets

def reset(config: EnvConfig, initial_scenes=(), seed=None) -> EpisodeState:
    """Fresh episode state: empty canvas under SCRATCH, a uniform seeded
    draw from ``initial_scenes`` under FLIPIT."""
    if config.condition is Condition.SCRATCH:
        return EpisodeState(Scene(config.variant, (), config.layout))
    scenes = tuple(initial_scenes)
    if not scenes:
        raise ValueError("FLIPIT reset needs at least one initial scene")
    pick = random.Random(seed).randrange(len(scenes))
    return EpisodeState(scenes[pick])


def assign_flipit_target(initial_scene: Scene, program) -> bool:
    """FLIPIT target: the opposite of the initial scene's truth value."""
    return not evaluate(program, initial_scene)


# ---------------------------------------------------------------------------
# stop-forcing mask

@dataclass(frozen=True)
class ActionMask:
    """Either everything is allowed, or only Stop is.

    Validity is deliberately not pre-filtered: invalid actions stay
    selectable and keep their penalty semantics.
    """
    stop_only: bool
    size: int

    @property
    def cardinality(self) -> int:
        return 1 if self.stop_only else self.size

    def allows(self, action: Action, config: EnvConfig) -> bool:
        if not self.stop_only:
            return True
        return isinstance(action, Stop)

    def allows_index(self, index: int) -> bool:
        if not 0 <= index < self.size:
            raise ValueError(f"action index {index} out of range")
        return (not self.stop_only) or index == 0

    def as_array(self) -> np.ndarray:
        out = np.ones(self.size, dtype=bool)
        if self.stop_only:
            out[1:] = False
        return out


def stop_forcing_mask(state: EpisodeState, context: Context, config: EnvConfig) -> ActionMask:
    satisfied = evaluate(context.program, state.scene) == context.target
    return ActionMask(stop_only=satisfied, size=action_space_size(config))
