"""Rollout machinery: policies, solvers, trajectories, aggregate metrics.

A policy is a callable ``policy(scene, context, mask, config) -> action``;
``mask`` is None unless the caller asked for stop-forcing.  Policies may
additionally expose ``begin_episode(scene, context, config)``, invoked once
per reset — the oracle policy uses it to plan against the drawn start state.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from hashlib import blake2b

from .env import (
    COLORS,
    SHAPES,
    SIZES,
    ActionMode,
    Condition,
    EnvConfig,
    EpisodeState,
    GridAdd,
    GridRemove,
    ScatterAdd,
    ScatterRemove,
    Stop,
    Stopped,
    TowerAdd,
    TowerRemove,
    VariantMismatch,
    apply_transition,
    grid_remove_target,
    action_to_json,
    iter_actions,
    reset,
    step,
    stop_forcing_mask,
    termination_string,
    validate,
)
from .programs import (
    And,
    Call,
    Compare,
    EnumLit,
    IntLit,
    Lambda,
    MethodCall,
    Not,
    Var,
    evaluate,
)
from .scene import (
    Color,
    Shape,
    Side,
    Size,
    Variant,
    fingerprint_hex,
    object_box,
    scene_fingerprint,
)

_ADD_TYPES = (TowerAdd, ScatterAdd, GridAdd)
_REMOVE_TYPES = (TowerRemove, ScatterRemove, GridRemove)


# ---------------------------------------------------------------------------
# trajectories

@dataclass(frozen=True)
class TrajectoryStep:
    scene: str  # fingerprint of the state the action was taken in
    action: object
    reward: float


@dataclass(frozen=True)
class Trajectory:
    mdp_id: str
    seed: int
    steps: tuple[TrajectoryStep, ...]
    termination: str
    success: bool
    length: int

    def episode_return(self) -> float:
        return sum(s.reward for s in self.steps)

    def to_json(self) -> dict:
        return {
            "mdp_id": self.mdp_id,
            "seed": self.seed,
            "steps": [
                {"scene": s.scene, "action": action_to_json(s.action),
                 "reward": s.reward}
                for s in self.steps
            ],
            "termination": self.termination,
            "success": self.success,
            "length": self.length,
        }


def episode_seed(base_seed: int, mdp_id: str, index: int) -> int:
    """Stable per-episode seed: distinct MDPs and indices never collide on
    the base seed alone."""
    digest = blake2b(f"{base_seed}:{mdp_id}:{index}".encode(), digest_size=8)
    return int.from_bytes(digest.digest(), "big")


def rollout(policy, mdp, seed, config: EnvConfig | None = None,
            use_mask: bool = False) -> Trajectory:
    """Run one episode of ``policy`` on ``mdp`` and record every step.

    A policy emitting an action outside the configured space aborts the
    rollout with a diagnostic naming the MDP and step.
    """
    config = mdp.env_config(config)
    context = mdp.context()
    state = reset(config, mdp.initial_scenes, seed)
    begin = getattr(policy, "begin_episode", None)
    if begin is not None:
        begin(state.scene, context, config)
    steps = []
    while not state.done:
        mask = stop_forcing_mask(state, context, config) if use_mask else None
        action = policy(state.scene, context, mask, config)
        try:
            nxt, reward, _info = step(state, action, context, config)
        except (VariantMismatch, ValueError) as exc:
            raise RuntimeError(
                f"policy produced an out-of-space action on {mdp.id} "
                f"at step {len(steps)}: {action!r} ({exc})"
            ) from exc
        steps.append(TrajectoryStep(
            fingerprint_hex(scene_fingerprint(state.scene)), action, reward))
        state = nxt
    assert len(steps) <= config.horizon
    term = state.termination
    return Trajectory(
        mdp_id=mdp.id,
        seed=seed,
        steps=tuple(steps),
        termination=termination_string(term),
        success=isinstance(term, Stopped) and term.success,
        length=len(steps),
    )


# ---------------------------------------------------------------------------
# policies

def stop_policy():
    """Policy that immediately stops every episode."""
    def policy(scene, context, mask, config):
        return Stop()
    return policy


class RandomPolicy:
    """Uniform random actions: draw the action type (1 in 3), then each
    argument independently and uniformly.  With a stop-forcing mask active,
    the draw renormalizes onto the permitted set."""

    def __init__(self, seed: int):
        self.rng = random.Random(seed)

    def __call__(self, scene, context, mask, config: EnvConfig):
        if mask is not None and mask.stop_only:
            return Stop()
        rng = self.rng
        kind = rng.randrange(3)
        if kind == 0:
            return Stop()
        if config.variant is Variant.TOWER:
            if kind == 1:
                return TowerAdd(box=rng.randrange(config.layout.box_count),
                                color=COLORS[rng.randrange(len(COLORS))])
            return TowerRemove(box=rng.randrange(config.layout.box_count))
        if config.action_mode is ActionMode.PIXEL:
            if kind == 1:
                return ScatterAdd(
                    x=rng.randrange(config.layout.canvas_w),
                    y=rng.randrange(config.layout.canvas_h),
                    shape=SHAPES[rng.randrange(len(SHAPES))],
                    color=COLORS[rng.randrange(len(COLORS))],
                    size=SIZES[rng.randrange(len(SIZES))],
                )
            return ScatterRemove(x=rng.randrange(config.layout.canvas_w),
                                 y=rng.randrange(config.layout.canvas_h))
        if kind == 1:
            return GridAdd(
                col=rng.randrange(config.grid_cols),
                row=rng.randrange(config.grid_rows),
                shape=SHAPES[rng.randrange(len(SHAPES))],
                color=COLORS[rng.randrange(len(COLORS))],
                size=SIZES[rng.randrange(len(SIZES))],
            )
        return GridRemove(col=rng.randrange(config.grid_cols),
                          row=rng.randrange(config.grid_rows))


def random_policy(seed: int) -> RandomPolicy:
    return RandomPolicy(seed)


class OraclePolicy:
    """Plans once per episode from the drawn start state, then replays the
    plan.  Falls back to Stop when no plan is found or the plan runs out."""

    def __init__(self, mdp, max_depth: int = 8):
        self.mdp = mdp
        self.max_depth = max_depth
        self._queue: deque = deque()

    def begin_episode(self, scene, context, config):
        plan = solve_from(self.mdp, scene, config, self.max_depth)
        self._queue = deque(plan if plan is not None else (Stop(),))

    def __call__(self, scene, context, mask, config):
        if mask is not None and mask.stop_only:
            return Stop()
        return self._queue.popleft() if self._queue else Stop()


def oracle_policy(mdp, max_depth: int = 8) -> OraclePolicy:
    return OraclePolicy(mdp, max_depth)


# ---------------------------------------------------------------------------
# solvers

def _start_scene(mdp, config: EnvConfig, scene_index: int):
    if config.condition is Condition.SCRATCH:
        return reset(config).scene
    return mdp.initial_scenes[scene_index]


def solve_tower(mdp, max_depth: int = 8, scene_index: int = 0,
                config: EnvConfig | None = None, max_states: int = 250_000):
    """Breadth-first search over tower scenes; returns the shortest plan
    (ending in Stop) or None.  Ties break toward the action that enumerates
    first in the canonical ordering."""
    config = mdp.env_config(config)
    if config.variant is not Variant.TOWER:
        raise ValueError("solve_tower only handles the tower variant")
    start = _start_scene(mdp, config, scene_index)
    return _bfs(start, mdp.program(), mdp.target, config, max_depth, max_states)


def _bfs(start, program, target, config, max_depth, max_states):
    def satisfied(scene):
        return evaluate(program, scene) == target

    if satisfied(start):
        return (Stop(),)
    actions = [a for a in iter_actions(config) if not isinstance(a, Stop)]
    seen = {scene_fingerprint(start)}
    queue = deque([(start, ())])
    expanded = 0
    while queue:
        scene, plan = queue.popleft()
        if len(plan) >= max_depth:
            continue
        state = EpisodeState(scene)
        for action in actions:
            if validate(state, action, config) is not None:
                continue
            nxt = apply_transition(scene, action, config)
            fp = scene_fingerprint(nxt)
            if fp in seen:
                continue
            seen.add(fp)
            if satisfied(nxt):
                return plan + (action, Stop())
            queue.append((nxt, plan + (action,)))
            expanded += 1
            if expanded > max_states:
                return None
    return None


# -- scatter: scripted construction from the program's structure -----------

_ATTR_PREDS = {
    "is_black": ("color", Color.BLACK),
    "is_blue": ("color", Color.BLUE),
    "is_yellow": ("color", Color.YELLOW),
    "is_circle": ("shape", Shape.CIRCLE),
    "is_square": ("shape", Shape.SQUARE),
    "is_triangle": ("shape", Shape.TRIANGLE),
    "is_small": ("size", Size.SMALL),
    "is_medium": ("size", Size.MEDIUM),
    "is_large": ("size", Size.LARGE),
}

# cells spread across boxes and rows; rows 1/3 first so that even large
# additions at consecutive picks cannot collide
_SPREAD_CELLS = tuple(
    [(c, r) for r in (1, 3, 0, 2) for c in (1, 4, 8, 11, 15, 17)]
    + [(c, 4) for c in (2, 9, 16)]
)
_BOX_COLS = {0: (1, 2, 3, 4), 1: (7, 8, 9, 10), 2: (14, 15, 16, 17)}
_WALL_CELLS = {
    Side.TOP: ((1, 0), (8, 0), (15, 0)),
    Side.LEFT: ((0, 1), (0, 3), (6, 1)),
    Side.RIGHT: ((5, 1), (5, 3), (12, 1)),
    Side.BOTTOM: ((1, 4), (8, 4), (15, 4)),
}


def _flatten_and(node):
    if isinstance(node, And):
        return _flatten_and(node.lhs) + _flatten_and(node.rhs)
    return [node]


def _attrs_of(terms, param):
    """Conjunction of unary attribute predicates on ``param`` -> dict,
    or None when any term is something else."""
    attrs = {}
    for term in terms:
        if not (isinstance(term, Call) and term.name in _ATTR_PREDS
                and len(term.args) == 1 and isinstance(term.args[0], Var)
                and term.args[0].name == param):
            return None
        key, value = _ATTR_PREDS[term.name]
        if attrs.get(key, value) != value:
            return None
        attrs[key] = value
    return attrs


def _pred_attrs(pred):
    """filter_obj predicate (lambda or bare unary builtin) as attribute
    constraints, or None."""
    if isinstance(pred, Var) and pred.name in _ATTR_PREDS:
        key, value = _ATTR_PREDS[pred.name]
        return {key: value}
    if isinstance(pred, Lambda):
        return _attrs_of(_flatten_and(pred.body), pred.param)
    return None


def _is_all_items(node):
    return isinstance(node, Call) and node.name == "all_items" and not node.args


def _match_filter(node):
    """Call(filter_obj, (all_items, pred)) -> pred, else None."""
    if (isinstance(node, Call) and node.name == "filter_obj"
            and len(node.args) == 2 and _is_all_items(node.args[0])):
        return node.args[1]
    return None


def _match_exist_attrs(node):
    if isinstance(node, Call) and node.name == "exist" and len(node.args) == 1:
        pred = _match_filter(node.args[0])
        if pred is not None:
            return _pred_attrs(pred)
    return None


def describe_program(ast):
    """Recognize the handful of program families the scripted scatter
    solver knows how to build scenes for.  Returns a descriptor tuple or
    None for anything it cannot interpret."""
    # exist over simple attributes, or its relation-carrying variants
    if isinstance(ast, Call) and ast.name == "exist" and len(ast.args) == 1:
        pred = _match_filter(ast.args[0])
        if pred is not None:
            simple = _pred_attrs(pred)
            if simple is not None:
                return ("exist", simple)
            rel = _match_relation_pred(pred)
            if rel is not None:
                return rel
        box_pal = _match_box_palette(ast.args[0])
        if box_pal is not None:
            return box_pal
        return None
    if isinstance(ast, Compare) and isinstance(ast.rhs, IntLit):
        k = ast.rhs.value
        lhs = ast.lhs
        if isinstance(lhs, Call) and lhs.name == "count" and len(lhs.args) == 1:
            inner = lhs.args[0]
            if _is_all_items(inner):
                return ("count", ast.op, {}, k)
            pred = _match_filter(inner)
            if pred is not None:
                attrs = _pred_attrs(pred)
                if attrs is not None:
                    return ("count", ast.op, attrs, k)
            if (isinstance(inner, Call) and inner.name == "get_set_colors"
                    and len(inner.args) == 1 and _is_all_items(inner.args[0])):
                if ast.op == "==":
                    return ("palette", k)
    if isinstance(ast, And) and isinstance(ast.rhs, Not):
        left = _match_exist_attrs(ast.lhs)
        right = _match_exist_attrs(ast.rhs.operand)
        if left is not None and right is not None:
            return ("exist_not", left, right)
    return None


def _match_relation_pred(pred):
    """lambda a: <attrs(a)> and exist(filter(all_items, lambda b:
    <attrs(b)> and is_touching(a,b)))  -> ("touch", ...), and the wall
    variant lambda a: <attrs(a)> and is_touching_wall(a, Side.X)."""
    if not isinstance(pred, Lambda):
        return None
    p = pred.param
    terms = _flatten_and(pred.body)
    plain, special = [], []
    for t in terms:
        if (isinstance(t, Call) and t.name in _ATTR_PREDS and len(t.args) == 1
                and isinstance(t.args[0], Var) and t.args[0].name == p):
            plain.append(t)
        else:
            special.append(t)
    attrs = _attrs_of(plain, p)
    if attrs is None or len(special) != 1:
        return None
    sp = special[0]
    if (isinstance(sp, Call) and sp.name == "is_touching_wall"
            and len(sp.args) == 2 and isinstance(sp.args[0], Var)
            and sp.args[0].name == p and isinstance(sp.args[1], EnumLit)
            and sp.args[1].namespace == "Side"):
        return ("wall", attrs, Side[sp.args[1].member.upper()])
    if isinstance(sp, Call) and sp.name == "exist" and len(sp.args) == 1:
        inner_pred = _match_filter(sp.args[0])
        if isinstance(inner_pred, Lambda):
            q = inner_pred.param
            inner_terms = _flatten_and(inner_pred.body)
            inner_plain, inner_special = [], []
            for t in inner_terms:
                if (isinstance(t, Call) and t.name in _ATTR_PREDS
                        and len(t.args) == 1 and isinstance(t.args[0], Var)
                        and t.args[0].name == q):
                    inner_plain.append(t)
                else:
                    inner_special.append(t)
            battrs = _attrs_of(inner_plain, q)
            if battrs is None or len(inner_special) != 1:
                return None
            rel = inner_special[0]
            if (isinstance(rel, Call)
                    and rel.name in ("is_touching", "is_nearly_touching")
                    and len(rel.args) == 2
                    and {getattr(a, "name", None) for a in rel.args} == {p, q}):
                mode = "touch" if rel.name == "is_touching" else "near"
                return ("pair", attrs, battrs, mode)
    return None


def _match_box_palette(filter_node):
    """filter_obj(all_boxes, lambda x: count(get_set_colors(
    x.all_items_in_box())) == k)"""
    if not (isinstance(filter_node, Call) and filter_node.name == "filter_obj"
            and len(filter_node.args) == 2):
        return None
    src, pred = filter_node.args
    if not (isinstance(src, Call) and src.name == "all_boxes" and not src.args):
        return None
    if not isinstance(pred, Lambda):
        return None
    body = pred.body
    if not (isinstance(body, Compare) and body.op == "=="
            and isinstance(body.rhs, IntLit)):
        return None
    lhs = body.lhs
    if not (isinstance(lhs, Call) and lhs.name == "count" and len(lhs.args) == 1):
        return None
    inner = lhs.args[0]
    if not (isinstance(inner, Call) and inner.name == "get_set_colors"
            and len(inner.args) == 1):
        return None
    recv = inner.args[0]
    if (isinstance(recv, MethodCall) and recv.name == "all_items_in_box"
            and isinstance(recv.receiver, Var)
            and recv.receiver.name == pred.param and not recv.args):
        return ("box_palette", body.rhs.value)
    return None


def _matches(obj, attrs) -> bool:
    return all(getattr(obj, key) == value for key, value in attrs.items())


def _spec_from(attrs, default_size=Size.SMALL):
    return (attrs.get("shape", Shape.SQUARE),
            attrs.get("color", Color.BLACK),
            attrs.get("size", default_size))


def _cell_removing(scene, obj_id, config):
    for row in range(config.grid_rows):
        for col in range(config.grid_cols):
            if grid_remove_target(scene, (col, row), config) == obj_id:
                return (col, row)
    return None


def _removal_plan(scene, obj_ids, config):
    """Sequential GridRemoves that delete exactly ``obj_ids``; None when a
    target cannot be hit."""
    plan = []
    for oid in obj_ids:
        cell = _cell_removing(scene, oid, config)
        if cell is None:
            return None
        action = GridRemove(*cell)
        plan.append(action)
        scene = apply_transition(scene, action, config)
    return plan


def _addition_plan(scene, specs, config, cells=_SPREAD_CELLS):
    """GridAdds placing one object per spec at distinct free cells."""
    plan = []
    cursor = 0
    for spec in specs:
        placed = False
        while cursor < len(cells):
            cell = cells[cursor]
            cursor += 1
            action = GridAdd(cell[0], cell[1], *spec)
            state = EpisodeState(scene)
            if validate(state, action, config) is None:
                plan.append(action)
                scene = apply_transition(scene, action, config)
                placed = True
                break
        if not placed:
            return None
    return plan


def _pair_plans(scene, attrs_a, attrs_b, config):
    """Candidate two-add plans intended to end with the pair touching (the
    caller verifies the relation by simulating)."""
    spec_a = _spec_from(attrs_a)
    spec_b = _spec_from(attrs_b)
    plans = []
    for base in ((1, 1), (8, 1), (15, 1), (1, 3)):
        first = GridAdd(base[0], base[1], *spec_a)
        if validate(EpisodeState(scene), first, config) is not None:
            continue
        mid = apply_transition(scene, first, config)
        for second_cell in (base, (base[0] + 1, base[1]), (base[0], base[1] + 1)):
            if second_cell[0] >= config.grid_cols or second_cell[1] >= config.grid_rows:
                continue
            second = GridAdd(second_cell[0], second_cell[1], *spec_b)
            if validate(EpisodeState(mid), second, config) is None:
                plans.append([first, second])
    return plans


def _candidate_plans(desc, scene, target, config):
    """Plans (without the trailing Stop) that plausibly drive the program's
    truth value to ``target`` from ``scene``."""
    objects = scene.objects
    kind = desc[0]
    plans = []

    if kind == "exist":
        attrs = desc[1]
        matching = [o for o in objects if _matches(o, attrs)]
        if target:
            plans.append(_addition_plan(scene, [_spec_from(attrs)], config))
        else:
            plans.append(_removal_plan(scene, [o.id for o in matching], config))

    elif kind == "count":
        _, op, attrs, k = desc
        matching = [o for o in objects if _matches(o, attrs)]
        n = len(matching)
        spec = _spec_from(attrs)
        if target:
            if op in ("==", ">=", ">"):
                goal = k if op != ">" else k + 1
                if n < goal:
                    plans.append(_addition_plan(scene, [spec] * (goal - n), config))
                elif n > goal and op == "==":
                    drop = [o.id for o in matching[: n - goal]]
                    plans.append(_removal_plan(scene, drop, config))
                elif op in (">=", ">"):
                    plans.append([])
        else:
            if op == "==" and n == k:
                plans.append(_addition_plan(scene, [spec], config))
                plans.append(_removal_plan(scene, [matching[0].id], config))
            elif op in (">=", ">"):
                floor = k if op == ">=" else k + 1
                if n >= floor:
                    drop = [o.id for o in matching[: n - floor + 1]]
                    plans.append(_removal_plan(scene, drop, config))

    elif kind == "palette":
        k = desc[1]
        present = {o.color for o in objects}
        missing = [c for c in COLORS if c not in present]
        if target:
            if len(present) < k:
                specs = [(Shape.SQUARE, c, Size.SMALL) for c in missing[: k - len(present)]]
                plans.append(_addition_plan(scene, specs, config))
            elif len(present) > k:
                for color in sorted(present, key=lambda c: c.value)[: len(present) - k]:
                    drop = [o.id for o in objects if o.color == color]
                    plans.append(_removal_plan(scene, drop, config))
        else:
            if missing:
                plans.append(_addition_plan(
                    scene, [(Shape.SQUARE, missing[0], Size.SMALL)], config))
            for color in sorted(present, key=lambda c: c.value):
                drop = [o.id for o in objects if o.color == color]
                plans.append(_removal_plan(scene, drop, config))

    elif kind == "box_palette":
        k = desc[1]
        layout = config.layout
        for box in range(layout.box_count):
            inside = [o for o in objects if object_box(o, layout) == box]
            present = {o.color for o in inside}
            cells = tuple((c, r) for r in (1, 3, 0, 2) for c in _BOX_COLS[box])
            if target:
                missing = [c for c in COLORS if c not in present]
                need = k - len(present)
                if 0 < need <= len(missing):
                    specs = [(Shape.SQUARE, c, Size.SMALL) for c in missing[:need]]
                    plans.append(_addition_plan(scene, specs, config, cells))
                elif need < 0:
                    for color in sorted(present, key=lambda c: c.value):
                        drop = [o.id for o in inside if o.color == color]
                        if len(present) - 1 == k or k == 0:
                            plans.append(_removal_plan(scene, drop, config))
            else:
                if len(present) == k:
                    missing = [c for c in COLORS if c not in present]
                    if missing:
                        plans.append(_addition_plan(
                            scene, [(Shape.SQUARE, missing[0], Size.SMALL)],
                            config, cells))
                    for color in sorted(present, key=lambda c: c.value):
                        drop = [o.id for o in inside if o.color == color]
                        plans.append(_removal_plan(scene, drop, config))

    elif kind == "pair":
        _, attrs_a, attrs_b, _mode = desc
        if target:
            plans.extend(_pair_plans(scene, attrs_a, attrs_b, config))
        else:
            for attrs in (attrs_a, attrs_b):
                for o in objects:
                    if _matches(o, attrs):
                        plans.append(_removal_plan(scene, [o.id], config))
            both = [o.id for o in objects
                    if _matches(o, attrs_a) or _matches(o, attrs_b)]
            plans.append(_removal_plan(scene, both, config))

    elif kind == "wall":
        _, attrs, side = desc
        if target:
            spec = _spec_from(attrs, default_size=Size.MEDIUM)
            for cell in _WALL_CELLS[side]:
                action = GridAdd(cell[0], cell[1], *spec)
                if validate(EpisodeState(scene), action, config) is None:
                    plans.append([action])
        else:
            matching = [o for o in objects if _matches(o, attrs)]
            for o in matching:
                plans.append(_removal_plan(scene, [o.id], config))
            plans.append(_removal_plan(scene, [o.id for o in matching], config))

    elif kind == "exist_not":
        _, attrs_a, attrs_b = desc
        blockers = [o.id for o in objects if _matches(o, attrs_b)]
        keepers = [o for o in objects if _matches(o, attrs_a)]
        if target:
            plan = _removal_plan(scene, blockers, config)
            if plan is not None and not keepers:
                extra = _addition_plan(
                    apply_plan(scene, plan, config), [_spec_from(attrs_a)], config)
                plan = None if extra is None else plan + extra
            plans.append(plan)
        else:
            plans.append(_addition_plan(scene, [_spec_from(attrs_b)], config))
            plans.append(_removal_plan(scene, [o.id for o in keepers], config))

    return [p for p in plans if p is not None]


def apply_plan(scene, plan, config):
    for action in plan:
        scene = apply_transition(scene, action, config)
    return scene


def plan_succeeds(plan, scene, context, config) -> bool:
    """Replay ``plan`` through the stepper; True iff it ends in a
    successful Stop."""
    state = EpisodeState(scene)
    for action in plan:
        if state.done:
            return False
        state, _reward, _info = step(state, action, context, config)
    return isinstance(state.termination, Stopped) and state.termination.success


def solve_scatter(mdp, scene=None, config: EnvConfig | None = None):
    """Scripted scatter solving: recognize the program family, construct
    candidate plans, return the first that replays to a successful Stop."""
    config = mdp.env_config(config)
    if config.variant is not Variant.SCATTER:
        raise ValueError("solve_scatter only handles the scatter variant")
    if config.action_mode is not ActionMode.GRID:
        return None
    if scene is None:
        scene = _start_scene(mdp, config, 0)
    context = mdp.context()
    desc = describe_program(context.program)
    if desc is None:
        return None
    if plan_succeeds((Stop(),), scene, context, config):
        return (Stop(),)
    for plan in _candidate_plans(desc, scene, context.target, config):
        full = tuple(plan) + (Stop(),)
        if len(full) <= config.horizon and plan_succeeds(full, scene, context, config):
            return full
    return None


def solve_from(mdp, scene, config: EnvConfig | None = None, max_depth: int = 8):
    """Plan for ``mdp`` starting at ``scene``, dispatching on variant."""
    config = mdp.env_config(config)
    if config.variant is Variant.TOWER:
        return _bfs(scene, mdp.program(), mdp.target, config, max_depth, 250_000)
    return solve_scatter(mdp, scene, config)


def solve(mdp, max_depth: int = 8, scene_index: int = 0,
          config: EnvConfig | None = None):
    config = mdp.env_config(config)
    start = _start_scene(mdp, config, scene_index)
    return solve_from(mdp, start, config, max_depth)


# ---------------------------------------------------------------------------
# metrics

_REPORT_NOTES = (
    "rollouts ending in an invalid action are included in "
    "mean_actions_per_rollout",
    "mean_reward is the mean episode return and moves with the per-step "
    "verbosity penalty",
)


@dataclass(frozen=True)
class MetricsReport:
    n_rollouts: int
    task_completion_accuracy: float  # percent of successful stops
    mean_reward: float               # mean episode return
    pct_no_stop: float               # percent ending without any Stop
    pct_invalid_action: float        # percent cut short by an invalid action
    mean_actions_per_rollout: float
    add_remove_ratio: float | None   # total ADDs / total REMOVEs; None if no removes
    notes: tuple[str, ...] = field(default=_REPORT_NOTES)

    def to_json(self) -> dict:
        return {
            "n_rollouts": self.n_rollouts,
            "task_completion_accuracy": self.task_completion_accuracy,
            "mean_reward": self.mean_reward,
            "pct_no_stop": self.pct_no_stop,
            "pct_invalid_action": self.pct_invalid_action,
            "mean_actions_per_rollout": self.mean_actions_per_rollout,
            "add_remove_ratio": self.add_remove_ratio,
            "notes": list(self.notes),
        }


def aggregate(trajectories) -> MetricsReport:
    """Fold trajectories into the summary report.  By construction
    task_completion_accuracy can never exceed 100 - pct_invalid_action."""
    trajectories = tuple(trajectories)
    if not trajectories:
        raise ValueError("no trajectories to aggregate")
    n = len(trajectories)
    successes = sum(t.success for t in trajectories)
    invalid = sum(t.termination == "invalid_action" for t in trajectories)
    no_stop = sum(not t.termination.startswith("stopped") for t in trajectories)
    adds = sum(isinstance(s.action, _ADD_TYPES) for t in trajectories for s in t.steps)
    removes = sum(isinstance(s.action, _REMOVE_TYPES)
                  for t in trajectories for s in t.steps)
    return MetricsReport(
        n_rollouts=n,
        task_completion_accuracy=100.0 * successes / n,
        mean_reward=sum(t.episode_return() for t in trajectories) / n,
        pct_no_stop=100.0 * no_stop / n,
        pct_invalid_action=100.0 * invalid / n,
        mean_actions_per_rollout=sum(t.length for t in trajectories) / n,
        add_remove_ratio=(adds / removes) if removes else None,
    )


def ratio_clip(ratio: float, bound: float) -> float:
    """Clip an importance ratio from above: min(ratio, bound).

    >>> ratio_clip(0.5, 10)
    0.5
    >>> ratio_clip(1e6, 10)
    10
    >>> ratio_clip(10, 10)
    10
    """
    if bound <= 0:
        raise ValueError("bound must be positive")
    return ratio if ratio <= bound else bound


def evaluate_policy(policy_factory, mdps, episodes_per_mdp: int, base_seed: int,
                    config: EnvConfig | None = None, use_mask: bool = False):
    """Run ``episodes_per_mdp`` seeded rollouts on every MDP and aggregate.

    ``policy_factory(mdp, seed)`` builds the policy for one episode, so
    stochastic policies stay reproducible per (base_seed, mdp, index).
    """
    trajectories = []
    for mdp in mdps:
        for index in range(episodes_per_mdp):
            seed = episode_seed(base_seed, mdp.id, index)
            policy = policy_factory(mdp, seed)
            trajectories.append(rollout(policy, mdp, seed, config, use_mask))
    return tuple(trajectories), aggregate(trajectories)
