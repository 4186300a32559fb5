"""Dataset schema, JSONL loading/validation, annotation checking.

A dataset file is JSON-lines: one versioned header object, then one MDP
record per line.  Loading is all-or-nothing — any bad line fails the whole
file with a structured per-line error report.

Header:   {"schema": "mdp-dataset", "version": 1, "layout": {...}}
Record:   {"id", "variant", "condition", "statement", "program",
           "target", "split", "initial_scenes": [{"objects": [...]}]}

Object ids are not serialized; loading assigns them in listing order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

from .env import Condition, Context, EnvConfig
from .programs import ProgramError, compile_program, evaluate
from .scene import (
    Color,
    Layout,
    PlacedObject,
    Scene,
    Shape,
    Size,
    Variant,
    scene_problems,
)

SCHEMA_NAME = "mdp-dataset"
SCHEMA_VERSION = 1
SPLITS = ("train", "dev", "test")

_LAYOUT_FIELDS = ("canvas_w", "canvas_h", "box_count", "separator_width",
                  "small_px", "medium_px", "large_px", "tower_capacity")


class DatasetError(ValueError):
    """Carries every per-line problem found in one file."""

    def __init__(self, path, errors):
        self.path = str(path)
        self.errors = list(errors)
        lines = "; ".join(
            f"line {e['line']}: [{e['kind']}] {e['message']}" for e in self.errors[:5]
        )
        more = "" if len(self.errors) <= 5 else f" (+{len(self.errors) - 5} more)"
        super().__init__(f"{self.path}: {lines}{more}")


@dataclass(frozen=True)
class MdpSpec:
    id: str
    variant: Variant
    condition: Condition
    statement: str
    program_source: str
    target: bool
    initial_scenes: tuple[Scene, ...]
    split: str
    layout: Layout = Layout()

    def program(self):
        return compile_program(self.program_source)

    def context(self) -> Context:
        return Context(statement=self.statement, program=self.program(),
                       target=self.target)

    def env_config(self, base: EnvConfig | None = None) -> EnvConfig:
        base = base if base is not None else EnvConfig()
        return replace(base, variant=self.variant, condition=self.condition,
                       layout=self.layout)


def mdp_problems(spec: MdpSpec) -> list[dict]:
    """Invariant violations of one spec, as (kind, message) dicts."""
    problems = []
    try:
        program = compile_program(spec.program_source)
    except ProgramError as exc:
        return [{"kind": "program", "message": str(exc)}]
    if spec.split not in SPLITS:
        problems.append({"kind": "schema", "message": f"unknown split {spec.split!r}"})
    if spec.condition is Condition.SCRATCH:
        if spec.target is not True:
            problems.append({"kind": "target_consistency",
                             "message": "scratch target must be True"})
        if spec.initial_scenes:
            problems.append({"kind": "schema",
                             "message": "scratch specs start empty; no scenes allowed"})
    else:
        if not spec.initial_scenes:
            problems.append({"kind": "schema",
                             "message": "flipit specs need at least one initial scene"})
    for i, scene in enumerate(spec.initial_scenes):
        if scene.variant is not spec.variant:
            problems.append({"kind": "scene",
                             "message": f"scene {i} has variant {scene.variant.value}"})
        for issue in scene_problems(scene):
            problems.append({"kind": "scene", "message": f"scene {i}: {issue}"})
    if not problems and spec.condition is Condition.FLIPIT:
        for i, scene in enumerate(spec.initial_scenes):
            if evaluate(program, scene) == spec.target:
                problems.append({
                    "kind": "target_consistency",
                    "message": f"scene {i} already satisfies the target",
                })
    return problems


# ---------------------------------------------------------------------------
# JSON codecs

def scene_to_json(scene: Scene) -> dict:
    return {
        "objects": [
            {"shape": o.shape.value, "color": o.color.value,
             "size": o.size.value, "x": o.x, "y": o.y}
            for o in scene.objects
        ]
    }


def scene_from_json(data: dict, variant: Variant, layout: Layout) -> Scene:
    objects = []
    for i, o in enumerate(data["objects"]):
        objects.append(PlacedObject(
            id=i, shape=Shape(o["shape"]), color=Color(o["color"]),
            size=Size(o["size"]), x=int(o["x"]), y=int(o["y"]),
        ))
    return Scene(variant, tuple(objects), layout)


def mdp_to_json(spec: MdpSpec) -> dict:
    return {
        "id": spec.id,
        "variant": spec.variant.value,
        "condition": spec.condition.value,
        "statement": spec.statement,
        "program": spec.program_source,
        "target": spec.target,
        "split": spec.split,
        "initial_scenes": [scene_to_json(s) for s in spec.initial_scenes],
    }


def mdp_from_json(data: dict, layout: Layout) -> MdpSpec:
    variant = Variant(data["variant"])
    return MdpSpec(
        id=str(data["id"]),
        variant=variant,
        condition=Condition(data["condition"]),
        statement=str(data["statement"]),
        program_source=str(data["program"]),
        target=bool(data["target"]),
        initial_scenes=tuple(
            scene_from_json(s, variant, layout) for s in data["initial_scenes"]
        ),
        split=str(data["split"]),
        layout=layout,
    )


def layout_to_json(layout: Layout) -> dict:
    return {name: getattr(layout, name) for name in _LAYOUT_FIELDS}


# ---------------------------------------------------------------------------
# load / save

def load_dataset(path):
    """-> (tuple of MdpSpec, Table-shaped summary).  Raises DatasetError
    listing every bad line when anything in the file is wrong."""
    errors = []
    specs = []
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise DatasetError(path, [{"line": 1, "kind": "header",
                                   "message": "empty file"}])
    layout = Layout()
    try:
        header = json.loads(lines[0])
        if header.get("schema") != SCHEMA_NAME or header.get("version") != SCHEMA_VERSION:
            raise ValueError(f"expected {SCHEMA_NAME} v{SCHEMA_VERSION} header")
        layout = Layout(**{k: int(header["layout"][k]) for k in _LAYOUT_FIELDS})
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        errors.append({"line": 1, "kind": "header", "message": str(exc)})

    seen_ids = set()
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            errors.append({"line": lineno, "kind": "json", "message": str(exc)})
            continue
        try:
            spec = mdp_from_json(data, layout)
        except (KeyError, TypeError, ValueError) as exc:
            errors.append({"line": lineno, "kind": "schema", "message": str(exc)})
            continue
        if spec.id in seen_ids:
            errors.append({"line": lineno, "kind": "duplicate_id",
                           "message": f"id {spec.id!r} repeats"})
            continue
        seen_ids.add(spec.id)
        for problem in mdp_problems(spec):
            errors.append({"line": lineno, **problem})
        specs.append(spec)

    if errors:
        raise DatasetError(path, errors)
    return tuple(specs), summarize(specs)


def summarize(specs) -> dict:
    """Per-split MDP and initial-state counts (scratch counts its implicit
    empty start as one state)."""
    table = {split: {"mdps": 0, "initial_states": 0} for split in SPLITS}
    for spec in specs:
        states = len(spec.initial_scenes) if spec.initial_scenes else 1
        table[spec.split]["mdps"] += 1
        table[spec.split]["initial_states"] += states
    total = {
        "mdps": sum(row["mdps"] for row in table.values()),
        "initial_states": sum(row["initial_states"] for row in table.values()),
    }
    return {"splits": table, "total": total}


def save_dataset(path, specs, layout: Layout = Layout()) -> None:
    """Byte-deterministic writer: sorted keys, compact separators."""
    header = {"schema": SCHEMA_NAME, "version": SCHEMA_VERSION,
              "layout": layout_to_json(layout)}
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header, sort_keys=True, separators=(",", ":")) + "\n")
        for spec in specs:
            fh.write(json.dumps(mdp_to_json(spec), sort_keys=True,
                                separators=(",", ":")) + "\n")


# ---------------------------------------------------------------------------
# annotation validation

def validate_annotation(program, labeled_scenes) -> list[dict]:
    """Check a program against (scene, expected truth) pairs.

    Returns one entry per problem — empty means the annotation passes.
    ``program`` may be source text or an already-compiled AST.
    """
    if isinstance(program, str):
        try:
            program = compile_program(program)
        except ProgramError as exc:
            return [{"index": None, "kind": "error", "message": str(exc)}]
    failures = []
    for i, (scene, expected) in enumerate(labeled_scenes):
        try:
            got = evaluate(program, scene)
        except ProgramError as exc:
            failures.append({"index": i, "kind": "error", "message": str(exc)})
            continue
        if got != bool(expected):
            failures.append({"index": i, "kind": "mismatch",
                             "expected": bool(expected), "got": got})
    return failures


def generate_fixtures(seed: int, count: int, out_dir):
    """Write the four synthetic dataset files (one per variant/condition
    pairing) into ``out_dir``; returns the file paths.  Deterministic in
    ``seed``: same arguments, byte-identical files."""
    from . import fixtures  # local import: fixtures builds on the solvers
    return fixtures.generate_fixtures(seed, count, out_dir)
