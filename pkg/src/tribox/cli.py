"""Command-line entry point.

Exit codes: 0 success; 1 domain failure (eval prints false, dataset
validation fails, no plan found); 2 usage or IO errors.

The TRIBOX_CONFIG environment variable may name a JSON file overriding
engine defaults: any EnvConfig field except variant/condition, plus
"palette" and "layout" objects.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

from .dataio import (
    DatasetError,
    generate_fixtures,
    load_dataset,
    scene_from_json,
    summarize,
)
from .env import ActionMode, EnvConfig, action_to_json
from .harness import (
    aggregate,
    episode_seed,
    oracle_policy,
    random_policy,
    rollout,
    solve,
    stop_policy,
)
from .programs import ProgramError, compile_program, evaluate
from .protocol import ProtocolServer, serve
from .render import DEFAULT_PALETTE, Palette, export_png, render
from .scene import Layout, Variant

CONFIG_ENV_VAR = "TRIBOX_CONFIG"

_ENV_FIELDS = ("horizon", "verbosity_penalty", "action_mode", "grid_cols",
               "grid_rows", "snap_threshold")


class _CliError(Exception):
    def __init__(self, message: str, code: int = 2):
        super().__init__(message)
        self.code = code


def _fail(message: str, code: int = 2):
    raise _CliError(message, code)


def load_overrides(environ=os.environ):
    """(EnvConfig kwargs, Palette, Layout) from TRIBOX_CONFIG, or defaults."""
    path = environ.get(CONFIG_ENV_VAR)
    if not path:
        return {}, DEFAULT_PALETTE, Layout()
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        _fail(f"cannot read {CONFIG_ENV_VAR} file {path}: {exc}")
    known = set(_ENV_FIELDS) | {"palette", "layout"}
    unknown = set(data) - known
    if unknown:
        _fail(f"unknown {CONFIG_ENV_VAR} keys: {sorted(unknown)}")
    try:
        palette = (Palette(**{k: tuple(v) for k, v in data["palette"].items()})
                   if "palette" in data else DEFAULT_PALETTE)
        layout = Layout(**data["layout"]) if "layout" in data else Layout()
        kwargs = {k: data[k] for k in _ENV_FIELDS if k in data}
        if "action_mode" in kwargs:
            kwargs["action_mode"] = ActionMode(kwargs["action_mode"])
    except (TypeError, ValueError) as exc:
        _fail(f"bad {CONFIG_ENV_VAR} contents: {exc}")
    return kwargs, palette, layout


def _base_config(kwargs, layout) -> EnvConfig:
    return replace(EnvConfig(layout=layout), **kwargs)


def _load_dataset_or_fail(path, code=2):
    try:
        return load_dataset(path)
    except DatasetError as exc:
        raise _CliError(json.dumps({"errors": exc.errors}, sort_keys=True),
                        code) from exc
    except OSError as exc:
        _fail(f"cannot read dataset {path}: {exc}")


def _read_scene(path, layout):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        return scene_from_json(data, Variant(data["variant"]), layout)
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        _fail(f"cannot read scene {path}: {exc}")


# ---------------------------------------------------------------------------
# subcommands

def _cmd_eval(args, overrides):
    _kwargs, _palette, layout = overrides
    try:
        with open(args.program, encoding="utf-8") as fh:
            program = compile_program(fh.read())
    except OSError as exc:
        _fail(f"cannot read program {args.program}: {exc}")
    except ProgramError as exc:
        _fail(f"bad program: {exc}")
    scene = _read_scene(args.scene, layout)
    value = evaluate(program, scene)
    print("true" if value else "false")
    return 0 if value else 1


def _cmd_step(args, overrides):
    kwargs, palette, layout = overrides
    mdps, _summary = _load_dataset_or_fail(args.mdp)
    ids = {m.id for m in mdps}
    if args.id is not None and args.id not in ids:
        _fail(f"no MDP with id {args.id!r} in {args.mdp}")
    server = ProtocolServer(mdps, default_id=args.id,
                            base_config=_base_config(kwargs, layout),
                            palette=palette)
    if args.seed is not None:
        # open an episode up front so bare-action clients can start sending
        response, _keep = server.handle({"cmd": "reset", "seed": args.seed})
        sys.stdout.write(json.dumps(response, sort_keys=True) + "\n")
        sys.stdout.flush()
    serve(server, sys.stdin, sys.stdout)
    return 0


def _cmd_rollout(args, overrides):
    kwargs, _palette, layout = overrides
    mdps, _summary = _load_dataset_or_fail(args.dataset)
    mdps = sorted(mdps, key=lambda m: m.id)
    factories = {
        "random": lambda mdp, seed: random_policy(seed),
        "oracle": lambda mdp, seed: oracle_policy(mdp),
        "stop": lambda mdp, seed: stop_policy(),
    }
    factory = factories[args.policy]
    config = _base_config(kwargs, layout)
    trajectories = []
    for mdp in mdps:
        for index in range(args.episodes):
            seed = episode_seed(args.seed, mdp.id, index)
            trajectories.append(
                rollout(factory(mdp, seed), mdp, seed, config))
    try:
        with open(args.out, "w", encoding="utf-8") as fh:
            for traj in trajectories:
                fh.write(json.dumps(traj.to_json(), sort_keys=True) + "\n")
    except OSError as exc:
        _fail(f"cannot write {args.out}: {exc}")
    print(json.dumps(aggregate(trajectories).to_json(), sort_keys=True))
    return 0


def _cmd_render(args, overrides):
    _kwargs, palette, layout = overrides
    scene = _read_scene(args.scene, layout)
    try:
        export_png(render(scene, palette), args.out)
    except OSError as exc:
        _fail(str(exc))
    return 0


def _cmd_solve(args, overrides):
    kwargs, _palette, layout = overrides
    mdps, _summary = _load_dataset_or_fail(args.dataset)
    byid = {m.id: m for m in mdps}
    if args.id not in byid:
        _fail(f"no MDP with id {args.id!r} in {args.dataset}")
    mdp = byid[args.id]
    config = _base_config(kwargs, layout)
    plans = []
    starts = range(len(mdp.initial_scenes)) if mdp.initial_scenes else [0]
    for index in starts:
        plan = solve(mdp, max_depth=args.max_depth, scene_index=index,
                     config=config)
        plans.append(None if plan is None
                     else [action_to_json(a) for a in plan])
    print(json.dumps({"id": mdp.id, "plans": plans}, sort_keys=True))
    return 0 if all(p is not None for p in plans) else 1


def _cmd_validate(args, overrides):
    try:
        _specs, summary = load_dataset(args.dataset)
    except DatasetError as exc:
        print(json.dumps({"errors": exc.errors}, sort_keys=True))
        return 1
    except OSError as exc:
        _fail(f"cannot read dataset {args.dataset}: {exc}")
    print(json.dumps({"errors": [], "summary": summary}, sort_keys=True))
    return 0


def _cmd_generate(args, overrides):
    try:
        paths = generate_fixtures(args.seed, args.count, args.out)
    except (OSError, ValueError) as exc:
        _fail(f"generation failed: {exc}")
    specs = []
    for path in paths:
        specs.extend(load_dataset(path)[0])
    print(json.dumps({"files": [str(p) for p in paths],
                      "summary": summarize(specs)}, sort_keys=True))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tribox", description="visual reasoning environment toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a program against a scene")
    p.add_argument("--program", required=True)
    p.add_argument("--scene", required=True)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("step", help="serve the stdio step protocol")
    p.add_argument("--mdp", required=True, help="dataset file")
    p.add_argument("--id", default=None, help="default MDP id for resets")
    p.add_argument("--seed", type=int, default=None,
                   help="issue an initial reset with this seed")
    p.set_defaults(func=_cmd_step)

    p = sub.add_parser("rollout", help="run policy rollouts over a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--policy", required=True,
                   choices=("random", "oracle", "stop"))
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="trajectory JSONL path")
    p.add_argument("--episodes", type=int, default=1,
                   help="episodes per MDP (default 1)")
    p.set_defaults(func=_cmd_rollout)

    p = sub.add_parser("render", help="rasterize a scene file to PNG")
    p.add_argument("--scene", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("solve", help="search for plans for one MDP")
    p.add_argument("--dataset", required=True)
    p.add_argument("--id", required=True)
    p.add_argument("--max-depth", type=int, default=8)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("validate", help="check a dataset file")
    p.add_argument("--dataset", required=True)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("generate", help="write synthetic fixture datasets")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        overrides = load_overrides()
        return args.func(args, overrides)
    except _CliError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    raise SystemExit(main())
