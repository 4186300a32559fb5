"""Rollouts, policies, solvers, and metric aggregation."""

import math
import re

import pytest

from tribox.dataio import MdpSpec, generate_fixtures, load_dataset
from tribox.env import (
    ActionMask,
    Condition,
    EnvConfig,
    GridAdd,
    GridRemove,
    Stop,
    TowerAdd,
    TowerRemove,
    apply_transition,
)
from tribox.harness import (
    Trajectory,
    TrajectoryStep,
    aggregate,
    describe_program,
    episode_seed,
    evaluate_policy,
    oracle_policy,
    plan_succeeds,
    random_policy,
    ratio_clip,
    rollout,
    solve,
    solve_scatter,
    solve_tower,
    stop_policy,
)
from tribox.scene import (
    Color,
    Layout,
    PlacedObject,
    Scene,
    Shape,
    Side,
    Size,
    Variant,
)

L = Layout()
HEX16 = re.compile(r"^[0-9a-f]{16}$")


def tower_mdp(source, statement="test statement", condition=Condition.SCRATCH,
              scenes=(), target=True, split="train"):
    return MdpSpec("t-0", Variant.TOWER, condition, statement, source,
                   target, tuple(scenes), split)


def scatter_mdp(source, condition=Condition.SCRATCH, scenes=(), target=True):
    return MdpSpec("s-0", Variant.SCATTER, condition, "test statement",
                   source, target, tuple(scenes), "train")


def scatter_scene(*objects):
    return Scene(Variant.SCATTER, tuple(objects), L)


@pytest.fixture(scope="module")
def fixture_mdps(tmp_path_factory):
    out = tmp_path_factory.mktemp("fx")
    mdps = []
    for path in generate_fixtures(11, 4, out):
        mdps.extend(load_dataset(path)[0])
    return mdps


# ---------------------------------------------------------------------------
# seeds and trajectories

def test_episode_seed_is_stable_and_spread():
    a = episode_seed(7, "m-1", 0)
    assert a == episode_seed(7, "m-1", 0)
    others = {episode_seed(7, "m-1", 1), episode_seed(7, "m-2", 0),
              episode_seed(8, "m-1", 0)}
    assert a not in others and len(others) == 3


def test_trajectory_shape_and_json(fixture_mdps):
    mdp = fixture_mdps[0]
    traj = rollout(oracle_policy(mdp), mdp, seed=3)
    assert traj.mdp_id == mdp.id
    assert traj.length == len(traj.steps) <= 12
    assert traj.success and traj.termination == "stopped_success"
    assert all(HEX16.match(s.scene) for s in traj.steps)
    data = traj.to_json()
    assert set(data) == {"mdp_id", "seed", "steps", "termination",
                         "success", "length"}
    assert all(set(s) == {"scene", "action", "reward"} for s in data["steps"])


def test_rollout_rewards_stay_in_range(fixture_mdps):
    for i, mdp in enumerate(fixture_mdps):
        traj = rollout(random_policy(i), mdp, seed=i)
        for step in traj.steps:
            assert step.reward in (1.0, -1.0, -0.02)
        assert traj.success == (traj.termination == "stopped_success")


def test_stop_policy_single_step(fixture_mdps):
    traj = rollout(stop_policy(), fixture_mdps[0], seed=0)
    assert traj.length == 1
    assert isinstance(traj.steps[0].action, Stop)
    assert traj.termination.startswith("stopped")


def test_rollout_is_reproducible(fixture_mdps):
    mdp = fixture_mdps[5]
    a = rollout(random_policy(21), mdp, seed=13).to_json()
    b = rollout(random_policy(21), mdp, seed=13).to_json()
    assert a == b


def test_rollout_rejects_out_of_space_actions(fixture_mdps):
    tower = next(m for m in fixture_mdps if m.variant is Variant.TOWER)

    def bad_policy(scene, context, mask, config):
        return GridAdd(0, 0, Shape.SQUARE, Color.BLUE, Size.SMALL)

    with pytest.raises(RuntimeError, match=tower.id):
        rollout(bad_policy, tower, seed=0)


def never_stop_policy(seed):
    """Random actions, but Stop only when the mask forces it."""
    inner = random_policy(seed)

    def policy(scene, context, mask, config):
        if mask is not None and mask.stop_only:
            return Stop()
        for _ in range(50):
            action = inner(scene, context, None, config)
            if not isinstance(action, Stop):
                return action
        return action

    return policy


def test_masked_rollouts_stop_exactly_when_forced(fixture_mdps):
    # the mask collapses to Stop-only precisely in satisfying scenes, so a
    # policy that never stops on its own can never end in stopped_failure —
    # every stop it takes was forced, and forced stops succeed
    outcomes = set()
    for i, mdp in enumerate(fixture_mdps):
        for ep in range(4):
            traj = rollout(never_stop_policy(episode_seed(31, mdp.id, ep)),
                           mdp, seed=ep, use_mask=True)
            outcomes.add(traj.termination)
            assert traj.termination != "stopped_failure"
    assert "stopped_success" in outcomes


# ---------------------------------------------------------------------------
# random policy distribution

def test_random_policy_type_and_argument_frequencies():
    config = EnvConfig(variant=Variant.TOWER, condition=Condition.SCRATCH)
    scene = Scene(Variant.TOWER, (), L)
    policy = random_policy(97)
    n = 27_000
    draws = [policy(scene, None, None, config) for _ in range(n)]
    stops = sum(isinstance(a, Stop) for a in draws)
    adds = sum(isinstance(a, TowerAdd) for a in draws)
    removes = sum(isinstance(a, TowerRemove) for a in draws)
    third = n / 3
    for count in (stops, adds, removes):
        assert abs(count - third) < 5 * math.sqrt(third * 2 / 3)
    # each concrete add lands with probability 1/27
    specific = sum(a == TowerAdd(0, Color.BLACK) for a in draws)
    expect = n / 27
    assert abs(specific - expect) < 5 * math.sqrt(expect * 26 / 27)


def test_random_policy_honors_stop_mask():
    config = EnvConfig(variant=Variant.TOWER, condition=Condition.SCRATCH)
    scene = Scene(Variant.TOWER, (), L)
    mask = ActionMask(stop_only=True, size=13)
    policy = random_policy(4)
    assert all(isinstance(policy(scene, None, mask, config), Stop)
               for _ in range(50))


# ---------------------------------------------------------------------------
# tower solving

def test_solve_tower_picks_first_enumerated_shortest_plan():
    mdp = tower_mdp("exist(filter_obj(all_items, is_blue))")
    assert solve_tower(mdp) == (TowerAdd(0, Color.BLUE), Stop())
    # any object satisfies: the very first enumerated add wins the tie
    loose = tower_mdp("exist(all_items)")
    assert solve_tower(loose) == (TowerAdd(0, Color.BLACK), Stop())


def test_solve_tower_already_satisfied():
    mdp = tower_mdp("count(all_items) == 0")
    assert solve_tower(mdp) == (Stop(),)


def test_solve_tower_multi_step_and_replay():
    mdp = tower_mdp(
        "exist(filter_obj(all_boxes, lambda x: x.is_tower() "
        "and count(x.all_items_in_box()) == 3))")
    plan = solve_tower(mdp)
    assert plan is not None and len(plan) == 4
    config = mdp.env_config()
    start = Scene(Variant.TOWER, (), L)
    assert plan_succeeds(plan, start, mdp.context(), config)


def test_solve_tower_respects_depth_limit():
    mdp = tower_mdp("count(filter_obj(all_items, is_blue)) >= 3")
    assert solve_tower(mdp, max_depth=2) is None
    assert solve_tower(mdp, max_depth=3) is not None


def test_solve_tower_flipit_scene_index():
    config = EnvConfig(variant=Variant.TOWER, condition=Condition.FLIPIT)
    empty = Scene(Variant.TOWER, (), L)
    blue = apply_transition(empty, TowerAdd(0, Color.BLUE), config)
    yellow = apply_transition(empty, TowerAdd(1, Color.YELLOW), config)
    mdp = tower_mdp("exist(filter_obj(all_items, is_blue))",
                    condition=Condition.FLIPIT, scenes=(blue, yellow),
                    target=False)
    # first scene: the blue block must go; second scene already satisfies
    assert solve_tower(mdp, scene_index=0) == (TowerRemove(0), Stop())
    assert solve_tower(mdp, scene_index=1) == (Stop(),)


def test_solve_tower_rejects_scatter():
    with pytest.raises(ValueError):
        solve_tower(scatter_mdp("exist(all_items)"))


# ---------------------------------------------------------------------------
# program descriptors and scripted scatter solving

def test_describe_program_families():
    cases = {
        "exist(filter_obj(all_items, is_blue))":
            ("exist", {"color": Color.BLUE}),
        "exist(filter_obj(all_items, lambda o: is_blue(o) and is_circle(o)))":
            ("exist", {"color": Color.BLUE, "shape": Shape.CIRCLE}),
        "count(filter_obj(all_items, is_yellow)) >= 2":
            ("count", ">=", {"color": Color.YELLOW}, 2),
        "count(all_items) == 3": ("count", "==", {}, 3),
        "count(get_set_colors(all_items)) == 2": ("palette", 2),
        "exist(filter_obj(all_boxes, lambda x: "
        "count(get_set_colors(x.all_items_in_box())) == 3))":
            ("box_palette", 3),
        "exist(filter_obj(all_items, lambda a: is_blue(a) and "
        "exist(filter_obj(all_items, lambda b: is_yellow(b) "
        "and is_touching(a, b)))))":
            ("pair", {"color": Color.BLUE}, {"color": Color.YELLOW}, "touch"),
        "exist(filter_obj(all_items, lambda o: is_black(o) "
        "and is_touching_wall(o, Side.BOTTOM)))":
            ("wall", {"color": Color.BLACK}, Side.BOTTOM),
        "exist(filter_obj(all_items, is_blue)) "
        "and not exist(filter_obj(all_items, is_yellow))":
            ("exist_not", {"color": Color.BLUE}, {"color": Color.YELLOW}),
    }
    for source, expected in cases.items():
        assert describe_program(scatter_mdp(source).program()) == expected


def test_describe_program_unknown_shapes():
    for source in ("unique(all_items)",
                   "exist(filter_obj(all_items, lambda o: is_top(o)))",
                   "count(all_items) == count(all_boxes)"):
        assert describe_program(scatter_mdp(source).program()) is None


@pytest.mark.parametrize("source", [
    "exist(filter_obj(all_items, lambda o: is_yellow(o) and is_large(o)))",
    "count(filter_obj(all_items, is_blue)) == 3",
    "count(filter_obj(all_items, is_black)) >= 2",
    "count(get_set_colors(all_items)) == 3",
    "exist(filter_obj(all_boxes, lambda x: "
    "count(get_set_colors(x.all_items_in_box())) == 2))",
    "exist(filter_obj(all_items, lambda a: is_blue(a) and "
    "exist(filter_obj(all_items, lambda b: is_yellow(b) "
    "and is_touching(a, b)))))",
    "exist(filter_obj(all_items, is_black)) "
    "and not exist(filter_obj(all_items, is_blue))",
])
def test_solve_scatter_scratch_families(source):
    mdp = scatter_mdp(source)
    plan = solve_scatter(mdp)
    assert plan is not None and isinstance(plan[-1], Stop)
    config = mdp.env_config()
    assert len(plan) <= config.horizon
    assert plan_succeeds(plan, Scene(Variant.SCATTER, (), L), mdp.context(),
                         config)


@pytest.mark.parametrize("side", list(Side))
def test_solve_scatter_reaches_every_wall(side):
    mdp = scatter_mdp(
        f"exist(filter_obj(all_items, lambda o: is_blue(o) "
        f"and is_touching_wall(o, Side.{side.name})))")
    plan = solve_scatter(mdp)
    assert plan is not None
    assert plan_succeeds(plan, Scene(Variant.SCATTER, (), L), mdp.context(),
                         mdp.env_config())


def test_solve_scatter_nearly_touching_not_buildable():
    # the snapping grid collapses 1..4 pixel gaps, so construction from an
    # empty canvas is out of reach by design
    mdp = scatter_mdp(
        "exist(filter_obj(all_items, lambda a: is_blue(a) and "
        "exist(filter_obj(all_items, lambda b: is_yellow(b) "
        "and is_nearly_touching(a, b)))))")
    assert solve_scatter(mdp) is None


def test_solve_scatter_flipit_removes_witness():
    pair = scatter_scene(
        PlacedObject(0, Shape.SQUARE, Color.BLUE, Size.SMALL, 20, 20),
        PlacedObject(1, Shape.SQUARE, Color.YELLOW, Size.SMALL, 32, 20),
    )
    mdp = scatter_mdp(
        "exist(filter_obj(all_items, lambda a: is_blue(a) and "
        "exist(filter_obj(all_items, lambda b: is_yellow(b) "
        "and is_nearly_touching(a, b)))))",
        condition=Condition.FLIPIT, scenes=(pair,), target=False)
    plan = solve_scatter(mdp, pair)
    assert plan is not None
    assert any(isinstance(a, GridRemove) for a in plan)
    assert plan_succeeds(plan, pair, mdp.context(), mdp.env_config())


def test_solve_dispatcher_covers_fixtures(fixture_mdps):
    for mdp in fixture_mdps:
        indices = range(len(mdp.initial_scenes)) if mdp.initial_scenes else [0]
        for i in indices:
            plan = solve(mdp, scene_index=i)
            assert plan is not None, mdp.id


def test_oracle_policy_full_success(fixture_mdps):
    trajs, report = evaluate_policy(
        lambda mdp, seed: oracle_policy(mdp), fixture_mdps,
        episodes_per_mdp=3, base_seed=17)
    assert report.task_completion_accuracy == 100.0
    assert report.pct_invalid_action == 0.0
    assert all(t.success for t in trajs)


# ---------------------------------------------------------------------------
# aggregation

def traj(term, *steps, mdp_id="m", seed=0):
    steps = tuple(TrajectoryStep("0" * 16, a, r) for a, r in steps)
    return Trajectory(mdp_id, seed, steps, term,
                      term == "stopped_success", len(steps))


def test_aggregate_exact_numbers():
    trajectories = [
        traj("stopped_success", (TowerAdd(0, Color.BLUE), -0.02), (Stop(), 1.0)),
        traj("stopped_failure", (Stop(), -1.0)),
        traj("invalid_action", (TowerRemove(0), -1.0)),
        traj("horizon", *([(TowerAdd(0, Color.BLUE), -0.02)] * 11
                          + [(TowerAdd(1, Color.BLUE), -1.0)])),
    ]
    report = aggregate(trajectories)
    assert report.n_rollouts == 4
    assert report.task_completion_accuracy == 25.0
    assert report.pct_no_stop == 50.0
    assert report.pct_invalid_action == 25.0
    assert report.mean_actions_per_rollout == (2 + 1 + 1 + 12) / 4
    assert report.add_remove_ratio == 13 / 1
    assert math.isclose(report.mean_reward,
                        (0.98 - 1.0 - 1.0 + (-0.02 * 11 - 1.0)) / 4)
    data = report.to_json()
    assert data["add_remove_ratio"] == 13.0
    assert isinstance(data["notes"], list) and data["notes"]


def test_aggregate_no_removes_gives_null_ratio():
    report = aggregate([traj("stopped_success", (Stop(), 1.0))])
    assert report.add_remove_ratio is None
    assert report.to_json()["add_remove_ratio"] is None


def test_aggregate_requires_trajectories():
    with pytest.raises(ValueError):
        aggregate([])


def test_accuracy_bounded_by_invalid_rate(fixture_mdps):
    _trajs, report = evaluate_policy(
        lambda mdp, seed: random_policy(seed), fixture_mdps,
        episodes_per_mdp=6, base_seed=23)
    assert report.task_completion_accuracy <= 100.0 - report.pct_invalid_action
    assert report.mean_reward < 0.0


def test_evaluate_policy_reproducible(fixture_mdps):
    runs = []
    for _ in range(2):
        trajs, _report = evaluate_policy(
            lambda mdp, seed: random_policy(seed), fixture_mdps[:4],
            episodes_per_mdp=2, base_seed=5)
        runs.append([t.to_json() for t in trajs])
    assert runs[0] == runs[1]


def test_ratio_clip_frozen_examples():
    assert ratio_clip(0.5, 10) == 0.5
    assert ratio_clip(1e6, 10) == 10
    assert ratio_clip(10, 10) == 10
    with pytest.raises(ValueError):
        ratio_clip(1.0, 0)
