"""Language-conditioned visual reasoning environments over a three-box canvas.

The package splits into layers that stack cleanly:

scene     -- canvas geometry, placed objects, fingerprints
programs  -- the boolean DSL: parser, kind checker, evaluator
env       -- actions, validity, the four-case reward, masks
render    -- numpy rasterizer and PNG helpers
dataio    -- MDP records, dataset files, schema validation
harness   -- rollouts, policies, scripted solvers, metrics
fixtures  -- seeded benchmark generation
protocol  -- JSON-lines server used by child-process bindings
cli       -- subcommand front end over all of the above
"""

from .scene import (
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
from .programs import (
    BUILTINS,
    NEARLY_TOUCHING_RANGE,
    Kind,
    ProgramError,
    ProgramSyntaxError,
    compile_program,
    evaluate,
    kind_check,
    parse,
    pretty,
    register,
)
from .env import (
    ActionMask,
    ActionMode,
    Condition,
    Context,
    EnvConfig,
    EpisodeDone,
    EpisodeState,
    GridAdd,
    GridRemove,
    Horizon,
    InvalidAction,
    InvalidReason,
    ScatterAdd,
    ScatterRemove,
    Stop,
    Stopped,
    TowerAdd,
    TowerRemove,
    VariantMismatch,
    action_from_index,
    action_from_json,
    action_index,
    action_space_size,
    action_to_json,
    apply_transition,
    assign_flipit_target,
    goal_set_reward,
    goal_set_step,
    grid_place,
    grid_remove_target,
    iter_actions,
    reset,
    step,
    stop_forcing_mask,
    termination_string,
    validate,
)
from .render import DEFAULT_PALETTE, Palette, export_png, load_png, render
from .dataio import (
    DatasetError,
    MdpSpec,
    load_dataset,
    mdp_from_json,
    mdp_problems,
    mdp_to_json,
    save_dataset,
    scene_from_json,
    scene_to_json,
    summarize,
    validate_annotation,
)
from .harness import (
    MetricsReport,
    OraclePolicy,
    RandomPolicy,
    Trajectory,
    TrajectoryStep,
    aggregate,
    episode_seed,
    evaluate_policy,
    oracle_policy,
    plan_succeeds,
    random_policy,
    rollout,
    solve,
    solve_from,
    stop_policy,
)
from .fixtures import generate_fixtures
from .protocol import ProtocolServer, serve

__version__ = "0.1.0"
