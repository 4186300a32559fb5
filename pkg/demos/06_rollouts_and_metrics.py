"""Policies, rollouts, scripted solving, and the metrics report.

A policy is any callable (scene, context, mask, config) -> action, with
an optional begin_episode(scene, context, config) hook.  The harness
ships three: stop immediately, seeded random, and a scripted oracle that
plans with BFS (tower) or program-pattern templates (scatter).

Run:  python3 demos/06_rollouts_and_metrics.py
"""

import json
import tempfile
from pathlib import Path

from tribox import (
    RandomPolicy,
    evaluate_policy,
    generate_fixtures,
    load_dataset,
    oracle_policy,
    rollout,
    solve,
)

with tempfile.TemporaryDirectory() as tmp:
    files = generate_fixtures(seed=11, count=6, out_dir=Path(tmp))
    mdps = []
    for f in files:
        specs, _ = load_dataset(f)
        mdps.extend(specs)
print(f"{len(mdps)} benchmark MDPs generated")

# A single scripted episode, step by step.
mdp = mdps[0]
plan = solve(mdp)
print(f"\n{mdp.id}: {mdp.statement!r} (target={mdp.target})")
print(f"plan: {[type(a).__name__ for a in plan]}")
traj = rollout(oracle_policy(mdp), mdp, seed=3)
print(f"rollout: length={traj.length} return={traj.episode_return():+.2f} "
      f"termination={traj.termination} success={traj.success}")

# Aggregate behaviour of the two baseline policies over the whole set.
for name, factory in [
    ("oracle", lambda mdp, seed: oracle_policy(mdp)),
    ("random", lambda mdp, seed: RandomPolicy(seed)),
]:
    trajectories, report = evaluate_policy(
        factory, mdps, episodes_per_mdp=5, base_seed=97)
    print(f"\n{name} policy over {report.n_rollouts} rollouts:")
    print(f"  completion  {report.task_completion_accuracy:5.1f}%")
    print(f"  mean reward {report.mean_reward:+.3f}")
    print(f"  no-stop     {report.pct_no_stop:5.1f}%   "
          f"invalid {report.pct_invalid_action:5.1f}%")
    print(f"  actions/ep  {report.mean_actions_per_rollout:.2f}   "
          f"add:remove {report.add_remove_ratio}")

# Reports serialize for dashboards; trajectories for replay.
print("\nreport JSON keys:", sorted(report.to_json()))
print("one trajectory:", json.dumps(traj.to_json())[:120], "...")
