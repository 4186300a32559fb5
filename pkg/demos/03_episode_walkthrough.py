"""One full episode, stepped by hand.

The reward has exactly four cases, checked top-down:

  stop while the program's truth equals the target   -> +1.0
  stop otherwise                                     -> -1.0
  invalid action, or valid action hitting the horizon-> -1.0
  any other valid action                             -> -0.02 (per step)

Run:  python3 demos/03_episode_walkthrough.py
"""

from tribox import (
    Color,
    Condition,
    Context,
    EnvConfig,
    Stop,
    TowerAdd,
    TowerRemove,
    Variant,
    compile_program,
    reset,
    step,
    stop_forcing_mask,
    termination_string,
)

config = EnvConfig(variant=Variant.TOWER, condition=Condition.SCRATCH)
statement = "there are exactly two blue blocks"
context = Context(statement, compile_program(
    "count(filter_obj(all_items, is_blue)) == 2"), target=True)

state = reset(config)
print(f"statement: {statement!r}  target={context.target}  horizon={config.horizon}")


def show(label, state, reward):
    mask = stop_forcing_mask(state, context, config) if not state.done else None
    forced = "  [mask: stop forced]" if mask and mask.stop_only else ""
    print(f"{label:28} reward={reward:+.2f}  t={state.t}  "
          f"objects={len(state.scene.objects)}  "
          f"termination={termination_string(state.termination)}{forced}")


# Build toward the target: two blue blocks in box 0.
for i in range(2):
    state, reward, _ = step(state, TowerAdd(0, Color.BLUE), context, config)
    show(f"add blue to box 0 (#{i + 1})", state, reward)

# A wrong move and its repair both cost the per-step penalty.
state, reward, _ = step(state, TowerAdd(1, Color.YELLOW), context, config)
show("add yellow to box 1", state, reward)
state, reward, _ = step(state, TowerRemove(1), context, config)
show("remove it again", state, reward)

# Stopping now wins: the program evaluates True and the target is True.
state, reward, _ = step(state, Stop(), context, config)
show("stop", state, reward)

# Invalid actions terminate with -1 and leave the scene untouched.
state = reset(config)
state, reward, _ = step(state, TowerRemove(2), context, config)
show("remove from empty box", state, reward)

# So does running out the horizon with valid moves.
state = reset(config)
for t in range(config.horizon):
    state, reward, _ = step(state, TowerAdd(t % 3, Color.BLACK), context, config)
show(f"{config.horizon} adds later", state, reward)
