"""Grid-mode scatter actions: cell targeting, snapping, removal.

The full pixel action space has 1,064,001 entries; the 19x5 grid mode
collapses it to 2,661 by replacing coordinates with cell indices plus two
placement heuristics: row-major first-fit inside the cell, and snapping
to the nearest neighbour whenever the candidate lands 1..4 px away.

Run:  python3 demos/04_grid_actions.py
"""

from tribox import (
    ActionMode,
    Color,
    EnvConfig,
    GridAdd,
    GridRemove,
    Scene,
    Shape,
    Size,
    Variant,
    action_space_size,
    apply_transition,
    grid_place,
    grid_remove_target,
    validate,
)
from tribox.env import EpisodeState

config = EnvConfig(variant=Variant.SCATTER, action_mode=ActionMode.GRID)
pixel = EnvConfig(variant=Variant.SCATTER, action_mode=ActionMode.PIXEL)
print(f"pixel-mode actions: {action_space_size(pixel):,}")
print(f"grid-mode actions:  {action_space_size(config):,} "
      f"({config.grid_cols}x{config.grid_rows} cells)")

scene = Scene(Variant.SCATTER, ())

# An empty cell places at its upper-left corner.
spec = (Shape.SQUARE, Color.BLUE, Size.SMALL)
print("cell (0,0) empty   ->", grid_place(scene, (0, 0), spec, config))

scene = apply_transition(scene, GridAdd(0, 0, *spec), config)

# The same cell again: the corner is occupied, the scan walks right until
# the candidate clears the first square -- and then snaps back to touch it.
placed = grid_place(scene, (0, 0), spec, config)
print("cell (0,0) again   ->", placed, "(snapped flush against the first)")
scene = apply_transition(scene, GridAdd(0, 0, *spec), config)

# Neighbouring cell: the first candidate sits a few px from the pair,
# inside snap range, so it lands touching as well.
print("cell (1,0) next    ->", grid_place(scene, (1, 0), spec, config))

# Removal targets whichever object overlaps the cell the most.
state = EpisodeState(scene)
victim = grid_remove_target(scene, (0, 0), config)
print(f"remove at (0,0)    -> object {victim}")
print("remove at (9,4)    ->", grid_remove_target(scene, (9, 4), config),
      "(empty cell: nothing to remove)")
print("validate empty rm  ->", validate(state, GridRemove(9, 4), config).value)

# A cell is only unusable once nothing fits anywhere inside it.
large = (Shape.CIRCLE, Color.YELLOW, Size.LARGE)
print("large into (0,0)   ->", grid_place(scene, (0, 0), large, config))
