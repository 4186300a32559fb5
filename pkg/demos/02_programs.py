"""The boolean DSL: parsing, kind checking, evaluation, pretty printing.

Statements about a scene compile to a small lambda-calculus over object
sets.  Everything bottoms out in a bool, so annotation checking is just
"evaluate and compare".

Run:  python3 demos/02_programs.py
"""

from tribox import (
    Color,
    Kind,
    PlacedObject,
    ProgramError,
    Scene,
    Shape,
    Size,
    Variant,
    compile_program,
    evaluate,
    parse,
    pretty,
    register,
)

scene = Scene(Variant.SCATTER, (
    PlacedObject(0, Shape.SQUARE, Color.BLUE, Size.SMALL, x=5, y=5),
    PlacedObject(1, Shape.CIRCLE, Color.BLUE, Size.SMALL, x=40, y=5),
    PlacedObject(2, Shape.TRIANGLE, Color.YELLOW, Size.SMALL, x=140, y=5),
))

SOURCES = [
    "exist(filter_obj(all_items, is_blue))",
    "count(filter_obj(all_items, is_blue)) == 2",
    "unique(filter_obj(all_items, is_yellow))",
    "count(get_set_colors(all_items)) == 3",
    "exist(filter_obj(all_items, lambda o: is_triangle(o) and not is_blue(o)))",
    "exist(filter_obj(all_boxes, lambda x: count(x.all_items_in_box()) >= 2))",
]

for src in SOURCES:
    program = compile_program(src)
    print(f"{evaluate(program, scene)!s:5}  {src}")

# pretty() inverts parse(): useful for canonicalizing annotations.
ast = parse("exist(filter_obj(all_items,lambda o:is_blue(o)or is_yellow(o)))")
print("pretty:", pretty(ast))

# Compile errors carry positions and expectations.
try:
    compile_program("count(all_items) == is_blue")
except ProgramError as err:
    print("rejected:", err)

# The builtin table is extensible; new names are available to the parser
# immediately afterwards.
register("is_wide", (Kind.OBJ,), Kind.BOOL,
         lambda ctx, v: v.obj.size is not Size.SMALL)
print("extended:", evaluate(compile_program(
    "exist(filter_obj(all_items, is_wide))"), scene))
