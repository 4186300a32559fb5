"""Executable boolean programs over scenes.

A program is a closed expression — calls, method calls, single-parameter
lambdas, and/or/not, chain-free comparisons, integer literals, dotted enum
literals — whose root has boolean kind.  The language has no loops,
recursion, or arithmetic, so evaluation always terminates, and set
traversal is canonically ordered, so it is deterministic.

Typical lifecycle::

    ast = compile_program(source)     # parse + bind + kind-check
    truth = evaluate(ast, scene)
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .scene import (
    Color,
    PlacedObject,
    Scene,
    Shape,
    Side,
    Size,
    bounding_box,
    gap,
    object_box,
)

NEARLY_TOUCHING_RANGE = (1, 4)  # inclusive pixel-gap band


# ---------------------------------------------------------------------------
# errors

class ProgramError(ValueError):
    pass


class ProgramSyntaxError(ProgramError):
    def __init__(self, position: int, expected: str):
        self.position = position
        self.expected = expected
        super().__init__(f"at {position}: expected {expected}")


class UnboundVariableError(ProgramError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unbound variable {name!r}")


class UnknownBuiltinError(ProgramError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown builtin {name!r}")


class ArityMismatchError(ProgramError):
    def __init__(self, name: str, want: int, got: int):
        self.name = name
        super().__init__(f"{name} takes {want} argument(s), got {got}")


class TypeMismatchError(ProgramError):
    def __init__(self, where: str, expected: str, got: str):
        self.where = where
        self.expected = expected
        self.got = got
        super().__init__(f"{where}: expected {expected}, got {got}")


# ---------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class EnumLit:
    namespace: str
    member: str


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


@dataclass(frozen=True)
class MethodCall:
    receiver: object
    name: str
    args: tuple


@dataclass(frozen=True)
class Lambda:
    param: str
    body: object


@dataclass(frozen=True)
class Compare:
    op: str
    lhs: object
    rhs: object


@dataclass(frozen=True)
class And:
    lhs: object
    rhs: object


@dataclass(frozen=True)
class Or:
    lhs: object
    rhs: object


@dataclass(frozen=True)
class Not:
    operand: object


ENUM_NAMESPACES = {
    "Side": Side,
    "Color": Color,
    "Shape": Shape,
    "Size": Size,
}


# ---------------------------------------------------------------------------
# tokenizer / parser

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>==|!=|<=|>=|[<>().,:]))"
)

_KEYWORDS = {"lambda", "and", "or", "not", "True", "False"}
_CMP_OPS = {"==", "!=", "<", "<=", ">", ">="}


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ProgramSyntaxError(len(text) - len(stripped), "a token")
        if m.lastgroup == "int":
            tokens.append(("int", m.group("int"), m.start("int")))
        elif m.lastgroup == "name":
            name = m.group("name")
            kind = name if name in _KEYWORDS else "name"
            tokens.append((kind, name, m.start("name")))
        else:
            tokens.append((m.group("op"), m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind):
        tok = self.peek()
        if tok[0] != kind:
            raise ProgramSyntaxError(tok[2], repr(kind))
        return self.next()

    # precedence (low to high): lambda, or, and, not, comparison, primary
    def expr(self):
        if self.peek()[0] == "lambda":
            return self.lambda_expr()
        return self.or_expr()

    def lambda_expr(self):
        self.expect("lambda")
        name = self.expect("name")[1]
        self.expect(":")
        return Lambda(name, self.expr())

    def or_expr(self):
        node = self.and_expr()
        while self.peek()[0] == "or":
            self.next()
            node = Or(node, self.and_expr())
        return node

    def and_expr(self):
        node = self.not_expr()
        while self.peek()[0] == "and":
            self.next()
            node = And(node, self.not_expr())
        return node

    def not_expr(self):
        if self.peek()[0] == "not":
            self.next()
            return Not(self.not_expr())
        return self.comparison()

    def comparison(self):
        node = self.primary()
        if self.peek()[0] in _CMP_OPS:
            op = self.next()[0]
            rhs = self.primary()
            node = Compare(op, node, rhs)
            if self.peek()[0] in _CMP_OPS:
                raise ProgramSyntaxError(self.peek()[2], "no chained comparison")
        return node

    def primary(self):
        node = self.atom()
        while True:
            tok = self.peek()
            if tok[0] == "(":
                if not isinstance(node, Var):
                    raise ProgramSyntaxError(tok[2], "a callable name")
                self.next()
                node = Call(node.name, self.arglist())
            elif tok[0] == ".":
                self.next()
                attr = self.expect("name")[1]
                if self.peek()[0] == "(":
                    self.next()
                    node = MethodCall(node, attr, self.arglist())
                elif isinstance(node, Var) and node.name in ENUM_NAMESPACES:
                    node = EnumLit(node.name, attr)
                else:
                    raise ProgramSyntaxError(
                        self.peek()[2], "'(' (only enum namespaces allow bare '.member')"
                    )
            else:
                return node

    def arglist(self):
        args = []
        if self.peek()[0] != ")":
            args.append(self.expr())
            while self.peek()[0] == ",":
                self.next()
                args.append(self.expr())
        self.expect(")")
        return tuple(args)

    def atom(self):
        tok = self.peek()
        if tok[0] == "int":
            self.next()
            return IntLit(int(tok[1]))
        if tok[0] == "True":
            self.next()
            return BoolLit(True)
        if tok[0] == "False":
            self.next()
            return BoolLit(False)
        if tok[0] == "lambda":
            return self.lambda_expr()
        if tok[0] == "name":
            self.next()
            return Var(tok[1])
        if tok[0] == "(":
            self.next()
            node = self.expr()
            self.expect(")")
            return node
        raise ProgramSyntaxError(tok[2], "an expression")


# ---------------------------------------------------------------------------
# kinds and the builtin catalogue

class Kind(Enum):
    BOOL = "bool"
    INT = "int"
    OBJ = "obj"
    BOX = "box"
    OBJ_SET = "obj_set"
    BOX_SET = "box_set"
    COLOR_SET = "color_set"
    SHAPE_SET = "shape_set"
    COLOR = "color"
    SHAPE = "shape"
    SIZE = "size"
    SIDE = "side"
    PRED = "pred"


SET_KINDS = {Kind.OBJ_SET, Kind.BOX_SET, Kind.COLOR_SET, Kind.SHAPE_SET}
ELEMENT_KIND = {Kind.OBJ_SET: Kind.OBJ, Kind.BOX_SET: Kind.BOX}
EQ_KINDS = {
    Kind.BOOL, Kind.INT, Kind.COLOR, Kind.SHAPE, Kind.SIZE, Kind.SIDE,
    Kind.COLOR_SET, Kind.SHAPE_SET,
}

_ENUM_KIND = {"Side": Kind.SIDE, "Color": Kind.COLOR, "Shape": Kind.SHAPE, "Size": Kind.SIZE}


@dataclass(frozen=True)
class ObjVal:
    """A placed object plus the index of the box that holds it."""
    obj: PlacedObject
    box: int


@dataclass(frozen=True)
class BoxVal:
    index: int


class EvalContext:
    """Per-evaluation view of one scene: box membership, geometry, knobs."""

    def __init__(self, scene: Scene, near_range=NEARLY_TOUCHING_RANGE):
        self.scene = scene
        self.layout = scene.layout
        self.near_range = near_range
        self.objvals = tuple(
            ObjVal(o, object_box(o, scene.layout)) for o in scene.objects
        )

    def in_box(self, index: int):
        return tuple(v for v in self.objvals if v.box == index)

    def bbox(self, v: ObjVal):
        return bounding_box(v.obj, self.layout)

    def obj_gap(self, a: ObjVal, b: ObjVal) -> int:
        return gap(self.bbox(a), self.bbox(b))

    def wall_gap(self, v: ObjVal, side: Side) -> int:
        bx0, by0, bx1, by1 = self.layout.box_rect(v.box)
        edge = {
            Side.TOP: (bx0, by0, bx1, by0),
            Side.BOTTOM: (bx0, by1, bx1, by1),
            Side.LEFT: (bx0, by0, bx0, by1),
            Side.RIGHT: (bx1, by0, bx1, by1),
        }[side]
        return gap(self.bbox(v), edge)


def _sort_key(value):
    if isinstance(value, ObjVal):
        return (0, value.box, value.obj.y, value.obj.x, value.obj.id)
    if isinstance(value, BoxVal):
        return (1, value.index, 0, 0, 0)
    return (2, str(value), 0, 0, 0)


def canonical(values) -> tuple:
    """Set contents in the canonical (sorted) traversal order."""
    return tuple(sorted(values, key=_sort_key))


def _is_stacked(ctx: EvalContext, items) -> bool:
    """True when items form one vertical pile: aligned x-spans, zero gaps."""
    if not items:
        return False
    pile = sorted(items, key=lambda v: -v.obj.y)  # floor end first
    for below, above in zip(pile, pile[1:]):
        bx0, by0, bx1, by1 = ctx.bbox(below)
        ax0, ay0, ax1, ay1 = ctx.bbox(above)
        if (ax0, ax1) != (bx0, bx1) or ay1 != by0:
            return False
    return True


def _x_overlap(a, b) -> bool:
    ax0, _, ax1, _ = a
    bx0, _, bx1, _ = b
    return max(ax0, bx0) < min(ax1, bx1)


def _above(ctx, v1, v2) -> bool:
    if v1.box != v2.box:
        return False
    a, b = ctx.bbox(v1), ctx.bbox(v2)
    return _x_overlap(a, b) and a[3] <= b[1]


@dataclass(frozen=True)
class Builtin:
    name: str
    arg_kinds: tuple | None  # None => generic over sets, special-cased in checker
    result: Kind | None
    fn: object


def _apply_pred(ctx, pred, element):
    if isinstance(pred, _ClosureVal):
        out = _eval(pred.body, ctx, {**pred.env, pred.param: element})
    elif isinstance(pred, _BuiltinPredVal):  # bare builtin used as predicate
        out = BUILTINS[pred.name].fn(ctx, element)
    else:
        raise TypeMismatchError("filter_obj", "a predicate", type(pred).__name__)
    if not isinstance(out, bool):
        raise TypeMismatchError("predicate result", "bool", type(out).__name__)
    return out


def _builtin_table():
    K = Kind
    near = lambda ctx, a, b: ctx.near_range[0] <= ctx.obj_gap(a, b) <= ctx.near_range[1]
    entries = [
        Builtin("all_boxes", (), K.BOX_SET,
                lambda ctx: frozenset(BoxVal(i) for i in range(ctx.layout.box_count))),
        Builtin("all_items", (), K.OBJ_SET, lambda ctx: frozenset(ctx.objvals)),
        Builtin("filter_obj", None, None,
                lambda ctx, s, p: frozenset(e for e in canonical(s) if _apply_pred(ctx, p, e))),
        Builtin("exist", None, None, lambda ctx, s: len(s) > 0),
        Builtin("count", None, None, lambda ctx, s: len(s)),
        Builtin("unique", None, None, lambda ctx, s: len(s) == 1),
        Builtin("is_black", (K.OBJ,), K.BOOL, lambda ctx, v: v.obj.color is Color.BLACK),
        Builtin("is_blue", (K.OBJ,), K.BOOL, lambda ctx, v: v.obj.color is Color.BLUE),
        Builtin("is_yellow", (K.OBJ,), K.BOOL, lambda ctx, v: v.obj.color is Color.YELLOW),
        Builtin("is_circle", (K.OBJ,), K.BOOL, lambda ctx, v: v.obj.shape is Shape.CIRCLE),
        Builtin("is_square", (K.OBJ,), K.BOOL, lambda ctx, v: v.obj.shape is Shape.SQUARE),
        Builtin("is_triangle", (K.OBJ,), K.BOOL, lambda ctx, v: v.obj.shape is Shape.TRIANGLE),
        Builtin("is_small", (K.OBJ,), K.BOOL, lambda ctx, v: v.obj.size is Size.SMALL),
        Builtin("is_medium", (K.OBJ,), K.BOOL, lambda ctx, v: v.obj.size is Size.MEDIUM),
        Builtin("is_large", (K.OBJ,), K.BOOL, lambda ctx, v: v.obj.size is Size.LARGE),
        Builtin("get_color", (K.OBJ,), K.COLOR, lambda ctx, v: v.obj.color),
        Builtin("get_shape", (K.OBJ,), K.SHAPE, lambda ctx, v: v.obj.shape),
        Builtin("get_size", (K.OBJ,), K.SIZE, lambda ctx, v: v.obj.size),
        Builtin("get_set_colors", (K.OBJ_SET,), K.COLOR_SET,
                lambda ctx, s: frozenset(v.obj.color for v in s)),
        Builtin("get_set_shapes", (K.OBJ_SET,), K.SHAPE_SET,
                lambda ctx, s: frozenset(v.obj.shape for v in s)),
        # is_top/is_bottom rank objects of one box by the y axis, which grows
        # downward: the bottom object carries the largest y.
        Builtin("is_top", (K.OBJ,), K.BOOL,
                lambda ctx, v: v.obj.y == min(w.obj.y for w in ctx.in_box(v.box))),
        Builtin("is_bottom", (K.OBJ,), K.BOOL,
                lambda ctx, v: v.obj.y == max(w.obj.y for w in ctx.in_box(v.box))),
        Builtin("is_touching_wall", (K.OBJ, K.SIDE), K.BOOL,
                lambda ctx, v, side: ctx.wall_gap(v, side) == 0),
        Builtin("is_touching_any_wall", (K.OBJ,), K.BOOL,
                lambda ctx, v: any(ctx.wall_gap(v, s) == 0 for s in Side)),
        Builtin("is_touching", (K.OBJ, K.OBJ), K.BOOL,
                lambda ctx, a, b: ctx.obj_gap(a, b) == 0),
        Builtin("is_nearly_touching", (K.OBJ, K.OBJ), K.BOOL, near),
        Builtin("above", (K.OBJ, K.OBJ), K.BOOL, _above),
        Builtin("below", (K.OBJ, K.OBJ), K.BOOL, lambda ctx, a, b: _above(ctx, b, a)),
    ]
    return {b.name: b for b in entries}


BUILTINS = _builtin_table()

# methods: name -> (receiver kind, result kind, fn(ctx, receiver))
METHODS = {
    "all_items_in_box": (
        Kind.BOX, Kind.OBJ_SET,
        lambda ctx, b: frozenset(ctx.in_box(b.index)),
    ),
    "is_tower": (
        Kind.BOX, Kind.BOOL,
        lambda ctx, b: _is_stacked(ctx, ctx.in_box(b.index)),
    ),
}


def register(name: str, arg_kinds, result: Kind, fn) -> None:
    """Extend the catalogue; refuses to silently redefine an entry."""
    if name in BUILTINS:
        raise ValueError(f"builtin {name!r} already registered")
    BUILTINS[name] = Builtin(name, tuple(arg_kinds), result, fn)


def _builtin_arity(b: Builtin) -> int:
    if b.arg_kinds is not None:
        return len(b.arg_kinds)
    return {"filter_obj": 2, "exist": 1, "count": 1, "unique": 1}[b.name]


# ---------------------------------------------------------------------------
# binding pass (runs inside parse)

def _bind(node, env: frozenset):
    if isinstance(node, (IntLit, BoolLit)):
        return node
    if isinstance(node, EnumLit):
        ns = ENUM_NAMESPACES.get(node.namespace)
        if ns is None or node.member.lower() not in {m.value for m in ns}:
            raise UnknownBuiltinError(f"{node.namespace}.{node.member}")
        return node
    if isinstance(node, Var):
        if node.name in env:
            return node
        if node.name in BUILTINS:
            if _builtin_arity(BUILTINS[node.name]) == 0:
                return Call(node.name, ())  # bare nullary global, e.g. all_boxes
            return node  # bare predicate reference, e.g. is_bottom
        raise UnboundVariableError(node.name)
    if isinstance(node, Call):
        if node.name not in BUILTINS:
            if node.name in env:
                raise TypeMismatchError(node.name, "a builtin", "a lambda variable")
            raise UnknownBuiltinError(node.name)
        want = _builtin_arity(BUILTINS[node.name])
        if len(node.args) != want:
            raise ArityMismatchError(node.name, want, len(node.args))
        return Call(node.name, tuple(_bind(a, env) for a in node.args))
    if isinstance(node, MethodCall):
        if node.name not in METHODS:
            raise UnknownBuiltinError(node.name)
        if node.args:
            raise ArityMismatchError(node.name, 0, len(node.args))
        return MethodCall(_bind(node.receiver, env), node.name, ())
    if isinstance(node, Lambda):
        return Lambda(node.param, _bind(node.body, env | {node.param}))
    if isinstance(node, Compare):
        return Compare(node.op, _bind(node.lhs, env), _bind(node.rhs, env))
    if isinstance(node, And):
        return And(_bind(node.lhs, env), _bind(node.rhs, env))
    if isinstance(node, Or):
        return Or(_bind(node.lhs, env), _bind(node.rhs, env))
    if isinstance(node, Not):
        return Not(_bind(node.operand, env))
    raise TypeError(f"unexpected node {node!r}")


def parse(text: str):
    """Source -> bound AST.  Raises ProgramSyntaxError, UnboundVariableError,
    UnknownBuiltinError, or ArityMismatchError."""
    parser = _Parser(_tokenize(text))
    node = parser.expr()
    parser.expect("eof")
    return _bind(node, frozenset())


# ---------------------------------------------------------------------------
# kind checking

def _check(node, env: dict) -> Kind:
    if isinstance(node, IntLit):
        return Kind.INT
    if isinstance(node, BoolLit):
        return Kind.BOOL
    if isinstance(node, EnumLit):
        return _ENUM_KIND[node.namespace]
    if isinstance(node, Var):
        if node.name in env:
            return env[node.name]
        return Kind.PRED  # bare builtin predicate (bound pass vetted it)
    if isinstance(node, Lambda):
        raise TypeMismatchError("lambda", "a filter_obj argument position", "elsewhere")
    if isinstance(node, Call):
        return _check_call(node, env)
    if isinstance(node, MethodCall):
        recv_kind, result, _ = METHODS[node.name]
        got = _check(node.receiver, env)
        if got is not recv_kind:
            raise TypeMismatchError(f".{node.name}()", recv_kind.value, got.value)
        return result
    if isinstance(node, Compare):
        lk, rk = _check(node.lhs, env), _check(node.rhs, env)
        if node.op in ("==", "!="):
            if lk is not rk or lk not in EQ_KINDS:
                raise TypeMismatchError(node.op, "matching comparable kinds",
                                        f"{lk.value} vs {rk.value}")
        else:
            if lk is not Kind.INT or rk is not Kind.INT:
                raise TypeMismatchError(node.op, "int", f"{lk.value} vs {rk.value}")
        return Kind.BOOL
    if isinstance(node, (And, Or)):
        for side in (node.lhs, node.rhs):
            got = _check(side, env)
            if got is not Kind.BOOL:
                raise TypeMismatchError("and/or", "bool", got.value)
        return Kind.BOOL
    if isinstance(node, Not):
        got = _check(node.operand, env)
        if got is not Kind.BOOL:
            raise TypeMismatchError("not", "bool", got.value)
        return Kind.BOOL
    raise TypeError(f"unexpected node {node!r}")


def _check_call(node: Call, env: dict) -> Kind:
    b = BUILTINS[node.name]
    if node.name == "filter_obj":
        set_kind = _check(node.args[0], env)
        if set_kind not in ELEMENT_KIND:
            raise TypeMismatchError("filter_obj", "a set of objects or boxes",
                                    set_kind.value)
        elem = ELEMENT_KIND[set_kind]
        pred = node.args[1]
        if isinstance(pred, Lambda):
            body_kind = _check(pred.body, {**env, pred.param: elem})
            if body_kind is not Kind.BOOL:
                raise TypeMismatchError("filter_obj predicate", "bool", body_kind.value)
        elif isinstance(pred, Var) and pred.name not in env:
            ref = BUILTINS[pred.name]
            if ref.arg_kinds != (elem,) or ref.result is not Kind.BOOL:
                raise TypeMismatchError("filter_obj predicate",
                                        f"{elem.value} -> bool", pred.name)
        else:
            got = _check(pred, env)
            raise TypeMismatchError("filter_obj predicate", "a predicate", got.value)
        return set_kind
    if node.name in ("exist", "count", "unique"):
        got = _check(node.args[0], env)
        if got not in SET_KINDS:
            raise TypeMismatchError(node.name, "a set", got.value)
        return Kind.INT if node.name == "count" else Kind.BOOL
    kinds = [_check(a, env) for a in node.args]
    for want, got in zip(b.arg_kinds, kinds):
        if got is not want:
            raise TypeMismatchError(node.name, want.value, got.value)
    return b.result


def kind_check(ast) -> None:
    """Static pass: every node is well-kinded and the root is boolean."""
    root = _check(ast, {})
    if root is not Kind.BOOL:
        raise TypeMismatchError("program root", "bool", root.value)


def compile_program(text: str):
    """parse + kind_check in one step; the form dataset loading uses."""
    ast = parse(text)
    kind_check(ast)
    return ast


# ---------------------------------------------------------------------------
# evaluation

@dataclass
class _ClosureVal:
    param: str
    body: object
    env: dict  # captured environment


@dataclass(frozen=True)
class _BuiltinPredVal:
    name: str


def _eval(node, ctx: EvalContext, env: dict):
    if isinstance(node, IntLit):
        return node.value
    if isinstance(node, BoolLit):
        return node.value
    if isinstance(node, EnumLit):
        return ENUM_NAMESPACES[node.namespace][node.member.upper()]
    if isinstance(node, Var):
        if node.name in env:
            return env[node.name]
        return _BuiltinPredVal(node.name)
    if isinstance(node, Lambda):
        return _ClosureVal(node.param, node.body, dict(env))
    if isinstance(node, Call):
        args = [_eval(a, ctx, env) for a in node.args]
        return BUILTINS[node.name].fn(ctx, *args)
    if isinstance(node, MethodCall):
        recv_kind, _, fn = METHODS[node.name]
        recv = _eval(node.receiver, ctx, env)
        if recv_kind is Kind.BOX and not isinstance(recv, BoxVal):
            raise TypeMismatchError(f".{node.name}()", "box", type(recv).__name__)
        return fn(ctx, recv)
    if isinstance(node, Compare):
        lhs = _eval(node.lhs, ctx, env)
        rhs = _eval(node.rhs, ctx, env)
        if node.op == "==":
            return lhs == rhs
        if node.op == "!=":
            return lhs != rhs
        if not isinstance(lhs, int) or not isinstance(rhs, int):
            raise TypeMismatchError(node.op, "int", f"{type(lhs).__name__}")
        return {"<": lhs < rhs, "<=": lhs <= rhs,
                ">": lhs > rhs, ">=": lhs >= rhs}[node.op]
    if isinstance(node, And):
        return _eval(node.lhs, ctx, env) and _eval(node.rhs, ctx, env)
    if isinstance(node, Or):
        return _eval(node.lhs, ctx, env) or _eval(node.rhs, ctx, env)
    if isinstance(node, Not):
        return not _eval(node.operand, ctx, env)
    raise TypeError(f"unexpected node {node!r}")


def evaluate(ast, scene: Scene, near_range=NEARLY_TOUCHING_RANGE) -> bool:
    """E(scene): pure, deterministic, total on kind-checked programs."""
    out = _eval(ast, EvalContext(scene, near_range), {})
    if not isinstance(out, bool):
        raise TypeMismatchError("program root", "bool", type(out).__name__)
    return out


# ---------------------------------------------------------------------------
# pretty printer

_LEVEL_LAMBDA, _LEVEL_OR, _LEVEL_AND, _LEVEL_NOT, _LEVEL_CMP, _LEVEL_PRIMARY = range(6)


def _pp(node, floor: int) -> str:
    if isinstance(node, IntLit):
        return str(node.value)
    if isinstance(node, BoolLit):
        return "True" if node.value else "False"
    if isinstance(node, EnumLit):
        return f"{node.namespace}.{node.member}"
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        if not node.args:
            return node.name  # nullary globals print bare
        inner = ", ".join(_pp(a, _LEVEL_LAMBDA) for a in node.args)
        return f"{node.name}({inner})"
    if isinstance(node, MethodCall):
        return f"{_pp(node.receiver, _LEVEL_PRIMARY)}.{node.name}()"
    if isinstance(node, Lambda):
        text = f"lambda {node.param}: {_pp(node.body, _LEVEL_LAMBDA)}"
        return f"({text})" if floor > _LEVEL_LAMBDA else text
    if isinstance(node, Compare):
        text = f"{_pp(node.lhs, _LEVEL_PRIMARY)} {node.op} {_pp(node.rhs, _LEVEL_PRIMARY)}"
        return f"({text})" if floor > _LEVEL_CMP else text
    if isinstance(node, Or):
        text = f"{_pp(node.lhs, _LEVEL_OR)} or {_pp(node.rhs, _LEVEL_AND)}"
        return f"({text})" if floor > _LEVEL_OR else text
    if isinstance(node, And):
        text = f"{_pp(node.lhs, _LEVEL_AND)} and {_pp(node.rhs, _LEVEL_NOT)}"
        return f"({text})" if floor > _LEVEL_AND else text
    if isinstance(node, Not):
        return f"not {_pp(node.operand, _LEVEL_NOT)}"
    raise TypeError(f"unexpected node {node!r}")


def pretty(ast) -> str:
    """Source form that reparses to a structurally equal AST."""
    return _pp(ast, _LEVEL_LAMBDA)
