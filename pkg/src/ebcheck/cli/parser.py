"""Line-oriented problem-file grammar.

::

    # comment
    option seed = 3
    set A = halfspaces([[1, 0], [0, 1]], [0, 0])
    set B = ball([0, 0], 1)
    set C = union(A, B)
    map P = components(affine([1, 0], 0), quadratic([[1, 0], [0, 1]], [0, 1], 0))
    func objective = max(affine([1, 0], 0), dist(C))
    analyze modulus with xbar=[0, 0] levels=6
    analyze builtin remark31

Declarations are parsed into small expression trees (kept for printing
and round trips) and built into objects immediately, so undefined names and
dimension mismatches surface as parse errors with a line and column.
"""
import re
from dataclasses import dataclass, field

import numpy as np

from .. import functions as fn
from .. import geometry as geo
from ..epigraph import StepFunction1D
from ..exceptions import EBError, ProblemParseError

COMMANDS = (
    "modulus", "certify31", "certify32", "certify33", "certify34", "equiv35", "lemma25", "ineq411",
    "ratios", "hoffman",
)

_TOKEN = re.compile(
    r"\s*(?:(?P<num>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?|[-+]?inf)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_\-]*)|(?P<punct>[\[\](),=]))"
)


# ---------------------------------------------------------------------------
# syntax tree


@dataclass
class Num:
    value: float
    col: int = field(default=0, compare=False)


@dataclass
class Name:
    name: str
    col: int = field(default=0, compare=False)


@dataclass
class ListExpr:
    items: list
    col: int = field(default=0, compare=False)


@dataclass
class Call:
    name: str
    args: list
    col: int = field(default=0, compare=False)


@dataclass
class Declaration:
    kind: str
    name: str
    expr: object
    line: int = field(default=0, compare=False)


@dataclass
class Analysis:
    command: str
    params: dict
    line: int = field(default=0, compare=False)


@dataclass
class ProblemFile:
    declarations: list = field(default_factory=list)
    analyses: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    objects: dict = field(default_factory=dict, compare=False, repr=False)

    def lookup(self, name):
        return self.objects[name][1]


def format_expr(e):
    if isinstance(e, Num):
        return repr(float(e.value))
    if isinstance(e, Name):
        return e.name
    if isinstance(e, ListExpr):
        return "[" + ", ".join(format_expr(i) for i in e.items) + "]"
    return f"{e.name}(" + ", ".join(format_expr(a) for a in e.args) + ")"


def format_problem(pf):
    """Canonical text of a parsed problem; parsing it again gives an equal file."""
    lines = [f"option {k} = {format_expr(v)}" for k, v in pf.metadata.items()]
    lines += [f"{d.kind} {d.name} = {format_expr(d.expr)}" for d in pf.declarations]
    for a in pf.analyses:
        params = " ".join(f"{k}={format_expr(v)}" for k, v in a.params.items())
        lines.append(f"analyze {a.command}" + (f" with {params}" if params else ""))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# tokenizer and expression parser


class _Tokens:
    def __init__(self, text, line):
        self.line = line
        self.toks = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                col = pos + 1 + (len(text[pos:]) - len(text[pos:].lstrip()))
                raise ProblemParseError(f"unexpected character {text[col - 1]!r}", line, col)
            kind = m.lastgroup
            start = m.start(kind)
            self.toks.append((kind, m.group(kind), start + 1))
            pos = m.end()
        self.i = 0
        self.end_col = len(text) + 1

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, self.end_col)

    def next(self):
        tok = self.peek()
        if tok[0] is None:
            raise ProblemParseError("unexpected end of line", self.line, tok[2])
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, col = self.peek()
        if val != value:
            found = "end of line" if kind is None else repr(val)
            raise ProblemParseError(f"expected {value!r}, found {found}", self.line, col)
        return self.next()

    def ident(self, what="identifier"):
        kind, val, col = self.peek()
        if kind != "ident":
            raise ProblemParseError(f"expected {what}", self.line, col)
        self.next()
        return val, col

    def done(self):
        return self.i >= len(self.toks)


def _parse_expr(t):
    kind, val, col = t.peek()
    if kind == "num":
        t.next()
        return Num(float(val), col)
    if val == "[":
        t.next()
        items = []
        if t.peek()[1] != "]":
            items.append(_parse_expr(t))
            while t.peek()[1] == ",":
                t.next()
                items.append(_parse_expr(t))
        t.expect("]")
        return ListExpr(items, col)
    if kind == "ident":
        t.next()
        if t.peek()[1] == "(":
            t.next()
            args = []
            if t.peek()[1] != ")":
                args.append(_parse_expr(t))
                while t.peek()[1] == ",":
                    t.next()
                    args.append(_parse_expr(t))
            t.expect(")")
            return Call(val, args, col)
        return Name(val, col)
    found = "end of line" if kind is None else repr(val)
    raise ProblemParseError(f"expected an expression, found {found}", t.line, col)


# ---------------------------------------------------------------------------
# building objects


def literal(e, line):
    """Numeric value of a literal expression (number or nested list)."""
    if isinstance(e, Num):
        return e.value
    if isinstance(e, ListExpr):
        return [literal(i, line) for i in e.items]
    raise ProblemParseError("expected a numeric literal", line, e.col)


def _array(e, line, ndim):
    arr = np.asarray(literal(e, line), dtype=float)
    if arr.ndim != ndim:
        raise ProblemParseError(f"expected a {ndim}-D numeric array", line, e.col)
    return arr


def _arity(e, line, *counts):
    if len(e.args) not in counts:
        want = " or ".join(str(c) for c in counts)
        raise ProblemParseError(f"{e.name} expects {want} argument(s), got {len(e.args)}", line, e.col)


class _Builder:
    def __init__(self, pf, line):
        self.pf = pf
        self.line = line

    def ref(self, e, kind):
        if not isinstance(e, Name):
            return None
        if e.name not in self.pf.objects:
            raise ProblemParseError(f"undefined identifier {e.name!r}", self.line, e.col)
        k, obj = self.pf.objects[e.name]
        if k != kind:
            raise ProblemParseError(f"{e.name!r} is a {k}, expected a {kind}", self.line, e.col)
        return obj

    def set(self, e):
        obj = self.ref(e, "set")
        if obj is not None:
            return obj
        if not isinstance(e, Call):
            raise ProblemParseError("expected a set expression", self.line, e.col)
        ln = self.line
        if e.name == "halfspaces":
            _arity(e, ln, 2)
            return geo.HalfspaceSystem(_array(e.args[0], ln, 2), _array(e.args[1], ln, 1))
        if e.name == "ball":
            _arity(e, ln, 2)
            return geo.Ball(_array(e.args[0], ln, 1), literal(e.args[1], ln))
        if e.name == "singleton":
            _arity(e, ln, 1)
            return geo.Singleton(_array(e.args[0], ln, 1))
        if e.name in ("union", "intersect"):
            if not e.args:
                raise ProblemParseError(f"{e.name} needs at least one set", ln, e.col)
            children = [self.set(a) for a in e.args]
            return geo.Union(children) if e.name == "union" else geo.Intersection(children)
        raise ProblemParseError(f"unknown set constructor {e.name!r}", ln, e.col)

    def func(self, e):
        obj = self.ref(e, "func")
        if obj is not None:
            return obj
        if not isinstance(e, Call):
            raise ProblemParseError("expected a function expression", self.line, e.col)
        ln = self.line
        if e.name == "affine":
            _arity(e, ln, 2)
            return fn.Affine(_array(e.args[0], ln, 1), literal(e.args[1], ln))
        if e.name == "quadratic":
            _arity(e, ln, 3)
            return fn.Quadratic(_array(e.args[0], ln, 2), _array(e.args[1], ln, 1), literal(e.args[2], ln))
        if e.name in ("max", "min"):
            if not e.args:
                raise ProblemParseError(f"{e.name} needs at least one function", ln, e.col)
            pieces = [self.func(a) for a in e.args]
            return fn.Max(pieces) if e.name == "max" else fn.Min(pieces)
        if e.name == "dist":
            _arity(e, ln, 1)
            return fn.DistTo(self.set(e.args[0]))
        if e.name == "norm":
            _arity(e, ln, 2)
            return fn.NormScaled(literal(e.args[0], ln), int(literal(e.args[1], ln)))
        if e.name == "compose":
            _arity(e, ln, 2)
            return fn.ComposeConvexSmooth(self.func(e.args[0]), self.map(e.args[1]))
        if e.name == "step":
            _arity(e, ln, 3)
            return StepFunction1D(*(literal(a, ln) for a in e.args))
        raise ProblemParseError(f"unknown function constructor {e.name!r}", ln, e.col)

    def map(self, e):
        obj = self.ref(e, "map")
        if obj is not None:
            return obj
        if not (isinstance(e, Call) and e.name == "components"):
            raise ProblemParseError("expected components(...)", self.line, e.col)
        parts = [self.func(a) for a in e.args]
        for a, p in zip(e.args, parts):
            if not isinstance(p, (fn.Affine, fn.Quadratic)):
                raise ProblemParseError("map components must be affine or quadratic", self.line, a.col)
        return fn.SmoothMap(parts)


# ---------------------------------------------------------------------------
# statements


def _parse_line(pf, raw, lineno, builtins, seen_builtins):
    text = raw.split("#", 1)[0]
    if not text.strip():
        return
    t = _Tokens(text, lineno)
    keyword, col = t.ident("a statement keyword")
    if keyword in ("set", "map", "func"):
        name, ncol = t.ident("a name")
        if name in pf.objects:
            raise ProblemParseError(f"{name!r} is already declared", lineno, ncol)
        t.expect("=")
        expr = _parse_expr(t)
        if not t.done():
            raise ProblemParseError("unexpected trailing input", lineno, t.peek()[2])
        try:
            obj = getattr(_Builder(pf, lineno), keyword)(expr)
        except ProblemParseError:
            raise
        except (EBError, ValueError, TypeError) as exc:
            raise ProblemParseError(str(exc), lineno, expr.col) from exc
        pf.objects[name] = (keyword, obj)
        pf.declarations.append(Declaration(keyword, name, expr, lineno))
        return
    if keyword == "option":
        key, _ = t.ident("an option name")
        t.expect("=")
        pf.metadata[key] = _parse_expr(t)
        return
    if keyword != "analyze":
        raise ProblemParseError(f"unknown statement {keyword!r}", lineno, col)
    command, ccol = t.ident("an analysis command")
    if command == "builtin":
        case, bcol = t.ident("a builtin case name")
        if case not in builtins:
            raise ProblemParseError(f"unknown builtin case {case!r}", lineno, bcol)
        if case in seen_builtins:
            raise ProblemParseError(f"builtin {case!r} expanded twice", lineno, bcol)
        seen_builtins.add(case)
        _parse_into(pf, builtins[case](), builtins, seen_builtins)
        return
    if command not in COMMANDS:
        raise ProblemParseError(f"unknown analysis {command!r}", lineno, ccol)
    params = {}
    if not t.done():
        kw, wcol = t.ident("'with'")
        if kw != "with":
            raise ProblemParseError("expected 'with'", lineno, wcol)
        while not t.done():
            key, _ = t.ident("a parameter name")
            t.expect("=")
            params[key] = _parse_expr(t)
    if command in ("certify34", "equiv35"):
        required = (("g", "func"), ("map", "map"))
    else:
        required = (("objective", "func"),)
    for key, kind in required:
        ref = params.get(key, Name(key))
        if not isinstance(ref, Name) or pf.objects.get(ref.name, (None,))[0] != kind:
            raise ProblemParseError(f"{command} needs a declared {kind} for {key!r}, got {format_expr(ref)!r}",
                                    lineno, getattr(ref, "col", ccol) or ccol)
    pf.analyses.append(Analysis(command, params, lineno))


def _parse_into(pf, text, builtins, seen):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        _parse_line(pf, raw, lineno, builtins, seen)


def parse(text):
    """Parse problem text into a :class:`ProblemFile` (fatal on any error)."""
    from .builtins import BUILTIN_CASES

    pf = ProblemFile()
    _parse_into(pf, text, BUILTIN_CASES, set())
    return pf
