"""Quantitative modal logic over labelled Markov chains.

Formulas are interpreted exactly into ``[0, 1]``::

    a          1 on states labelled a, else 0
    O φ        expectation of φ over the successor distribution
    !φ         1 - φ
    φ - q      max(0, φ - q)
    φ + q      min(1, φ + q)
    φ | ψ      max
    φ & ψ      min
    false      0

The last three are definable from the others; they are kept as first-class
nodes so that constructed formulas stay readable.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Union

from .errors import ParseError
from .model import Lmc, StateId, expected_value, format_rational, parse_rational

ZERO = Fraction(0)
ONE = Fraction(1)


class Formula:
    __slots__ = ()

    def children(self) -> tuple["Formula", ...]:
        return ()


@dataclass(frozen=True)
class Atom(Formula):
    label: str

    def __post_init__(self):
        if not isinstance(self.label, str) or not self.label:
            raise ValueError("atom label must be a non-empty string")


@dataclass(frozen=True)
class FalseFormula(Formula):
    pass


FALSE = FalseFormula()


@dataclass(frozen=True)
class Next(Formula):
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula

    def children(self):
        return (self.sub,)


def _check_q(q):
    q = Fraction(q)
    if not 0 <= q <= 1:
        raise ValueError(f"constant {format_rational(q)} outside [0, 1]")
    return q


@dataclass(frozen=True)
class Minus(Formula):
    sub: Formula
    q: Fraction

    def __post_init__(self):
        object.__setattr__(self, "q", _check_q(self.q))

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class Plus(Formula):
    sub: Formula
    q: Fraction

    def __post_init__(self):
        object.__setattr__(self, "q", _check_q(self.q))

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


def const(q) -> Formula:
    """Formula with constant interpretation ``q``."""
    q = Fraction(q)
    return FALSE if q == 0 else Plus(FALSE, q)


def big_or(items: list[Formula]) -> Formula:
    """Right-nested disjunction; empty means ``false``."""
    if not items:
        return FALSE
    out = items[-1]
    for f in reversed(items[:-1]):
        out = Or(f, out)
    return out


def big_and(items: list[Formula]) -> Formula:
    if not items:
        return const(ONE)
    out = items[-1]
    for f in reversed(items[:-1]):
        out = And(f, out)
    return out


# ---------------------------------------------------------------- semantics


class Evaluator:
    """Exact interpretation with a per-(node, state) cache.

    The cache is keyed by node identity, so formulas that share subterms are
    evaluated once per state.  Not meant to be shared between threads.
    """

    def __init__(self, lmc: Lmc):
        self.lmc = lmc
        self._memo: dict[tuple[int, StateId], Fraction] = {}
        self._keep: list[Formula] = []

    def __call__(self, f: Formula, s: StateId) -> Fraction:
        key = (id(f), s)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        value = self._eval(f, s)
        assert 0 <= value <= 1, f"interpretation {value} outside [0, 1]"
        self._memo[key] = value
        self._keep.append(f)
        return value

    def _eval(self, f, s):
        if isinstance(f, Atom):
            return ONE if self.lmc.label(s) == f.label else ZERO
        if isinstance(f, FalseFormula):
            return ZERO
        if isinstance(f, Next):
            mu = self.lmc.step(s)
            return expected_value(mu, {z: self(f.sub, z) for z in mu})
        if isinstance(f, Not):
            return ONE - self(f.sub, s)
        if isinstance(f, Minus):
            return max(ZERO, self(f.sub, s) - f.q)
        if isinstance(f, Plus):
            return min(ONE, self(f.sub, s) + f.q)
        if isinstance(f, Or):
            return max(self(f.left, s), self(f.right, s))
        if isinstance(f, And):
            return min(self(f.left, s), self(f.right, s))
        raise TypeError(f"not a formula: {f!r}")


def interp(lmc: Lmc, f: Formula, s: StateId) -> Fraction:
    lmc.require_state(s)
    return Evaluator(lmc)(f, s)


def modal_depth(f: Formula) -> int:
    memo: dict[int, int] = {}

    def depth(g):
        key = id(g)
        if key not in memo:
            inner = max((depth(c) for c in g.children()), default=0)
            memo[key] = inner + 1 if isinstance(g, Next) else inner
        return memo[key]

    return depth(f)


def size(f: Formula) -> int:
    """Number of AST nodes, shared subterms counted at each occurrence."""
    memo: dict[int, int] = {}

    def count(g):
        key = id(g)
        if key not in memo:
            memo[key] = 1 + sum(count(c) for c in g.children())
        return memo[key]

    return count(f)


# ---------------------------------------------------------------- simplify


def _is_const(f: Formula) -> Fraction | None:
    if isinstance(f, FalseFormula):
        return ZERO
    if isinstance(f, Plus) and isinstance(f.sub, FalseFormula):
        return f.q
    return None


def _rewrite(f: Formula) -> Formula | None:
    """One local interpretation-preserving rewrite at the root, or None."""
    if isinstance(f, (Minus, Plus)) and f.q == 0:
        return f.sub
    if isinstance(f, Not):
        if isinstance(f.sub, Not):
            return f.sub.sub
        c = _is_const(f.sub)
        if c is not None:
            return const(ONE - c)
    if isinstance(f, Next) and _is_const(f.sub) is not None:
        return f.sub
    if isinstance(f, Minus):
        c = _is_const(f.sub)
        if c is not None:
            return const(max(ZERO, c - f.q))
        if isinstance(f.sub, Minus):
            total = f.sub.q + f.q
            return Minus(f.sub.sub, total) if total <= 1 else FALSE
    if isinstance(f, Plus) and isinstance(f.sub, Plus) and not isinstance(f.sub.sub, FalseFormula):
        total = f.sub.q + f.q
        return Plus(f.sub.sub, total) if total <= 1 else const(ONE)
    if isinstance(f, (Or, And)):
        if f.left == f.right:
            return f.left
        if type(f.right) is type(f) and f.right.left == f.left:
            return f.right
        cl, cr = _is_const(f.left), _is_const(f.right)
        if cl is not None and cr is not None:
            return const(max(cl, cr) if isinstance(f, Or) else min(cl, cr))
        if isinstance(f, Or):
            if cl == 0:
                return f.right
            if cr == 0:
                return f.left
            if cl == 1 or cr == 1:
                return const(ONE)
        else:
            if cl == 1:
                return f.right
            if cr == 1:
                return f.left
            if cl == 0 or cr == 0:
                return FALSE
    return None


def _rebuild(f: Formula, kids: tuple[Formula, ...]) -> Formula:
    if kids == f.children() and all(a is b for a, b in zip(kids, f.children())):
        return f
    if isinstance(f, (Next, Not)):
        return type(f)(kids[0])
    if isinstance(f, (Minus, Plus)):
        return type(f)(kids[0], f.q)
    return type(f)(kids[0], kids[1])


def simplify(f: Formula) -> Formula:
    """Apply local rewrites bottom-up until nothing changes.

    Every rule preserves the interpretation at every state of every chain;
    constants are normalised to ``false`` or ``false + q``.
    """
    memo: dict[int, Formula] = {}
    keep: list[Formula] = []

    def go(g):
        key = id(g)
        if key in memo:
            return memo[key]
        out = _rebuild(g, tuple(go(c) for c in g.children()))
        # rewrites only reassemble already-simplified parts, so retrying at
        # the root is enough to reach a normal form
        while (nxt := _rewrite(out)) is not None:
            out = nxt
        memo[key] = out
        keep.append(g)
        return out

    return go(f)


# ------------------------------------------------------------ text syntax

_TOKEN_RE = re.compile(
    r"""\s*(?:
        (?P<num>\d+)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<str>"(?:[^"\\]|\\.)*")
      | (?P<op>[()!|&+\-/])
    )""",
    re.VERBOSE,
)
_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_KEYWORDS = {"O", "false"}


def _tokenize(text: str):
    pos = 0
    out = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        value = m.group(kind)
        if kind == "ident" and value in _KEYWORDS:
            kind = value
        elif kind == "str":
            kind, value = "ident", json.loads(value)
            if not value:
                raise ParseError("empty label", start)
        out.append((kind, value, start))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, value, pos = self.take()
        if kind != "op" or value != op:
            raise ParseError(f"expected {op!r}, got {value or 'end of input'!r}", pos)

    def formula(self):
        left = self.conj()
        kind, value, _ = self.peek()
        if kind == "op" and value == "|":
            self.take()
            return Or(left, self.formula())
        return left

    def conj(self):
        left = self.postfix()
        kind, value, _ = self.peek()
        if kind == "op" and value == "&":
            self.take()
            return And(left, self.conj())
        return left

    def postfix(self):
        f = self.unary()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.take()
                q = self.constant()
                f = Minus(f, q) if value == "-" else Plus(f, q)
            else:
                return f

    def constant(self):
        kind, value, pos = self.take()
        if kind != "num":
            raise ParseError(f"expected a rational constant, got {value or 'end of input'!r}", pos)
        text = value
        nk, nv, _ = self.peek()
        if nk == "op" and nv == "/":
            self.take()
            dk, dv, dpos = self.take()
            if dk != "num":
                raise ParseError("expected a denominator", dpos)
            text = f"{value}/{dv}"
        q = parse_rational(text)
        if not 0 <= q <= 1:
            raise ParseError(f"constant {text} outside [0, 1]", pos)
        return q

    def unary(self):
        kind, value, pos = self.take()
        if kind == "O":
            return Next(self.unary())
        if kind == "op" and value == "!":
            return Not(self.unary())
        if kind == "false":
            return FALSE
        if kind == "ident":
            return Atom(value)
        if kind == "op" and value == "(":
            f = self.formula()
            self.expect_op(")")
            return f
        raise ParseError(f"unexpected {value or 'end of input'!r}", pos)


def parse_formula(text: str | bytes) -> Formula:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    p = _Parser(text)
    f = p.formula()
    kind, value, pos = p.peek()
    if kind != "eof":
        raise ParseError(f"trailing input {value!r}", pos)
    return f


def _label_text(label: str) -> str:
    if _IDENT_RE.match(label) and label not in _KEYWORDS:
        return label
    return json.dumps(label, ensure_ascii=False)


_PREC = {Or: 1, And: 2, Minus: 3, Plus: 3, Next: 4, Not: 4}


def render_formula(f: Formula, compact: bool = False) -> str:
    """Text form accepted by :func:`parse_formula`.

    The default wraps every binary and postfix node in parentheses; ``compact``
    only adds the ones precedence requires.
    """
    memo: dict[tuple[int, int], str] = {}

    def prec(g):
        return _PREC.get(type(g), 5)

    def r(g, need=0):
        key = (id(g), need)
        if key in memo:
            return memo[key]
        if isinstance(g, Atom):
            s = _label_text(g.label)
        elif isinstance(g, FalseFormula):
            s = "false"
        elif isinstance(g, Next):
            s = "O " + r(g.sub, 4)
        elif isinstance(g, Not):
            s = "!" + r(g.sub, 4)
        elif isinstance(g, (Minus, Plus)):
            op = "-" if isinstance(g, Minus) else "+"
            s = f"{r(g.sub, 3)} {op} {format_rational(g.q)}"
        else:
            op = "|" if isinstance(g, Or) else "&"
            mine = prec(g)
            s = f"{r(g.left, mine + 1)} {op} {r(g.right, mine)}"
        wrap = prec(g) < need if compact else isinstance(g, (Minus, Plus, Or, And))
        if wrap:
            s = f"({s})"
        memo[key] = s
        return s

    return r(f)


# -------------------------------------------------------------------- JSON


def formula_to_json(f: Formula) -> dict[str, Any]:
    if isinstance(f, Atom):
        return {"op": "atom", "label": f.label}
    if isinstance(f, FalseFormula):
        return {"op": "false"}
    if isinstance(f, (Next, Not)):
        return {"op": "next" if isinstance(f, Next) else "not", "sub": formula_to_json(f.sub)}
    if isinstance(f, (Minus, Plus)):
        return {
            "op": "minus" if isinstance(f, Minus) else "plus",
            "sub": formula_to_json(f.sub),
            "q": format_rational(f.q),
        }
    return {
        "op": "or" if isinstance(f, Or) else "and",
        "left": formula_to_json(f.left),
        "right": formula_to_json(f.right),
    }


def formula_from_json(data: Any) -> Formula:
    if not isinstance(data, dict):
        raise ParseError("formula JSON must be an object")
    op = data.get("op")
    try:
        if op == "atom":
            return Atom(data["label"])
        if op == "false":
            return FALSE
        if op == "next":
            return Next(formula_from_json(data["sub"]))
        if op == "not":
            return Not(formula_from_json(data["sub"]))
        if op in ("minus", "plus"):
            cls = Minus if op == "minus" else Plus
            return cls(formula_from_json(data["sub"]), parse_rational(data["q"]))
        if op in ("or", "and"):
            cls = Or if op == "or" else And
            return cls(formula_from_json(data["left"]), formula_from_json(data["right"]))
    except KeyError as exc:
        raise ParseError(f"formula JSON node {op!r} missing {exc.args[0]!r}") from None
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    raise ParseError(f"unknown formula op {op!r}")


FormulaLike = Union[Formula, str]
