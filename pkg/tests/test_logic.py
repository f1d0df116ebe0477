import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lmcapart.errors import ParseError, UnknownState
from lmcapart.logic import (
    FALSE,
    And,
    Atom,
    Evaluator,
    Minus,
    Next,
    Not,
    Or,
    Plus,
    formula_from_json,
    formula_to_json,
    interp,
    modal_depth,
    parse_formula,
    render_formula,
    simplify,
    size,
)

from .support import FIXTURE_NAMES, fixture_lmc, formulas, small_lmcs

F = Fraction
a, b = Atom("a"), Atom("b")


def nexts(f, i):
    for _ in range(i):
        f = Next(f)
    return f


@pytest.mark.parametrize("i", range(4))
def test_noform_next_b(noform, i):
    assert interp(noform, nexts(b, i), "x1") == 1
    assert interp(noform, nexts(b, i), "y") == 0


def test_noform_next_b_at_x(noform):
    assert [interp(noform, nexts(b, i), "x") for i in range(4)] == [0, F(1, 2), F(3, 4), F(7, 8)]


def test_random_walk_two_steps(walk):
    assert interp(walk, nexts(b, 2), 2) == F(1, 4)
    assert interp(walk, nexts(b, 2), 3) == 0


def test_connectives(ex2):
    ev = Evaluator(ex2)
    assert ev(Minus(Next(a), F(1, 4)), "x") == F(1, 4)
    assert ev(Minus(Next(a), F(3, 4)), "x") == 0
    assert ev(Plus(Next(a), F(3, 4)), "x") == 1
    assert ev(Or(Next(a), Next(b)), "y") == F(3, 5)
    assert ev(And(Next(a), Next(b)), "y") == F(2, 5)
    assert ev(FALSE, "x") == 0


def test_interp_unknown_state(ex2):
    with pytest.raises(UnknownState):
        interp(ex2, a, "nope")


@settings(max_examples=100, deadline=None)
@given(formulas())
def test_complement_and_range(f):
    lmc = fixture_lmc("ex2")
    ev = Evaluator(lmc)
    for s in lmc.states():
        v = ev(f, s)
        assert 0 <= v <= 1
        assert ev(Not(f), s) + v == 1


def test_modal_depth():
    assert modal_depth(a) == 0
    assert modal_depth(Next(Next(b))) == 2
    assert modal_depth(Or(Next(a), Minus(Next(Next(b)), F(1, 2)))) == 2


def test_constants_validated():
    with pytest.raises(ValueError):
        Minus(a, F(3, 2))
    with pytest.raises(ValueError):
        Plus(a, F(-1, 2))


# -------------------------------------------------------------------- syntax


def test_parse_basic():
    assert parse_formula("O O b") == Next(Next(b))
    assert parse_formula("(O b & (false + 1/2))") == And(Next(b), Plus(FALSE, F(1, 2)))
    assert parse_formula(b"!a") == Not(a)


def test_precedence():
    assert parse_formula("a | b & a") == Or(a, And(b, a))
    assert parse_formula("O a - 1/2") == Minus(Next(a), F(1, 2))
    assert parse_formula("!a + 1 - 0") == Minus(Plus(Not(a), F(1)), F(0))
    assert parse_formula("a & b & a") == And(a, And(b, a))
    assert parse_formula("a | b | a") == Or(a, Or(b, a))


def test_quoted_labels():
    f = parse_formula('O "label with spaces" | "O"')
    assert f == Or(Next(Atom("label with spaces")), Atom("O"))
    assert parse_formula(render_formula(f)) == f


@pytest.mark.parametrize(
    "text, pos",
    [("b - 3/2", 4), ("(a | b", 6), ("a b", 2), ("a - x", 4), ("O", 1), ("a # b", 2), ("a - 1/", 6)],
)
def test_parse_errors(text, pos):
    with pytest.raises(ParseError) as exc:
        parse_formula(text)
    assert exc.value.position == pos


def test_render_modes():
    f = And(Next(b), Plus(FALSE, F(1, 2)))
    assert render_formula(f) == "(O b & (false + 1/2))"
    assert render_formula(f, compact=True) == "O b & false + 1/2"
    g = And(Or(a, b), Or(a, b))
    assert render_formula(g, compact=True) == "(a | b) & (a | b)"
    assert render_formula(Or(Or(a, b), a), compact=True) == "(a | b) | a"


@settings(max_examples=200, deadline=None)
@given(formulas(labels=("a", "b", "false_ish", "O2")), st.booleans())
def test_render_parse_round_trip(f, compact):
    text = render_formula(f, compact=compact)
    assert parse_formula(text) == f
    assert render_formula(parse_formula(" ".join(text.split(" "))), compact=compact) == text


@settings(max_examples=200, deadline=None)
@given(formulas())
def test_json_round_trip(f):
    data = json.loads(json.dumps(formula_to_json(f)))
    assert formula_from_json(data) == f


@pytest.mark.parametrize(
    "data",
    [[], {"op": "nope"}, {"op": "minus", "sub": {"op": "false"}}, {"op": "plus", "sub": {"op": "false"}, "q": "2"}],
)
def test_json_rejects(data):
    with pytest.raises(ParseError):
        formula_from_json(data)


# ------------------------------------------------------------------ simplify


def test_simplify_examples():
    assert simplify(Minus(a, F(0))) == a
    assert simplify(Not(Not(Next(b)))) == Next(b)
    assert simplify(Or(FALSE, b)) == b
    assert simplify(And(b, Plus(FALSE, F(1)))) == b
    assert simplify(Or(Next(a), Next(a))) == Next(a)
    assert simplify(And(b, And(b, a))) == And(b, a)
    assert simplify(Plus(FALSE, F(1, 2))) == Plus(FALSE, F(1, 2))
    assert simplify(Minus(Minus(a, F(1, 4)), F(1, 4))) == Minus(a, F(1, 2))


def _all_states(lmc):
    return lmc.states() if hasattr(lmc, "states") else list(range(8))


@settings(max_examples=150, deadline=None)
@given(formulas())
def test_simplify_preserves_interp_on_fixtures(f):
    g = simplify(f)
    assert size(g) <= size(f)
    for name in FIXTURE_NAMES + ("random-walk",):
        lmc = fixture_lmc(name)
        ev = Evaluator(lmc)
        for s in _all_states(lmc):
            assert ev(g, s) == ev(f, s)


@settings(max_examples=100, deadline=None)
@given(small_lmcs(), formulas())
def test_simplify_preserves_interp_random(lmc, f):
    g = simplify(f)
    ev = Evaluator(lmc)
    for s in lmc.states():
        assert ev(g, s) == ev(f, s)


@settings(max_examples=100, deadline=None)
@given(formulas())
def test_simplify_idempotent(f):
    g = simplify(f)
    assert simplify(g) == g
