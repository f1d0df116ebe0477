from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lmcapart.errors import InvalidProof
from lmcapart.kantorovich import DistanceTable
from lmcapart.logic import (
    FALSE,
    And,
    Atom,
    Evaluator,
    FalseFormula,
    Formula,
    Next,
    Plus,
    interp,
    modal_depth,
    parse_formula,
    simplify,
    size,
)
from lmcapart.proofs import Exp, Judgement, Lab, Weak, Zero, check_proof, guard_depth, synthesize_tree
from lmcapart.translate import desugar, formula_to_proof, proof_to_formula

from .support import FIXTURE_NAMES, fixture_lmc, formulas, lowered_at_root, synthesized_corpus

F = Fraction


def _pairs(lmc):
    states = lmc.states() if hasattr(lmc, "states") else list(range(6))
    return [(x, y) for x in states for y in states]


# -------------------------------------------------------- formula to proof


def test_atom_gives_lab(ex2):
    p = formula_to_proof(ex2, Atom("a"), "x1", "x2")
    assert isinstance(p, Lab) and p.bound == 1


def test_equal_values_give_zero(ex2):
    p = formula_to_proof(ex2, Next(Atom("b")), "x1", "y1")
    assert isinstance(p, Zero) and check_proof(ex2, p)


def test_noform_next_b(noform):
    p = formula_to_proof(noform, parse_formula("O b"), "x", "y")
    assert isinstance(p, Exp) and p.bound == F(1, 2)
    assert p.h == {"x": 0, "x1": 1, "y": 0}
    assert check_proof(noform, p)


def test_negative_gap_flips_h(noform):
    p = formula_to_proof(noform, parse_formula("O b"), "y", "x")
    assert p.h == {"x": 1, "x1": 0, "y": 1} and check_proof(noform, p)


def test_or_prefers_left_on_ties(ex2):
    p = formula_to_proof(ex2, parse_formula("a | a - 0"), "x1", "x2")
    assert isinstance(p, Weak) and isinstance(p.sub, Lab)


def test_desugar_preserves_interp(ex2):
    f = parse_formula("O (a & false + 1/3) | false")
    g = desugar(f, "a")
    assert all(interp(ex2, f, s) == interp(ex2, g, s) for s in ex2.states())
    assert not _mentions(g, (And, Plus, FalseFormula))


def _mentions(f: Formula, kinds):
    return isinstance(f, kinds) or any(_mentions(c, kinds) for c in f.children())


@settings(max_examples=120, deadline=None)
@given(formulas(max_leaves=8), st.sampled_from(FIXTURE_NAMES + ("random-walk",)), st.data())
def test_round_trip_a(f, name, data):
    lmc = fixture_lmc(name)
    x, y = data.draw(st.sampled_from(_pairs(lmc)))
    p = formula_to_proof(lmc, f, x, y)
    assert check_proof(lmc, p)
    assert p.bound == abs(interp(lmc, f, x) - interp(lmc, f, y))
    assert guard_depth(p) <= modal_depth(f) + 1


# -------------------------------------------------------- proof to formula


def test_zero_proof_gives_false(ex2):
    assert proof_to_formula(ex2, Zero(Judgement("x", "y", F(0)))) is FALSE


def test_invalid_proof_refused(ex2):
    with pytest.raises(InvalidProof):
        proof_to_formula(ex2, Zero(Judgement("x", "y", F(1))))


def test_slack_is_removed(ex2):
    # the synthesized exp is tight; weakening the conclusion inside the exp
    # node itself leaves slack that the construction must subtract
    tree = synthesize_tree(ex2, "x", "y", 2)
    loose = Exp(Judgement("x", "y", F(1, 20)), tree.h, tree.subs)
    f = proof_to_formula(ex2, loose)
    assert interp(ex2, f, "x") == F(1, 20) and interp(ex2, f, "y") == 0


def test_rady5_formula(rady5):
    f = proof_to_formula(rady5, synthesize_tree(rady5, "x0", "y0", 3))
    ev = Evaluator(rady5)
    assert ev(f, "x0") == F(1, 8) and ev(f, "y0") == 0
    # recursive subformulas: the shifted premises, one per obligation below the root
    assert _count(f, lambda g: isinstance(g, Plus) and not isinstance(g.sub, FalseFormula)) == 8
    assert modal_depth(f) == 2
    g = simplify(f)
    assert size(g) < size(f)
    assert g == parse_formula("O O a - 3/8")
    assert all(ev(g, s) == ev(f, s) for s in rady5.states())


def _count(f, pred):
    return int(pred(f)) + sum(_count(c, pred) for c in f.children())


def test_random_walk_formula(walk):
    f = proof_to_formula(walk, synthesize_tree(walk, 2, 3, 3))
    assert interp(walk, f, 2) == F(1, 4) and interp(walk, f, 3) == 0
    g = simplify(f)
    expected = parse_formula("O (O b & (false + 1/2))")
    assert g == expected
    assert all(interp(walk, g, s) == interp(walk, f, s) for s in range(10))


def test_certificates_exact_on_corpus(finite_fixtures, walk):
    for _, lmc, tree in synthesized_corpus(finite_fixtures, walk=walk):
        for p in (tree, lowered_at_root(tree)):
            f = proof_to_formula(lmc, p)
            ev = Evaluator(lmc)
            assert ev(f, p.left) == p.bound
            assert ev(f, p.right) == 0


def test_round_trip_b(finite_fixtures, walk):
    for _, lmc, tree in synthesized_corpus(finite_fixtures, max_depth=3, walk=walk):
        f = proof_to_formula(lmc, tree)
        back = formula_to_proof(lmc, f, tree.left, tree.right)
        assert check_proof(lmc, back)
        assert back.bound == tree.bound


def test_depth_correspondence(finite_fixtures, walk):
    for _, lmc, tree in synthesized_corpus(finite_fixtures, walk=walk):
        g, m = guard_depth(tree), modal_depth(proof_to_formula(lmc, tree))
        # lab leaves cost a guard level but no modality
        assert g - 1 <= m <= g
        assert guard_depth(formula_to_proof(lmc, proof_to_formula(lmc, tree), tree.left, tree.right)) <= m + 1
