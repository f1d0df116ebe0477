"""Translations between apartness proofs and distinguishing formulas.

:func:`formula_to_proof` turns any formula into a proof whose bound is the
formula's interpretation gap at the two states.  :func:`proof_to_formula`
goes the other way: from a valid proof of ``x ▷_ε y`` it builds a formula
worth exactly ε at ``x`` and 0 at ``y``.
"""

from __future__ import annotations

from fractions import Fraction

from .logic import (
    FALSE,
    And,
    Atom,
    Evaluator,
    FalseFormula,
    Formula,
    Minus,
    Next,
    Not,
    Or,
    Plus,
    big_and,
    big_or,
)
from .model import Lmc, StateId, expected_value, joint_support
from .proofs import Exp, Judgement, Lab, ProofDag, ProofTree, Symm, Weak, Zero, require_valid

ZERO = Fraction(0)
ONE = Fraction(1)


def desugar(f: Formula, some_label: str) -> Formula:
    """Rewrite ``&``, ``+`` and ``false`` into the core connectives.

    ``false`` becomes ``some_label - 1``, so any label will do.
    """
    memo: dict[int, Formula] = {}

    def go(g):
        key = id(g)
        if key in memo:
            return memo[key]
        if isinstance(g, Atom):
            out = g
        elif isinstance(g, FalseFormula):
            out = Minus(Atom(some_label), ONE)
        elif isinstance(g, And):
            out = Not(Or(Not(go(g.left)), Not(go(g.right))))
        elif isinstance(g, Plus):
            out = Not(Minus(Not(go(g.sub)), g.q))
        elif isinstance(g, (Next, Not)):
            out = type(g)(go(g.sub))
        elif isinstance(g, Minus):
            out = Minus(go(g.sub), g.q)
        else:
            out = Or(go(g.left), go(g.right))
        memo[key] = out
        return out

    return go(f)


def formula_to_proof(lmc: Lmc, f: Formula, x: StateId, y: StateId) -> ProofTree:
    """Proof of ``x ▷_ε y`` with ``ε = |f(x) - f(y)|``."""
    lmc.require_state(x)
    lmc.require_state(y)
    core = desugar(f, lmc.label(x))
    ev = Evaluator(lmc)
    memo: dict[tuple, ProofTree] = {}

    def build(g, u, v) -> ProofTree:
        key = (id(g), u, v)
        if key in memo:
            return memo[key]
        gu, gv = ev(g, u), ev(g, v)
        j = Judgement(u, v, abs(gu - gv))
        if j.bound == 0:
            out = Zero(j)
        elif isinstance(g, Atom):
            out = Lab(j)
        elif isinstance(g, Not):
            out = build(g.sub, u, v)
        elif isinstance(g, Minus):
            out = Weak(j, build(g.sub, u, v))
        elif isinstance(g, Or):
            gap_l = abs(ev(g.left, u) - ev(g.left, v))
            gap_r = abs(ev(g.right, u) - ev(g.right, v))
            branch = g.left if gap_l >= gap_r else g.right
            out = Weak(j, build(branch, u, v))
        elif isinstance(g, Next):
            support = joint_support(lmc, u, v)
            h = {z: ev(g.sub, z) for z in support}
            if expected_value(lmc.step(u), h) < expected_value(lmc.step(v), h):
                h = {z: ONE - w for z, w in h.items()}
            subs = {
                (a, b): build(g.sub, a, b)
                for a in support
                for b in support
                if h[a] > h[b]
            }
            out = Exp(j, h, subs)
        else:
            raise TypeError(f"unexpected connective after desugaring: {g!r}")
        memo[key] = out
        return out

    return build(core, x, y)


def proof_to_formula(lmc: Lmc, proof: ProofTree | ProofDag) -> Formula:
    """Formula worth exactly the root bound at the left state and 0 at the right.

    The proof is checked first; :class:`~lmcapart.errors.InvalidProof` is
    raised if it is rejected.
    """
    require_valid(lmc, proof)
    if isinstance(proof, ProofDag):
        proof = proof.to_tree()
    memo: dict[int, Formula] = {}

    def build(p) -> Formula:
        key = id(p)
        if key in memo:
            return memo[key]
        eps = p.bound
        if isinstance(p, Zero):
            out = FALSE
        elif isinstance(p, Lab):
            out = Atom(lmc.label(p.left))
        elif isinstance(p, Symm):
            out = Minus(Not(build(p.sub)), ONE - eps)
        elif isinstance(p, Weak):
            out = Minus(build(p.sub), p.sub.bound - eps)
        else:
            out = _exp_formula(lmc, p, build)
        memo[key] = out
        return out

    return build(proof)


def _exp_formula(lmc: Lmc, p: Exp, build) -> Formula:
    h = p.h
    support = sorted(h)
    disjuncts = []
    for a in support:
        conj = [Plus(build(p.subs[(a, b)]), h[b]) for b in support if h[a] > h[b]]
        conj.append(Plus(FALSE, h[a]))
        disjuncts.append(big_and(conj))
    at_left = expected_value(lmc.step(p.left), h)
    at_right = expected_value(lmc.step(p.right), h)
    out: Formula = Minus(Next(big_or(disjuncts)), at_right)
    slack = (at_left - at_right) - p.bound
    if slack > 0:
        out = Minus(out, slack)
    return out
