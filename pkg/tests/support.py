import random
from fractions import Fraction
from importlib import resources

from hypothesis import strategies as st

from lmcapart.model import FiniteLmc, builtin_lmc, load_lmc

FIXTURE_NAMES = ("ex2", "noform", "rady5")


def fixture_lmc(name):
    if name == "random-walk":
        return builtin_lmc("random-walk")
    return load_lmc((resources.files("lmcapart") / "fixtures" / f"{name}.json").read_bytes())


def random_lmc(rng: random.Random, n: int, labels: str = "ab", fanout: int = 3) -> FiniteLmc:
    names = [f"s{i}" for i in range(n)]
    trans = {}
    for s in names:
        targets = rng.sample(names, rng.randint(1, min(fanout, n)))
        weights = [rng.randint(1, 4) for _ in targets]
        total = sum(weights)
        trans[s] = {t: Fraction(w, total) for t, w in zip(targets, weights)}
    return FiniteLmc({s: rng.choice(labels) for s in names}, trans)


@st.composite
def small_lmcs(draw, max_states=5):
    n = draw(st.integers(min_value=1, max_value=max_states))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    return random_lmc(random.Random(seed), n)


# ------------------------------------------------------------- proof corpora


def synthesized_corpus(lmcs, max_depth=4, walk=None):
    """Yield ``(name, lmc, tree)`` for every ordered pair and depth up to ``max_depth``."""
    from lmcapart.kantorovich import DistanceTable
    from lmcapart.proofs import synthesize_tree

    for name, lmc in lmcs.items():
        table = DistanceTable(lmc)
        states = lmc.states()
        for depth in range(max_depth + 1):
            for x in states:
                for y in states:
                    yield name, lmc, synthesize_tree(lmc, x, y, depth, table)
    if walk is not None:
        table = DistanceTable(walk)
        for depth in range(max_depth + 1):
            for x in range(5):
                for y in range(5):
                    yield "random-walk", walk, synthesize_tree(walk, x, y, depth, table)


def _above(value):
    return value + (1 - value) / 2 if value < 1 else Fraction(3, 2)


def mutations(lmc, tree):
    """Single-field edits that must each break the edited node itself.

    Yields ``(kind, path, mutated_tree)``.  Kinds: ``bound`` (raised past what
    the node's rule allows), ``h`` (one value of an exp map moved), ``drop``
    (one exp premise removed).
    """
    from lmcapart.model import expected_value
    from lmcapart.proofs import Exp, Judgement, Symm, Weak, iter_nodes, replace_at

    for path, node in iter_nodes(tree):
        j = node.judgement
        if isinstance(node, Exp):
            gap = expected_value(lmc.step(j.left), node.h) - expected_value(lmc.step(j.right), node.h)
            raised = _above(gap)
        elif isinstance(node, Weak):
            raised = _above(node.sub.bound)
        else:  # the remaining rules pin the bound to one value
            raised = _above(j.bound)
        bumped = Judgement(j.left, j.right, raised)
        if isinstance(node, Exp):
            yield "bound", path, replace_at(tree, path, Exp(bumped, node.h, node.subs))
        elif isinstance(node, (Symm, Weak)):
            yield "bound", path, replace_at(tree, path, type(node)(bumped, node.sub))
        else:
            yield "bound", path, replace_at(tree, path, type(node)(bumped))
        if isinstance(node, Exp) and node.subs:
            a, b = min(node.subs)
            h = dict(node.h)
            h[a] = h[a] - (h[a] - h[b]) / 2
            yield "h", path, replace_at(tree, path, Exp(j, h, node.subs))
            subs = dict(node.subs)
            del subs[max(node.subs)]
            yield "drop", path, replace_at(tree, path, Exp(j, node.h, subs))


def lowered_at_root(tree):
    """Root weakened to half its bound; valid whenever the original was."""
    from lmcapart.proofs import Judgement, Weak

    j = tree.judgement
    return Weak(Judgement(j.left, j.right, j.bound / 2), tree)


# ----------------------------------------------------------------- formulas

_QS = [Fraction(0), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(1)]


def formulas(labels=("a", "b"), max_leaves=12):
    from lmcapart import logic as L

    leaves = st.one_of(st.sampled_from([L.Atom(a) for a in labels]), st.just(L.FALSE))
    q = st.sampled_from(_QS)

    def extend(children):
        return st.one_of(
            children.map(L.Next),
            children.map(L.Not),
            st.builds(L.Minus, children, q),
            st.builds(L.Plus, children, q),
            st.builds(L.Or, children, children),
            st.builds(L.And, children, children),
        )

    return st.recursive(leaves, extend, max_leaves=max_leaves)
