"""Apartness proofs: lower-bound certificates ``x ▷_ε y`` on behavioural distance.

Five rules build proofs:

* ``zero``  concludes ``x ▷_0 y``;
* ``lab``   concludes ``x ▷_1 y`` when the labels differ;
* ``symm``  turns ``y ▷_ε x`` into ``x ▷_ε y``;
* ``weak``  lowers the bound of a proof of the same pair;
* ``exp``   picks ``h`` on the joint successor support, needs a sub-proof of
  exactly ``x' ▷_{h(x')-h(y')} y'`` for every ordered pair with
  ``h(x') > h(y')``, and concludes any bound up to the expectation gap.

Proofs are immutable trees whose subtrees may be shared; :class:`ProofDag` is
the flat, deduplicated form used for storage and JSON.
"""

from __future__ import annotations

import json
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, ClassVar, Iterator, Union

from .errors import InvalidProof, ParseError
from .kantorovich import DistanceTable, gamma_step
from .model import Lmc, StateId, expected_value, format_rational, joint_support, parse_rational

ZERO = Fraction(0)
ONE = Fraction(1)


class ProofFormatError(ParseError):
    pass


@dataclass(frozen=True)
class Judgement:
    left: StateId
    right: StateId
    bound: Fraction

    def __str__(self):
        return f"{self.left} ▷_{{{format_rational(self.bound)}}} {self.right}"


class ProofTree:
    rule: ClassVar[str]
    judgement: Judgement

    def children(self) -> list[tuple[str, "ProofTree"]]:
        return []

    @property
    def left(self):
        return self.judgement.left

    @property
    def right(self):
        return self.judgement.right

    @property
    def bound(self) -> Fraction:
        return self.judgement.bound


@dataclass(frozen=True)
class Zero(ProofTree):
    judgement: Judgement
    rule: ClassVar[str] = "zero"


@dataclass(frozen=True)
class Lab(ProofTree):
    judgement: Judgement
    rule: ClassVar[str] = "lab"


@dataclass(frozen=True)
class Symm(ProofTree):
    judgement: Judgement
    sub: ProofTree
    rule: ClassVar[str] = "symm"

    def children(self):
        return [("sub", self.sub)]


@dataclass(frozen=True)
class Weak(ProofTree):
    judgement: Judgement
    sub: ProofTree
    rule: ClassVar[str] = "weak"

    def children(self):
        return [("sub", self.sub)]


@dataclass(frozen=True)
class Exp(ProofTree):
    judgement: Judgement
    h: Mapping[StateId, Fraction]
    subs: Mapping[tuple[StateId, StateId], ProofTree] = field(default_factory=dict)
    rule: ClassVar[str] = "exp"

    def children(self):
        return [(f"{a},{b}", self.subs[(a, b)]) for a, b in sorted(self.subs)]


RULES = {cls.rule: cls for cls in (Zero, Lab, Symm, Weak, Exp)}


# --------------------------------------------------------------------- checking


@dataclass(frozen=True)
class CheckReport:
    """Outcome of :func:`check_proof`; falsy when the proof is rejected.

    ``path`` lists the child steps from the root to the failing node (``sub``
    for symm/weak, ``"x',y'"`` for exp obligations); ``node`` is the DAG
    index of that node when a :class:`ProofDag` was checked.
    """

    valid: bool
    root: Judgement | None = None
    path: tuple[str, ...] = ()
    rule: str | None = None
    condition: str | None = None
    node: int | None = None

    def __bool__(self):
        return self.valid

    @property
    def location(self) -> str:
        return "/" + "/".join(self.path)

    def __str__(self):
        if self.valid:
            return f"VALID: {self.root}"
        where = self.location + (f" (node #{self.node})" if self.node is not None else "")
        return f"INVALID at {where} [{self.rule}]: {self.condition}"


class _Reject(Exception):
    def __init__(self, path, node, condition):
        self.path, self.node, self.condition = path, node, condition


def _local_violation(lmc: Lmc, node: ProofTree) -> str | None:
    j = node.judgement
    for s in (j.left, j.right):
        if not lmc.is_state(s):
            return f"unknown state {s!r}"
    if not isinstance(j.bound, (int, Fraction)) or not 0 <= j.bound <= 1:
        return f"bound {j.bound} outside [0, 1]"
    if isinstance(node, Zero):
        if j.bound != 0:
            return f"zero rule needs bound 0, got {format_rational(j.bound)}"
    elif isinstance(node, Lab):
        if lmc.label(j.left) == lmc.label(j.right):
            return f"labels agree ({lmc.label(j.left)!r}); lab rule needs distinct labels"
        if j.bound != 1:
            return f"lab rule needs bound 1, got {format_rational(j.bound)}"
    elif isinstance(node, Symm):
        want = Judgement(j.right, j.left, j.bound)
        if node.sub.judgement != want:
            return f"symm premise must be {want}, got {node.sub.judgement}"
    elif isinstance(node, Weak):
        sj = node.sub.judgement
        if (sj.left, sj.right) != (j.left, j.right):
            return f"weak premise must relate {j.left} and {j.right}, got {sj}"
        if j.bound > sj.bound:
            return (
                f"weak bound {format_rational(j.bound)} exceeds premise bound "
                f"{format_rational(sj.bound)}"
            )
    elif isinstance(node, Exp):
        return _exp_violation(lmc, node)
    else:
        return f"unknown rule {type(node).__name__}"
    return None


def _exp_violation(lmc: Lmc, node: Exp) -> str | None:
    j = node.judgement
    support = joint_support(lmc, j.left, j.right)
    h = node.h
    if set(h) != set(support):
        missing = sorted(set(support) - set(h), key=repr)
        extra = sorted(set(h) - set(support), key=repr)
        return f"h domain must equal the joint support; missing {missing}, extra {extra}"
    for z in support:
        v = h[z]
        if not isinstance(v, (int, Fraction)) or not 0 <= v <= 1:
            return f"h({z}) = {v} outside [0, 1]"
    needed = {(a, b): h[a] - h[b] for a in support for b in support if h[a] > h[b]}
    for pair in sorted(needed):
        if pair not in node.subs:
            return f"missing sub-proof for obligation {pair[0]} ▷_{{{format_rational(needed[pair])}}} {pair[1]}"
        want = Judgement(pair[0], pair[1], needed[pair])
        got = node.subs[pair].judgement
        if got != want:
            return f"obligation {pair[0]},{pair[1]} needs premise {want}, got {got}"
    extra = sorted(set(node.subs) - set(needed), key=repr)
    if extra:
        return f"sub-proofs for non-obligated pairs {extra}"
    gap = expected_value(lmc.step(j.left), h) - expected_value(lmc.step(j.right), h)
    if gap < j.bound:
        return (
            f"expectation gap {format_rational(gap)} below bound {format_rational(j.bound)}"
        )
    return None


def _check_tree(lmc: Lmc, root: ProofTree, index_of: Mapping[int, int] | None = None) -> CheckReport:
    valid: set[int] = set()

    def visit(node, path):
        if id(node) in valid:
            return
        for step, child in node.children():
            visit(child, path + (step,))
        problem = _local_violation(lmc, node)
        if problem is not None:
            raise _Reject(path, node, problem)
        valid.add(id(node))

    try:
        visit(root, ())
    except _Reject as rej:
        idx = index_of.get(id(rej.node)) if index_of else None
        return CheckReport(False, root.judgement, rej.path, rej.node.rule, rej.condition, idx)
    return CheckReport(True, root.judgement)


def check_proof(lmc: Lmc, proof: Union[ProofTree, "ProofDag"]) -> CheckReport:
    """Validate every node of ``proof``; shared nodes are checked once."""
    if isinstance(proof, ProofDag):
        objs = proof._objects()
        return _check_tree(lmc, objs[proof.root], {id(o): i for i, o in enumerate(objs)})
    return _check_tree(lmc, proof)


def require_valid(lmc: Lmc, proof) -> CheckReport:
    report = check_proof(lmc, proof)
    if not report:
        raise InvalidProof(report)
    return report


def guard_depth(proof: Union[ProofTree, "ProofDag"]) -> int:
    """Nesting depth of lab/exp applications; zero is 0 and lab is 1."""
    if isinstance(proof, ProofDag):
        proof = proof.to_tree()
    memo: dict[int, int] = {}

    def depth(node):
        key = id(node)
        if key not in memo:
            if isinstance(node, Zero):
                memo[key] = 0
            elif isinstance(node, Lab):
                memo[key] = 1
            elif isinstance(node, (Symm, Weak)):
                memo[key] = depth(node.sub)
            else:
                memo[key] = 1 + max((depth(s) for s in node.subs.values()), default=0)
        return memo[key]

    return depth(proof)


def tree_size(proof: ProofTree) -> int:
    """Number of nodes once shared subtrees are counted at every occurrence."""
    memo: dict[int, int] = {}

    def size(node):
        key = id(node)
        if key not in memo:
            memo[key] = 1 + sum(size(c) for _, c in node.children())
        return memo[key]

    return size(proof)


def iter_nodes(proof: ProofTree) -> Iterator[tuple[tuple[str, ...], ProofTree]]:
    """Pre-order walk yielding ``(path, node)``; shared nodes appear once per path."""
    stack = [((), proof)]
    while stack:
        path, node = stack.pop()
        yield path, node
        for step, child in reversed(node.children()):
            stack.append((path + (step,), child))


def replace_at(proof: ProofTree, path: tuple[str, ...], new: ProofTree) -> ProofTree:
    """Copy of ``proof`` with the node at ``path`` replaced (ancestors rebuilt)."""
    if not path:
        return new
    step, rest = path[0], path[1:]
    if isinstance(proof, (Symm, Weak)):
        if step != "sub":
            raise KeyError(step)
        return type(proof)(proof.judgement, replace_at(proof.sub, rest, new))
    if isinstance(proof, Exp):
        for pair, child in proof.subs.items():
            if f"{pair[0]},{pair[1]}" == step:
                subs = dict(proof.subs)
                subs[pair] = replace_at(child, rest, new)
                return Exp(proof.judgement, proof.h, subs)
    raise KeyError(step)


# ------------------------------------------------------------------- synthesis


def synthesize_tree(lmc: Lmc, x: StateId, y: StateId, depth: int, table: DistanceTable | None = None) -> ProofTree:
    """Proof of ``x ▷_ε y`` with ε the depth-th distance iterate (shared subtrees)."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    lmc.require_state(x)
    lmc.require_state(y)
    if table is None:
        table = DistanceTable(lmc)
    memo: dict[tuple, tuple[tuple, ProofTree]] = {}

    def synth(u, v, i) -> ProofTree:
        value = table.value(i, u, v)
        if i == 0 or value == 0:
            return Zero(Judgement(u, v, ZERO))
        if lmc.label(u) != lmc.label(v):
            return Lab(Judgement(u, v, ONE))
        key = (i, (u, v) if u <= v else (v, u))
        hit = memo.get(key)
        if hit is not None:
            orientation, proof = hit
            if orientation == (u, v):
                return proof
            return Symm(Judgement(u, v, value), proof)
        step = gamma_step(table, i - 1, u, v)
        h = step.h
        support = list(h)
        subs = {}
        for a in support:
            for b in support:
                need = h[a] - h[b]
                if need <= 0:
                    continue
                sub = synth(a, b, i - 1)
                if sub.bound > need:
                    sub = Weak(Judgement(a, b, need), sub)
                subs[(a, b)] = sub
        proof = Exp(Judgement(u, v, value), dict(h), subs)
        memo[key] = ((u, v), proof)
        return proof

    return synth(x, y, depth)


def synthesize_proof(lmc: Lmc, x: StateId, y: StateId, depth: int, table: DistanceTable | None = None) -> "ProofDag":
    return ProofDag.from_tree(synthesize_tree(lmc, x, y, depth, table))


# ------------------------------------------------------------------------- DAG


@dataclass(frozen=True)
class DagNode:
    rule: str
    judgement: Judgement
    h: tuple[tuple[StateId, Fraction], ...] | None = None
    subs: tuple[int, ...] = ()
    sub_pairs: tuple[tuple[StateId, StateId], ...] = ()


@dataclass(frozen=True)
class ProofDag:
    """Proof stored as a node array; children always precede their parents."""

    nodes: tuple[DagNode, ...]
    root: int

    def __post_init__(self):
        n = len(self.nodes)
        if not 0 <= self.root < n:
            raise ProofFormatError(f"root index {self.root} out of range")
        for i, node in enumerate(self.nodes):
            for c in node.subs:
                if not isinstance(c, int) or not 0 <= c < n:
                    raise ProofFormatError(f"node {i}: child index {c} out of range")
        _require_acyclic(self.nodes, self.root)

    @classmethod
    def from_tree(cls, tree: ProofTree) -> "ProofDag":
        nodes: list[DagNode] = []
        by_content: dict[DagNode, int] = {}
        by_id: dict[int, int] = {}

        def add(node: ProofTree) -> int:
            key = id(node)
            if key in by_id:
                return by_id[key]
            if isinstance(node, Exp):
                pairs = tuple(sorted(node.subs))
                subs = tuple(add(node.subs[p]) for p in pairs)
                h = tuple(sorted(node.h.items()))
                rec = DagNode("exp", node.judgement, h, subs, pairs)
            elif isinstance(node, (Symm, Weak)):
                rec = DagNode(node.rule, node.judgement, None, (add(node.sub),))
            else:
                rec = DagNode(node.rule, node.judgement)
            idx = by_content.get(rec)
            if idx is None:
                idx = len(nodes)
                nodes.append(rec)
                by_content[rec] = idx
            by_id[key] = idx
            return idx

        root = add(tree)
        return cls(tuple(nodes), root)

    def _objects(self) -> list[ProofTree | None]:
        objs: list[ProofTree | None] = [None] * len(self.nodes)

        def build(i):
            if objs[i] is None:
                rec = self.nodes[i]
                if rec.rule == "exp":
                    subs = {p: build(c) for p, c in zip(rec.sub_pairs, rec.subs)}
                    objs[i] = Exp(rec.judgement, dict(rec.h), subs)
                elif rec.rule in ("symm", "weak"):
                    objs[i] = RULES[rec.rule](rec.judgement, build(rec.subs[0]))
                else:
                    objs[i] = RULES[rec.rule](rec.judgement)
            return objs[i]

        build(self.root)
        return objs

    def to_tree(self) -> ProofTree:
        return self._objects()[self.root]

    def __len__(self):
        return len(self.nodes)

    def to_json(self) -> dict:
        out = []
        for rec in self.nodes:
            j = rec.judgement
            item: dict[str, Any] = {
                "rule": rec.rule,
                "left": j.left,
                "right": j.right,
                "bound": format_rational(j.bound),
            }
            if rec.rule == "exp":
                item["h"] = {str(z): format_rational(v) for z, v in rec.h}
            if rec.subs:
                item["subs"] = list(rec.subs)
            if rec.rule == "exp":
                item["sub_pairs"] = [[a, b] for a, b in rec.sub_pairs]
            out.append(item)
        return {"nodes": out, "root": self.root}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, data: Any, lmc: Lmc) -> "ProofDag":
        """Parse the JSON form; state ids are resolved through ``lmc.parse_state``."""
        if not isinstance(data, dict) or not isinstance(data.get("nodes"), list):
            raise ProofFormatError('proof must be an object with a "nodes" list')
        root = data.get("root")
        if not isinstance(root, int) or isinstance(root, bool):
            raise ProofFormatError('"root" must be a node index')
        nodes = []
        for i, item in enumerate(data["nodes"]):
            if not isinstance(item, dict):
                raise ProofFormatError(f"node {i} is not an object")
            rule = item.get("rule")
            if rule not in RULES:
                raise ProofFormatError(f"node {i}: unknown rule {rule!r}")
            try:
                judgement = Judgement(
                    lmc.parse_state(item["left"]),
                    lmc.parse_state(item["right"]),
                    parse_rational(item["bound"]),
                )
            except KeyError as exc:
                raise ProofFormatError(f"node {i}: missing field {exc.args[0]!r}") from None
            subs = item.get("subs", [])
            if not isinstance(subs, list) or not all(isinstance(c, int) and not isinstance(c, bool) for c in subs):
                raise ProofFormatError(f"node {i}: \"subs\" must be a list of node indices")
            if rule in ("zero", "lab"):
                if subs:
                    raise ProofFormatError(f"node {i}: {rule} takes no premises")
                nodes.append(DagNode(rule, judgement))
            elif rule in ("symm", "weak"):
                if len(subs) != 1:
                    raise ProofFormatError(f"node {i}: {rule} takes exactly one premise")
                nodes.append(DagNode(rule, judgement, None, tuple(subs)))
            else:
                raw_h = item.get("h")
                if not isinstance(raw_h, dict):
                    raise ProofFormatError(f'node {i}: exp needs an "h" object')
                h = tuple(sorted((lmc.parse_state(k), parse_rational(v)) for k, v in raw_h.items()))
                if "sub_pairs" in item:
                    raw_pairs = item["sub_pairs"]
                    if not isinstance(raw_pairs, list) or not all(
                        isinstance(p, list) and len(p) == 2 for p in raw_pairs
                    ):
                        raise ProofFormatError(f'node {i}: "sub_pairs" must be a list of pairs')
                    pairs = tuple((lmc.parse_state(a), lmc.parse_state(b)) for a, b in raw_pairs)
                else:
                    hv = dict(h)
                    pairs = tuple(sorted((a, b) for a in hv for b in hv if hv[a] > hv[b]))
                if len(pairs) != len(subs):
                    raise ProofFormatError(f"node {i}: {len(subs)} subs for {len(pairs)} pairs")
                if len(set(pairs)) != len(pairs):
                    raise ProofFormatError(f"node {i}: repeated pair in sub_pairs")
                nodes.append(DagNode("exp", judgement, h, tuple(subs), pairs))
        return cls(tuple(nodes), root)

    @classmethod
    def loads(cls, text: str | bytes, lmc: Lmc) -> "ProofDag":
        try:
            data = json.loads(text)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise ProofFormatError(f"invalid proof JSON: {exc}") from None
        return cls.from_json(data, lmc)


def _require_acyclic(nodes, root):
    state = [0] * len(nodes)  # 0 unseen, 1 on stack, 2 done
    stack = [(root, iter(nodes[root].subs))]
    state[root] = 1
    while stack:
        i, it = stack[-1]
        nxt = next(it, None)
        if nxt is None:
            state[i] = 2
            stack.pop()
        elif state[nxt] == 1:
            raise ProofFormatError(f"cycle through node {nxt}")
        elif state[nxt] == 0:
            state[nxt] = 1
            stack.append((nxt, iter(nodes[nxt].subs)))


def expand_dag(dag: ProofDag) -> ProofTree:
    return dag.to_tree()


# ---------------------------------------------------------------- pretty print


def pretty(proof: Union[ProofTree, ProofDag]) -> str:
    """Conclusion first, premises indented below; repeated subproofs are referenced by number."""
    dag = proof if isinstance(proof, ProofDag) else ProofDag.from_tree(proof)
    lines: list[str] = []
    shown: set[int] = set()

    def emit(i, indent):
        rec = dag.nodes[i]
        pad = "  " * indent
        head = f"{pad}#{i} {rec.judgement}  ({rec.rule})"
        if i in shown and rec.subs:
            lines.append(f"{head}  [see above]")
            return
        shown.add(i)
        if rec.rule == "exp":
            hs = ", ".join(f"{z} ↦ {format_rational(v)}" for z, v in rec.h)
            head += f"  h = {{{hs}}}"
        elif rec.rule == "weak":
            sub = dag.nodes[rec.subs[0]].judgement
            head += f"  {format_rational(rec.judgement.bound)} ≤ {format_rational(sub.bound)}"
        lines.append(head)
        for c in rec.subs:
            emit(c, indent + 1)

    emit(dag.root, 0)
    return "\n".join(lines) + "\n"
