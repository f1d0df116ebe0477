"""Distributions and labelled Markov chains over exact rationals.

Two kinds of chain are supported: :class:`FiniteLmc`, loaded from a JSON
document and exposing its state list, and lazily generated chains such as
:class:`RandomWalk` whose state space may be infinite.  Algorithms that need
the whole state set only accept finite chains; everything depth-bounded works
on both because it only ever touches successor supports.
"""

from __future__ import annotations

import json
import re
from abc import ABC, abstractmethod
from collections.abc import Callable, Hashable, Iterable, Iterator, Mapping
from fractions import Fraction
from typing import Any, Union

from .errors import MissingValue, ParseError, UnknownGenerator, UnknownState, ValidationError

StateId = Hashable
Rational = Fraction
Number = Union[int, Fraction]

_RATIONAL_RE = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(text: Any) -> Fraction:
    """Parse ``"p/q"`` or an integer literal into an exact rational.

    Decimal notation is rejected on purpose: every quantity in the toolkit is
    exact, and ``"0.1"`` usually signals a float that was printed somewhere.
    """
    if isinstance(text, bool):
        raise ParseError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ParseError(f"not a rational: {text!r}")
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise ParseError(f"not a rational: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ParseError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(q: Number) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class Distribution(Mapping):
    """Finitely supported probability distribution with exact weights.

    Behaves as a read-only mapping from support states to weights; iteration
    follows the sorted support order.  Use :meth:`prob` to read weights of
    states outside the support.
    """

    __slots__ = ("_weights",)

    def __init__(self, weights: Mapping[StateId, Number] | Iterable[tuple[StateId, Number]]):
        items = weights.items() if isinstance(weights, Mapping) else weights
        table: dict[StateId, Fraction] = {}
        for state, w in items:
            w = Fraction(w)
            if w <= 0 or w > 1:
                raise ValidationError(f"weight {format_rational(w)} of {state!r} outside (0, 1]")
            if state in table:
                raise ValidationError(f"duplicate support state {state!r}")
            table[state] = w
        if not table:
            raise ValidationError("empty distribution")
        total = sum(table.values(), Fraction(0))
        if total != 1:
            raise ValidationError(f"weights sum to {format_rational(total)}, not 1")
        self._weights = {s: table[s] for s in sorted(table)}

    @classmethod
    def point(cls, state: StateId) -> "Distribution":
        return cls({state: 1})

    def __getitem__(self, state):
        return self._weights[state]

    def __iter__(self) -> Iterator[StateId]:
        return iter(self._weights)

    def __len__(self) -> int:
        return len(self._weights)

    def prob(self, state: StateId) -> Fraction:
        return self._weights.get(state, Fraction(0))

    def support(self) -> list[StateId]:
        return list(self._weights)

    def __repr__(self):
        body = ", ".join(f"{s!r}: {format_rational(w)}" for s, w in self._weights.items())
        return f"Distribution({{{body}}})"


def expected_value(mu: Mapping[StateId, Fraction], h: Mapping[StateId, Number]) -> Fraction:
    """Exact expectation of ``h`` under ``mu``; ``h`` must cover the support."""
    total = Fraction(0)
    for state, w in mu.items():
        try:
            value = h[state]
        except KeyError:
            raise MissingValue(f"no value for support state {state!r}") from None
        total += w * value
    return total


class Lmc(ABC):
    """A labelled Markov chain: a label and a successor distribution per state.

    Implementations must be deterministic and safe to call concurrently.
    """

    finite = False

    @abstractmethod
    def label(self, state: StateId) -> str: ...

    @abstractmethod
    def step(self, state: StateId) -> Distribution: ...

    @abstractmethod
    def parse_state(self, text: str) -> StateId:
        """Turn a user-supplied string (CLI, JSON key) into a state id."""

    @abstractmethod
    def is_state(self, state: StateId) -> bool: ...

    def require_state(self, state: StateId) -> StateId:
        if not self.is_state(state):
            raise UnknownState(f"unknown state {state!r}")
        return state


def joint_support(lmc: Lmc, x: StateId, y: StateId) -> list[StateId]:
    """Sorted union of the successor supports of ``x`` and ``y``."""
    return sorted(set(lmc.step(x)) | set(lmc.step(y)))


class FiniteLmc(Lmc):
    finite = True

    def __init__(
        self,
        labels: Mapping[str, str],
        transitions: Mapping[str, Mapping[str, Number]],
    ):
        if not labels:
            raise ValidationError("an LMC needs at least one state")
        self._labels: dict[str, str] = {}
        for state in sorted(labels):
            label = labels[state]
            if not isinstance(label, str) or not label:
                raise ValidationError(f"state {state!r} needs a non-empty string label")
            self._labels[state] = label
        self._steps: dict[str, Distribution] = {}
        for state in self._labels:
            succ = transitions.get(state) or {}
            for target in succ:
                if target not in self._labels:
                    raise ValidationError(f"transition {state!r} -> {target!r}: unknown target state")
            # no outgoing edges means an implicit probability-1 self-loop
            self._steps[state] = Distribution(succ) if succ else Distribution.point(state)
        unknown = set(transitions) - set(self._labels)
        if unknown:
            raise ValidationError(f"transitions given for unknown states {sorted(unknown)!r}")

    def states(self) -> list[str]:
        return list(self._labels)

    def label(self, state):
        try:
            return self._labels[state]
        except (KeyError, TypeError):
            raise UnknownState(f"unknown state {state!r}") from None

    def step(self, state):
        try:
            return self._steps[state]
        except (KeyError, TypeError):
            raise UnknownState(f"unknown state {state!r}") from None

    def is_state(self, state):
        return isinstance(state, str) and state in self._labels

    def parse_state(self, text):
        return self.require_state(str(text))

    def to_document(self) -> dict:
        """Inverse of :func:`load_lmc` (self-loops are written out explicitly)."""
        return {
            "states": [
                {
                    "id": s,
                    "label": self._labels[s],
                    "transitions": [
                        {"to": t, "prob": format_rational(w)} for t, w in self._steps[s].items()
                    ],
                }
                for s in self._labels
            ]
        }

    def __repr__(self):
        return f"FiniteLmc({len(self._labels)} states)"


class RandomWalk(Lmc):
    """Symmetric random walk on the naturals, absorbed at 0.

    State 0 carries label ``b`` and loops on itself; every other state ``n``
    carries ``a`` and moves to ``n-1`` or ``n+1`` with probability 1/2 each.
    """

    def label(self, state):
        self.require_state(state)
        return "b" if state == 0 else "a"

    def step(self, state):
        self.require_state(state)
        if state == 0:
            return Distribution.point(0)
        half = Fraction(1, 2)
        return Distribution({state - 1: half, state + 1: half})

    def is_state(self, state):
        return isinstance(state, int) and not isinstance(state, bool) and state >= 0

    def parse_state(self, text):
        if isinstance(text, int) and not isinstance(text, bool):
            return self.require_state(text)
        text = str(text).strip()
        if not text.isdigit():
            raise UnknownState(f"random-walk states are naturals, got {text!r}")
        return int(text)

    def __repr__(self):
        return "RandomWalk()"


GENERATORS: dict[str, Callable[[Mapping[str, Any]], Lmc]] = {}


def register_generator(name: str):
    def deco(factory):
        GENERATORS[name] = factory
        return factory

    return deco


@register_generator("random-walk")
def _random_walk(params: Mapping[str, Any]) -> Lmc:
    if params:
        raise ValidationError(f"random-walk takes no parameters, got {sorted(params)!r}")
    return RandomWalk()


def builtin_lmc(name: str, params: Mapping[str, Any] | None = None) -> Lmc:
    try:
        factory = GENERATORS[name]
    except KeyError:
        known = ", ".join(sorted(GENERATORS))
        raise UnknownGenerator(f"unknown generator {name!r} (known: {known})") from None
    return factory(dict(params or {}))


def load_lmc(text: bytes | str) -> Lmc:
    """Load an LMC document (see README for the format)."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"LMC document is not UTF-8: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.pos) from None
    if not isinstance(doc, dict):
        raise ParseError("LMC document must be a JSON object")
    if "generator" in doc:
        params = doc.get("params", {})
        if not isinstance(doc["generator"], str) or not isinstance(params, dict):
            raise ParseError('"generator" must be a string and "params" an object')
        return builtin_lmc(doc["generator"], params)
    states = doc.get("states")
    if not isinstance(states, list):
        raise ParseError('LMC document needs a "states" list or a "generator" name')
    labels: dict[str, str] = {}
    transitions: dict[str, dict[str, Fraction]] = {}
    for entry in states:
        if not isinstance(entry, dict) or not isinstance(entry.get("id"), str):
            raise ParseError('every state needs a string "id"')
        sid = entry["id"]
        if sid in labels:
            raise ValidationError(f"duplicate state {sid!r}")
        if not isinstance(entry.get("label"), str):
            raise ParseError(f'state {sid!r} needs a string "label"')
        labels[sid] = entry["label"]
        edges = entry.get("transitions", [])
        if not isinstance(edges, list):
            raise ParseError(f'state {sid!r}: "transitions" must be a list')
        succ: dict[str, Fraction] = {}
        for edge in edges:
            if not isinstance(edge, dict) or not isinstance(edge.get("to"), str) or "prob" not in edge:
                raise ParseError(f'state {sid!r}: transitions need "to" and "prob"')
            if edge["to"] in succ:
                raise ValidationError(f"state {sid!r}: duplicate transition to {edge['to']!r}")
            succ[edge["to"]] = parse_rational(edge["prob"])
        transitions[sid] = succ
    return FiniteLmc(labels, transitions)
