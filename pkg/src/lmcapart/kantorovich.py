"""Kleene approximants of the behavioural distance.

``distance(lmc, x, y, i)`` is the i-th iterate of the one-step functional
applied to the zero pseudometric.  Each iterate above zero is either 1 (the
labels differ) or the optimum of a small LP over maps ``h`` on the joint
successor support that are non-expansive for the previous iterate.  Values are
memoised per (depth, unordered pair) in a :class:`DistanceTable`, and the
recursion only visits pairs reachable within ``depth`` steps, so lazily
generated (infinite) chains work too.

:func:`coupling_value` and :func:`full_space_step` are independent
formulations (transport plans; maps over the whole state space) kept as
cross-checks for the LP built here.
"""

from __future__ import annotations

import enum
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NotNonexpansive
from .lp import LinearProgram, Status, solve
from .model import FiniteLmc, Lmc, StateId, joint_support

ZERO = Fraction(0)
ONE = Fraction(1)


class StepKind(str, enum.Enum):
    LABEL_CLASH = "label-clash"
    LP = "lp"
    ZERO = "zero"


@dataclass(frozen=True)
class OptimalStep:
    """Value of one functional application at an ordered pair, with its optimiser.

    For ``LP`` steps ``h`` is an optimal map on the joint support; for ``ZERO``
    steps the two successor distributions coincide and ``h`` is constantly 0.
    """

    value: Fraction
    h: Mapping[StateId, Fraction] = field(default_factory=dict)
    kind: StepKind = StepKind.LP

    def swapped(self) -> "OptimalStep":
        if self.kind is StepKind.LP:
            return OptimalStep(self.value, {z: ONE - v for z, v in self.h.items()}, self.kind)
        return self


def _pair_key(x, y):
    return (x, y) if x <= y else (y, x)


class DistanceTable:
    """Memo of iterate values keyed by (depth, unordered state pair)."""

    def __init__(self, lmc: Lmc):
        self.lmc = lmc
        self._values: dict[tuple[int, tuple], Fraction] = {}
        self._steps: dict[tuple[int, tuple], tuple[tuple, OptimalStep]] = {}

    def value(self, depth: int, x: StateId, y: StateId) -> Fraction:
        if depth < 0:
            raise ValueError("depth must be non-negative")
        if depth == 0 or x == y:
            return ZERO
        key = (depth, _pair_key(x, y))
        cached = self._values.get(key)
        if cached is None:
            cached = gamma_step(self, depth - 1, x, y).value
        return cached

    def cached_step(self, depth: int, x: StateId, y: StateId):
        """The memoised step at ``depth`` as ``(orientation, step)``, or None."""
        return self._steps.get((depth, _pair_key(x, y)))

    def _store(self, depth, x, y, step):
        key = (depth, _pair_key(x, y))
        self._steps[key] = ((x, y), step)
        self._values[key] = step.value

    def entries(self) -> dict[tuple[int, tuple], Fraction]:
        return dict(self._values)

    def __len__(self):
        return len(self._values)


def gamma_step(table: DistanceTable, depth_prev: int, x: StateId, y: StateId) -> OptimalStep:
    """One application of the functional at ``(x, y)`` against depth ``depth_prev``.

    Missing values at ``depth_prev`` are computed on demand.
    """
    depth = depth_prev + 1
    memo = table.cached_step(depth, x, y)
    if memo is not None:
        orientation, step = memo
        return step if orientation == (x, y) else step.swapped()
    lmc = table.lmc
    if lmc.label(x) != lmc.label(y):
        step = OptimalStep(ONE, {}, StepKind.LABEL_CLASH)
        table._store(depth, x, y, step)
        return step
    mu, nu = lmc.step(x), lmc.step(y)
    support = joint_support(lmc, x, y)
    objective = [mu.prob(z) - nu.prob(z) for z in support]
    if not any(objective):
        step = OptimalStep(ZERO, {z: ZERO for z in support}, StepKind.ZERO)
        table._store(depth, x, y, step)
        return step
    lp = nonexpansive_lp(support, objective, lambda u, v: table.value(depth_prev, u, v))
    sol = solve(lp)
    assert sol.status is Status.OPTIMAL
    h = dict(zip(support, sol.witness))
    step = OptimalStep(sol.optimum, h, StepKind.LP)
    table._store(depth, x, y, step)
    return step


def nonexpansive_lp(
    support: list[StateId],
    objective: list[Fraction],
    d: Callable[[StateId, StateId], Fraction],
    *,
    prune: bool = True,
) -> LinearProgram:
    """LP maximising ``objective . h`` over maps ``h: support -> [0, 1]`` with
    ``|h(u) - h(v)| <= d(u, v)``.

    With ``prune`` the rows for pairs at distance >= 1 are dropped, as the box
    rows already imply them.
    """
    n = len(support)
    rows = []
    for i in range(n):
        unit = [ZERO] * n
        unit[i] = ONE
        rows.append((unit, ONE))
    for i in range(n):
        for j in range(i + 1, n):
            dist = d(support[i], support[j])
            if prune and dist >= 1:
                continue
            fwd = [ZERO] * n
            fwd[i], fwd[j] = ONE, -ONE
            bwd = [ZERO] * n
            bwd[i], bwd[j] = -ONE, ONE
            rows.append((fwd, dist))
            rows.append((bwd, dist))
    return LinearProgram(tuple(objective), tuple(rows))


def distance(lmc: Lmc, x: StateId, y: StateId, depth: int, table: DistanceTable | None = None) -> Fraction:
    """The depth-th Kleene iterate at ``(x, y)``."""
    if table is None:
        table = DistanceTable(lmc)
    lmc.require_state(x)
    lmc.require_state(y)
    return table.value(depth, x, y)


def distance_until(
    lmc: Lmc,
    x: StateId,
    y: StateId,
    delta: Fraction,
    max_depth: int = 64,
    table: DistanceTable | None = None,
) -> tuple[Fraction, int]:
    """Iterate until the successive difference at ``(x, y)`` drops below ``delta``.

    Heuristic only: a small increment says nothing about the remaining gap to
    the limit.  Identical states (always 0) and differently labelled states
    (always 1) stop at depth 1.  Otherwise the first iterate is 0 by
    construction, so differences are compared from depth 2 onwards.
    Returns ``(value, depth)``; ``depth == max_depth`` means the cap was hit.
    """
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    if table is None:
        table = DistanceTable(lmc)
    lmc.require_state(x)
    lmc.require_state(y)
    if max_depth < 1:
        return ZERO, 0
    if x == y:
        return ZERO, 1
    if lmc.label(x) != lmc.label(y):
        return ONE, 1
    prev = table.value(1, x, y)
    for i in range(2, max_depth + 1):
        cur = table.value(i, x, y)
        if cur - prev < delta:
            return cur, i
        prev = cur
    return prev, max_depth


def _as_distance(d) -> Callable[[StateId, StateId], Fraction]:
    if callable(d):
        return d

    def lookup(u, v):
        if u == v:
            return d.get((u, v), ZERO)
        return d[(u, v)] if (u, v) in d else d[(v, u)]

    return lookup


def coupling_value(lmc: Lmc, x: StateId, y: StateId, d) -> Fraction:
    """Minimal expected ``d``-cost over couplings of the successor distributions.

    ``d`` is a callable ``(u, v) -> Fraction`` or a mapping keyed by pairs.
    """
    dist = _as_distance(d)
    mu, nu = lmc.step(x), lmc.step(y)
    rows_u, cols_v = mu.support(), nu.support()
    n = len(rows_u) * len(cols_v)
    cost = []
    for u in rows_u:
        for v in cols_v:
            cost.append(-Fraction(dist(u, v)))
    eqs = []
    for i, u in enumerate(rows_u):
        coeffs = [ZERO] * n
        for j in range(len(cols_v)):
            coeffs[i * len(cols_v) + j] = ONE
        eqs.append((coeffs, mu[u]))
    for j, v in enumerate(cols_v):
        coeffs = [ZERO] * n
        for i in range(len(rows_u)):
            coeffs[i * len(cols_v) + j] = ONE
        eqs.append((coeffs, nu[v]))
    sol = solve(LinearProgram(tuple(cost), (), tuple(eqs)))
    assert sol.status is Status.OPTIMAL
    return -sol.optimum


def full_space_step(table: DistanceTable, depth_prev: int, x: StateId, y: StateId) -> Fraction:
    """Same value as :func:`gamma_step`, but with ``h`` ranging over every state.

    Only for finite chains; every pair contributes its constraint rows.
    """
    lmc = table.lmc
    if not isinstance(lmc, FiniteLmc):
        raise TypeError("full_space_step needs a finite LMC")
    if lmc.label(x) != lmc.label(y):
        return ONE
    states = lmc.states()
    mu, nu = lmc.step(x), lmc.step(y)
    objective = [mu.prob(z) - nu.prob(z) for z in states]
    lp = nonexpansive_lp(states, objective, lambda u, v: table.value(depth_prev, u, v), prune=False)
    sol = solve(lp)
    assert sol.status is Status.OPTIMAL
    return sol.optimum


def extend_nonexpansive(
    h: Mapping[StateId, Fraction],
    d,
    states: Iterable[StateId],
) -> dict[StateId, Fraction]:
    """Extend ``h`` from its domain to ``states`` via ``min_z min(1, h(z) + d(x, z))``.

    The result agrees with ``h`` on its domain and is non-expansive for ``d``
    whenever ``h`` is and ``d`` is a pseudometric bounded by 1.
    """
    dist = _as_distance(d)
    dom = list(h)
    for i, u in enumerate(dom):
        for v in dom[i + 1:]:
            if abs(h[u] - h[v]) > dist(u, v):
                raise NotNonexpansive(
                    f"|h({u!r}) - h({v!r})| = {abs(h[u] - h[v])} exceeds d = {dist(u, v)}"
                )
    return {
        s: min(min(ONE, Fraction(h[z]) + dist(s, z)) for z in dom)
        for s in states
    }


def distance_matrix(lmc: FiniteLmc, depth: int, table: DistanceTable | None = None) -> dict[tuple, Fraction]:
    """All ordered pairs of a finite chain at ``depth``."""
    if table is None:
        table = DistanceTable(lmc)
    states = lmc.states()
    return {(u, v): table.value(depth, u, v) for u in states for v in states}
