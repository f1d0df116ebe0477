"""Exact two-phase simplex for small dense linear programs.

Solves ``maximize c.v  s.t.  A v <= b,  E v = f,  v >= 0`` over the rationals.
Rows are scaled to integers and pivoted fraction-free, so every intermediate
value is exact and no gcd is taken inside the pivot loop.  Bland's rule
guarantees termination on degenerate problems, which are the norm here
because many distances coincide.

The pivot loop lives in a compiled kernel when available and falls back to
an identical pure-Python kernel otherwise (set ``LMCAPART_PURE_PYTHON=1`` to
force the fallback).
"""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import _kernel_py

if os.environ.get("LMCAPART_PURE_PYTHON"):
    kernel = _kernel_py
else:
    try:
        from . import _kernel as kernel  # type: ignore[no-redef]
    except ImportError:
        kernel = _kernel_py

BACKEND = "cython" if kernel is not _kernel_py else "python"


def available_kernels() -> dict:
    """Name -> kernel module for every kernel importable in this install."""
    found = {"python": _kernel_py}
    try:
        from . import _kernel as compiled
    except ImportError:
        pass
    else:
        found["cython"] = compiled
    return found


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


Row = tuple[tuple[Fraction, ...], Fraction]


def _row(coeffs, rhs) -> Row:
    return tuple(Fraction(a) for a in coeffs), Fraction(rhs)


@dataclass(frozen=True)
class LinearProgram:
    objective: tuple[Fraction, ...]
    inequalities: tuple[Row, ...] = ()
    equalities: tuple[Row, ...] = ()
    n_vars: int = field(default=-1)

    def __post_init__(self):
        obj = tuple(Fraction(a) for a in self.objective)
        object.__setattr__(self, "objective", obj)
        n = len(obj) if self.n_vars < 0 else self.n_vars
        object.__setattr__(self, "n_vars", n)
        object.__setattr__(self, "inequalities", tuple(_row(a, b) for a, b in self.inequalities))
        object.__setattr__(self, "equalities", tuple(_row(a, b) for a, b in self.equalities))
        if len(obj) != n:
            raise ValueError(f"objective has {len(obj)} entries for {n} variables")
        for coeffs, _ in self.inequalities + self.equalities:
            if len(coeffs) != n:
                raise ValueError(f"constraint row has {len(coeffs)} entries for {n} variables")


@dataclass(frozen=True)
class LpSolution:
    status: Status
    optimum: Fraction | None = None
    witness: tuple[Fraction, ...] | None = None


def _lcm_den(values) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, v.denominator)
    return out


def check_witness(lp: LinearProgram, witness: Sequence[Fraction]) -> bool:
    """True iff ``witness`` satisfies every row and sign constraint exactly."""
    if len(witness) != lp.n_vars:
        return False
    if any(v < 0 for v in witness):
        return False
    for coeffs, rhs in lp.inequalities:
        if sum((a * v for a, v in zip(coeffs, witness)), Fraction(0)) > rhs:
            return False
    for coeffs, rhs in lp.equalities:
        if sum((a * v for a, v in zip(coeffs, witness)), Fraction(0)) != rhs:
            return False
    return True


def solve(lp: LinearProgram, *, kernel_module=None) -> LpSolution:
    k = kernel_module or kernel
    n = lp.n_vars
    n_ineq = len(lp.inequalities)
    rows: list[tuple[list[int], int, int, bool]] = []  # coeffs, rhs, slack sign, needs artificial
    for idx, (coeffs, rhs) in enumerate(lp.inequalities + lp.equalities):
        scale = _lcm_den(coeffs + (rhs,))
        ints = [int(a * scale) for a in coeffs]
        b = int(rhs * scale)
        slack = 1 if idx < n_ineq else 0
        if b < 0:
            ints = [-a for a in ints]
            b = -b
            slack = -slack
        rows.append((ints, b, slack, slack != 1))

    art_start = n + n_ineq
    n_art = sum(1 for r in rows if r[3])
    width = art_start + n_art + 1
    T: list[list[int]] = []
    basis: list[int] = []
    art = art_start
    for idx, (ints, b, slack, needs_art) in enumerate(rows):
        row = ints + [0] * (width - n)
        if idx < n_ineq:
            row[n + idx] = slack
        if needs_art:
            row[art] = 1
            basis.append(art)
            art += 1
        else:
            basis.append(n + idx)
        row[-1] = b
        T.append(row)
    D = 1

    if n_art:
        obj = [0] * width
        for j in range(art_start, art_start + n_art):
            obj[j] = 1
        for i, b_col in enumerate(basis):
            if b_col >= art_start:
                obj = [o - a for o, a in zip(obj, T[i])]
        T.append(obj)
        _, D = k.iterate(T, basis, D)
        if T[-1][-1] < 0:
            return LpSolution(Status.INFEASIBLE)
        T.pop()
        redundant = []
        for i in range(len(T)):
            if basis[i] < art_start:
                continue
            for j in range(art_start):
                if T[i][j] != 0:
                    D = k.pivot(T, basis, i, j, D)
                    break
            else:
                redundant.append(i)
        for i in reversed(redundant):
            del T[i]
            del basis[i]
        T = [row[:art_start] + row[-1:] for row in T]

    c_scale = _lcm_den(lp.objective)
    c_int = [int(a * c_scale) for a in lp.objective]
    base = [-a for a in c_int] + [0] * (art_start - n + 1)
    obj = [D * a for a in base]
    for i, b_col in enumerate(basis):
        coef = base[b_col]
        if coef:
            obj = [o - coef * a for o, a in zip(obj, T[i])]
    T.append(obj)
    status, D = k.iterate(T, basis, D)
    if status == k.UNBOUNDED:
        return LpSolution(Status.UNBOUNDED)
    witness = [Fraction(0)] * n
    for i, b_col in enumerate(basis):
        if b_col < n:
            witness[b_col] = Fraction(T[i][-1], D)
    optimum = sum((a * v for a, v in zip(lp.objective, witness)), Fraction(0))
    return LpSolution(Status.OPTIMAL, optimum, tuple(witness))


__all__ = [
    "BACKEND",
    "LinearProgram",
    "LpSolution",
    "Status",
    "available_kernels",
    "check_witness",
    "solve",
]
