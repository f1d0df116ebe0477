import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lmcapart import lp as lp_mod
from lmcapart.lp import LinearProgram, Status, available_kernels, check_witness, solve

KERNELS = sorted(available_kernels().items())


def _solve_square(A, b):
    """Exact Gauss-Jordan; None when singular."""
    n = len(A)
    M = [list(row) + [rhs] for row, rhs in zip(A, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col] / M[col][col]
                M[r] = [a - f * c for a, c in zip(M[r], M[col])]
    return [M[i][n] / M[i][i] for i in range(n)]


def vertex_oracle(lp):
    """Max over all basic feasible points; only valid for bounded feasible regions."""
    n = lp.n_vars
    rows = [(list(c), r) for c, r in lp.inequalities]
    rows += [([Fraction(int(i == j)) * -1 for j in range(n)], Fraction(0)) for i in range(n)]
    eqs = [(list(c), r) for c, r in lp.equalities]
    best = None
    k = n - len(eqs)
    if k < 0:
        return None
    for tight in itertools.combinations(rows, k):
        sys_rows = eqs + list(tight)
        v = _solve_square([r[0] for r in sys_rows], [r[1] for r in sys_rows])
        if v is None or not check_witness(lp, v):
            continue
        val = sum(c * x for c, x in zip(lp.objective, v))
        best = val if best is None else max(best, val)
    return best


def random_bounded_lp(rng, n, m, with_eq=False):
    box = [([Fraction(int(i == j)) for j in range(n)], Fraction(rng.randint(1, 5))) for i in range(n)]
    rows = [
        ([Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(n)], Fraction(rng.randint(-3, 6), rng.randint(1, 2)))
        for _ in range(m)
    ]
    eqs = ()
    if with_eq:
        eqs = (([Fraction(rng.randint(0, 2)) for _ in range(n)], Fraction(rng.randint(0, 3))),)
    obj = [Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(n)]
    return LinearProgram(tuple(obj), tuple(box + rows), eqs)


def test_backend_reported():
    assert lp_mod.BACKEND in ("cython", "python")
    assert "python" in available_kernels()


@pytest.mark.parametrize("name, kernel", KERNELS)
def test_simple_optimum(name, kernel):
    lp = LinearProgram((1, 1), (((1, 0), 1), ((0, 1), Fraction(1, 2)), ((1, 1), Fraction(5, 4))))
    sol = solve(lp, kernel_module=kernel)
    assert sol.status is Status.OPTIMAL
    assert sol.optimum == Fraction(5, 4)
    assert check_witness(lp, sol.witness)


@pytest.mark.parametrize("name, kernel", KERNELS)
def test_infeasible(name, kernel):
    lp = LinearProgram((1,), (((1,), 1),), (((1,), 2),))
    assert solve(lp, kernel_module=kernel).status is Status.INFEASIBLE


@pytest.mark.parametrize("name, kernel", KERNELS)
def test_unbounded(name, kernel):
    lp = LinearProgram((1, 0), (((-1, 1), 1),))
    assert solve(lp, kernel_module=kernel).status is Status.UNBOUNDED


@pytest.mark.parametrize("name, kernel", KERNELS)
def test_negative_rhs_needs_phase_one(name, kernel):
    # v1 >= 1/2, v1 <= 1, minimise v1
    lp = LinearProgram((-1,), (((-1,), Fraction(-1, 2)), ((1,), 1)))
    sol = solve(lp, kernel_module=kernel)
    assert sol.optimum == Fraction(-1, 2)
    assert sol.witness == (Fraction(1, 2),)


@pytest.mark.parametrize("name, kernel", KERNELS)
def test_redundant_equalities(name, kernel):
    lp = LinearProgram((1, 2), (), (((1, 1), 1), ((2, 2), 2)))
    sol = solve(lp, kernel_module=kernel)
    assert sol.optimum == 2 and sol.witness == (0, 1)


def test_degenerate_cycling_example():
    # Beale's example cycles under the textbook largest-coefficient rule
    obj = (Fraction(3, 4), -150, Fraction(1, 50), -6)
    rows = (
        ((Fraction(1, 4), -60, Fraction(-1, 25), 9), 0),
        ((Fraction(1, 2), -90, Fraction(-1, 50), 3), 0),
        ((0, 0, 1, 0), 1),
    )
    sol = solve(LinearProgram(obj, rows))
    assert sol.optimum == Fraction(1, 20)


def test_row_length_validation():
    with pytest.raises(ValueError):
        LinearProgram((1, 2), (((1,), 1),))


@pytest.mark.parametrize("seed", range(60))
def test_against_vertex_oracle(seed):
    rng = random.Random(seed)
    lp = random_bounded_lp(rng, rng.randint(1, 3), rng.randint(0, 4), with_eq=seed % 3 == 0)
    expected = vertex_oracle(lp)
    for _, kernel in KERNELS:
        sol = solve(lp, kernel_module=kernel)
        if expected is None:
            assert sol.status is Status.INFEASIBLE
        else:
            assert sol.status is Status.OPTIMAL
            assert sol.optimum == expected
            assert check_witness(lp, sol.witness)


@settings(max_examples=150, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_kernels_agree(seed):
    rng = random.Random(seed)
    lp = random_bounded_lp(rng, rng.randint(1, 5), rng.randint(0, 6), with_eq=rng.random() < 0.3)
    sols = [solve(lp, kernel_module=k) for _, k in KERNELS]
    assert len({(s.status, s.optimum, s.witness) for s in sols}) == 1


def test_pure_python_fallback_selected_by_env():
    import os
    import subprocess
    import sys

    code = "import lmcapart.lp as l; from lmcapart import distance, builtin_lmc; print(l.BACKEND, distance(builtin_lmc('random-walk'), 4, 6, 5))"
    env = dict(os.environ, LMCAPART_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout
    assert out.split() == ["python", "1/16"]
