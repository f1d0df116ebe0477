"""Pure-Python fraction-free simplex kernel.

The tableau ``T`` is a list of rows of Python ints: constraint rows first,
the objective row last, right-hand side in the last column.  Every entry is
the true tableau entry multiplied by the common positive integer ``D`` (the
current basis determinant), so pivots stay integral and exact without any
gcd work.  ``_kernel.pyx`` implements the same two functions.
"""

OPTIMAL = 0
UNBOUNDED = 1


def pivot(T, basis, r, c, D):
    """Pivot on ``T[r][c]``; returns the new common denominator."""
    p = T[r][c]
    prow = T[r]
    width = len(prow)
    for i in range(len(T)):
        if i == r:
            continue
        row = T[i]
        f = row[c]
        if f == 0:
            if p != D:
                for j in range(width):
                    a = row[j]
                    if a:
                        row[j] = (p * a) // D
        else:
            for j in range(width):
                row[j] = (p * row[j] - f * prow[j]) // D
    basis[r] = c
    if p < 0:
        for row in T:
            for j in range(width):
                row[j] = -row[j]
        return -p
    return p


def iterate(T, basis, D):
    """Run primal simplex with Bland's rule from a feasible basis.

    Returns ``(status, D)``.  The objective row holds negated reduced costs,
    so the basis is optimal once no entry (rhs excluded) is negative.
    """
    m = len(T) - 1
    obj = T[m]
    rhs = len(obj) - 1
    while True:
        c = -1
        for j in range(rhs):
            if obj[j] < 0:
                c = j
                break
        if c < 0:
            return OPTIMAL, D
        r = -1
        best_num = 0
        best_den = 1
        for i in range(m):
            a = T[i][c]
            if a > 0:
                b = T[i][rhs]
                if r < 0:
                    r, best_num, best_den = i, b, a
                    continue
                lhs = b * best_den
                rhs_cmp = best_num * a
                if lhs < rhs_cmp or (lhs == rhs_cmp and basis[i] < basis[r]):
                    r, best_num, best_den = i, b, a
        if r < 0:
            return UNBOUNDED, D
        D = pivot(T, basis, r, c, D)
        obj = T[m]
