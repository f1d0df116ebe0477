# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled fraction-free simplex kernel; mirrors ``_kernel_py`` exactly.

Entries stay arbitrary-precision Python ints, so the gain comes from typed
loop indices and list access rather than from native arithmetic.
"""

OPTIMAL = 0
UNBOUNDED = 1


cpdef object pivot(list T, list basis, Py_ssize_t r, Py_ssize_t c, object D):
    cdef list prow = <list>T[r]
    cdef list row
    cdef Py_ssize_t width = len(prow)
    cdef Py_ssize_t nrows = len(T)
    cdef Py_ssize_t i, j
    cdef object p = prow[c]
    cdef object f, a
    cdef bint rescale = p != D
    for i in range(nrows):
        if i == r:
            continue
        row = <list>T[i]
        f = row[c]
        if f == 0:
            if rescale:
                for j in range(width):
                    a = row[j]
                    if a:
                        row[j] = (p * a) // D
        else:
            for j in range(width):
                row[j] = (p * row[j] - f * prow[j]) // D
    basis[r] = c
    if p < 0:
        for i in range(nrows):
            row = <list>T[i]
            for j in range(width):
                row[j] = -row[j]
        return -p
    return p


cpdef tuple iterate(list T, list basis, object D):
    cdef Py_ssize_t m = len(T) - 1
    cdef list obj = <list>T[m]
    cdef Py_ssize_t rhs = len(obj) - 1
    cdef Py_ssize_t i, j, c, r
    cdef object a, b, best_num, best_den, lhs, rhs_cmp
    cdef list row
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
            row = <list>T[i]
            a = row[c]
            if a > 0:
                b = row[rhs]
                if r < 0:
                    r = i
                    best_num = b
                    best_den = a
                    continue
                lhs = b * best_den
                rhs_cmp = best_num * a
                if lhs < rhs_cmp or (lhs == rhs_cmp and basis[i] < basis[r]):
                    r = i
                    best_num = b
                    best_den = a
        if r < 0:
            return UNBOUNDED, D
        D = pivot(T, basis, r, c, D)
        obj = <list>T[m]
