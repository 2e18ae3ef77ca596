"""Integer matrix normal forms over arbitrary-precision ints.

Row-style Hermite normal form with its unimodular transformation, Smith
normal form, and the kernel / left-kernel lattices derived from them.  No
floating point and no modular arithmetic anywhere; matrices are lists of
lists of Python ints.
"""

from __future__ import annotations

from fractions import Fraction


def _copy(m):
    return [row[:] for row in m]


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    if not a or not b:
        return [[] for _ in a]
    cols = len(b[0])
    out = []
    for row in a:
        acc = [0] * cols
        for k, x in enumerate(row):
            if x:
                brow = b[k]
                for j in range(cols):
                    acc[j] += x * brow[j]
        out.append(acc)
    return out


def mat_vec(a, v):
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def transpose(m):
    if not m:
        return []
    return [list(col) for col in zip(*m)]


def hnf_row(m):
    """Return (H, U) with U unimodular, U*M = H in row Hermite normal form.

    Pivots are positive, entries above a pivot are reduced into [0, pivot),
    zero rows are collected at the bottom.
    """
    h = _copy(m)
    rows = len(h)
    cols = len(h[0]) if rows else 0
    u = identity(rows)
    r = 0
    for c in range(cols):
        # find a nonzero entry in column c at or below row r
        piv = None
        for i in range(r, rows):
            if h[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        h[r], h[piv] = h[piv], h[r]
        u[r], u[piv] = u[piv], u[r]
        # euclidean elimination below the pivot
        while True:
            done = True
            for i in range(r + 1, rows):
                if h[i][c] != 0:
                    done = False
                    q = h[i][c] // h[r][c]
                    if q:
                        h[i] = [x - q * y for x, y in zip(h[i], h[r])]
                        u[i] = [x - q * y for x, y in zip(u[i], u[r])]
                    if h[i][c] != 0:
                        h[r], h[i] = h[i], h[r]
                        u[r], u[i] = u[i], u[r]
            if done:
                break
        if h[r][c] < 0:
            h[r] = [-x for x in h[r]]
            u[r] = [-x for x in u[r]]
        for i in range(r):
            q = h[i][c] // h[r][c]
            if q:
                h[i] = [x - q * y for x, y in zip(h[i], h[r])]
                u[i] = [x - q * y for x, y in zip(u[i], u[r])]
        r += 1
        if r == rows:
            break
    return h, u


def hnf(m):
    return hnf_row(m)[0]


def rank(m):
    h = hnf(m)
    return sum(1 for row in h if any(row))


def left_kernel(m):
    """Basis (list of rows) of {x in Z^rows : x*M = 0}, HNF-canonical.

    The left kernel of an integer matrix is a saturated sublattice, so this
    basis is automatically primitive.
    """
    h, u = hnf_row(m)
    ker = [u[i] for i in range(len(h)) if not any(h[i])]
    if not ker:
        return []
    canon = [row for row in hnf(ker) if any(row)]
    return canon


def kernel(m):
    """Basis of {x in Z^cols : M*x = 0} as a list of row vectors."""
    return left_kernel(transpose(m))


def smith_normal_form(m):
    """Diagonal invariant factors d_1 | d_2 | ... of M (nonzero ones only)."""
    a = _copy(m)
    rows = len(a)
    cols = len(a[0]) if rows else 0
    diag = []
    t = 0
    while t < rows and t < cols:
        # locate a nonzero pivot
        piv = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j] != 0:
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            break
        i0, j0 = piv
        a[t], a[i0] = a[i0], a[t]
        for row in a:
            row[t], row[j0] = row[j0], row[t]
        while True:
            # clear column t
            changed = False
            for i in range(t + 1, rows):
                while a[i][t] != 0:
                    q = a[t][t] // a[i][t] if abs(a[i][t]) <= abs(a[t][t]) else 0
                    if abs(a[i][t]) < abs(a[t][t]) or a[t][t] == 0:
                        a[t], a[i] = a[i], a[t]
                        changed = True
                        continue
                    q = a[i][t] // a[t][t]
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    changed = True
            # clear row t
            for j in range(t + 1, cols):
                while a[t][j] != 0:
                    if abs(a[t][j]) < abs(a[t][t]) or a[t][t] == 0:
                        for row in a:
                            row[t], row[j] = row[j], row[t]
                        changed = True
                        continue
                    q = a[t][j] // a[t][t]
                    for row in a:
                        row[j] -= q * row[t]
                    changed = True
            if not changed:
                break
        if a[t][t] == 0:
            break
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
        # enforce divisibility d_t | a[i][j] for the trailing block
        fixed = False
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if a[i][j] % a[t][t] != 0:
                    a[t] = [x + y for x, y in zip(a[t], a[i])]
                    fixed = True
                    break
            if fixed:
                break
        if fixed:
            continue
        diag.append(a[t][t])
        t += 1
    return diag


def lattices_equal(a, b) -> bool:
    """Whether two row-span lattices in Z^n coincide."""
    ha = [row for row in hnf(a)] if a else []
    hb = [row for row in hnf(b)] if b else []
    ha = [row for row in ha if any(row)]
    hb = [row for row in hb if any(row)]
    return ha == hb


def in_lattice(vec, basis) -> bool:
    """Whether an integer vector lies in the row-span lattice of basis."""
    if not basis:
        return not any(vec)
    # solve x * basis = vec over Q, then check integrality
    rows = len(basis)
    cols = len(basis[0])
    aug = [[Fraction(basis[i][j]) for i in range(rows)] for j in range(cols)]
    rhs = [Fraction(v) for v in vec]
    # gaussian elimination on the cols x rows system
    x = [Fraction(0)] * rows
    pivots = []
    r = 0
    for c in range(rows):
        piv = None
        for i in range(r, cols):
            if aug[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        rhs[r], rhs[piv] = rhs[piv], rhs[r]
        inv = 1 / aug[r][c]
        aug[r] = [v * inv for v in aug[r]]
        rhs[r] = rhs[r] * inv
        for i in range(cols):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [v - f * w for v, w in zip(aug[i], aug[r])]
                rhs[i] = rhs[i] - f * rhs[r]
        pivots.append(c)
        r += 1
    for i in range(r, cols):
        if rhs[i] != 0:
            return False
    for idx, c in enumerate(pivots):
        x[c] = rhs[idx]
    for v in x:
        if v.denominator != 1:
            return False
    return True
