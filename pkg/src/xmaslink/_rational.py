"""Exact rational linear algebra for small systems.

Everything here works on Python ints / fractions.Fraction so that matrix
certificates never depend on floating point. Sizes are tiny (wire counts
of a bus, n <= 16 or so), so dense Gaussian elimination is plenty.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd


def frac_matrix(rows):
    """Copy a nested iterable into a list-of-lists of Fractions."""
    return [[Fraction(x) for x in row] for row in rows]


def rank(mat) -> int:
    """Rank over the rationals via fraction-free row echelon."""
    m = frac_matrix(mat)
    if not m:
        return 0
    n_rows, n_cols = len(m), len(m[0])
    r = 0
    for c in range(n_cols):
        piv = next((i for i in range(r, n_rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][c]
        for i in range(r + 1, n_rows):
            if m[i][c] == 0:
                continue
            f = m[i][c] / inv
            for j in range(c, n_cols):
                m[i][j] -= f * m[r][j]
        r += 1
        if r == n_rows:
            break
    return r


def nullspace(mat):
    """Basis of the right nullspace {x : mat @ x = 0}, as Fraction columns.

    Returns a list of length-n_cols lists; empty list when the kernel is
    trivial.
    """
    m = frac_matrix(mat)
    if not m:
        return []
    n_rows, n_cols = len(m), len(m[0])
    # reduced row echelon
    pivots = []
    r = 0
    for c in range(n_cols):
        piv = next((i for i in range(r, n_rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][c]
        m[r] = [x / inv for x in m[r]]
        for i in range(n_rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n_cols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fc]
        basis.append(v)
    return basis


def primitive(vec):
    """Scale a rational vector to the smallest integer vector, gcd 1.

    Sign convention: first nonzero entry positive. Zero vectors pass
    through unchanged.
    """
    denoms = [Fraction(x).denominator for x in vec]
    lcm = 1
    for d in denoms:
        lcm = lcm * d // gcd(lcm, d)
    ints = [int(Fraction(x) * lcm) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g > 1:
        ints = [x // g for x in ints]
    lead = next((x for x in ints if x != 0), 0)
    if lead < 0:
        ints = [-x for x in ints]
    return ints


def smallest_integer_vectors(basis, coeff_bound: int = 6, entry_bound: int | None = None):
    """Integer vectors in span(basis), ordered by (l1 norm, lex).

    Enumerates integer-combination coefficients in [-coeff_bound, coeff_bound]
    of the primitive-scaled basis, drops the zero vector and sign duplicates,
    and optionally rejects vectors with |entry| > entry_bound. Fine for the
    1- and 2-dimensional subspaces this package meets; not a general lattice
    reduction.
    """
    prim = [primitive(b) for b in basis]
    prim = [p for p in prim if any(p)]
    if not prim:
        return []
    seen = set()
    out = []
    ranges = [range(-coeff_bound, coeff_bound + 1)] * len(prim)
    for coeffs in itertools.product(*ranges):
        if all(c == 0 for c in coeffs):
            continue
        v = [sum(c * p[i] for c, p in zip(coeffs, prim)) for i in range(len(prim[0]))]
        if not any(v):
            continue
        v = tuple(primitive(v))
        if v in seen:
            continue
        seen.add(v)
        if entry_bound is not None and max(abs(x) for x in v) > entry_bound:
            continue
        out.append(v)
    out.sort(key=lambda v: (sum(abs(x) for x in v), v))
    return out


def matmul_int(a, b):
    """Integer matrix product of nested lists / arrays (exact)."""
    a = [[int(x) for x in row] for row in a]
    b = [[int(x) for x in row] for row in b]
    if not a or not b:
        return []
    inner = len(b)
    assert all(len(row) == inner for row in a), "inner dimension mismatch"
    cols = len(b[0])
    return [
        [sum(row[k] * b[k][j] for k in range(inner)) for j in range(cols)]
        for row in a
    ]
