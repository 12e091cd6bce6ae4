"""Exact rational linear algebra: the few kernels the module layer needs.

Everything is lists of Fractions; sizes here are tiny (module dimensions),
so clarity wins over asymptotics.
"""

from __future__ import annotations

from fractions import Fraction

Vec = list[Fraction]
Mat = list[list[Fraction]]

__all__ = ["identity", "mat_mul", "mat_vec", "transpose", "rref", "nullspace"]


def identity(m: int) -> Mat:
    return [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]


def mat_mul(a: Mat, b: Mat) -> Mat:
    rows, mid, cols = len(a), len(b), len(b[0])
    out = [[Fraction(0)] * cols for _ in range(rows)]
    for i in range(rows):
        ai = a[i]
        oi = out[i]
        for k in range(mid):
            c = ai[k]
            if c:
                bk = b[k]
                for j in range(cols):
                    if bk[j]:
                        oi[j] += c * bk[j]
    return out


def mat_vec(a: Mat, v: Vec) -> Vec:
    return [sum((c * x for c, x in zip(row, v) if c), Fraction(0)) for row in a]


def transpose(a: Mat) -> Mat:
    return [list(col) for col in zip(*a)]


def rref(mat: Mat) -> tuple[Mat, list[int]]:
    """Reduced row echelon form and its pivot columns, exactly."""
    a = [list(row) for row in mat]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def nullspace(mat: Mat, cols: int | None = None) -> list[Vec]:
    """Canonical basis of {v : mat v = 0}: one vector per free column,
    with a 1 in its free coordinate, ordered by that coordinate."""
    if not mat:
        m = cols if cols is not None else 0
        return [
            [Fraction(int(i == j)) for i in range(m)] for j in range(m)
        ]
    m = len(mat[0])
    red, pivots = rref(mat)
    free = [c for c in range(m) if c not in pivots]
    out = []
    for fc in free:
        v = [Fraction(0)] * m
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        out.append(v)
    return out
