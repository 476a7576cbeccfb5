"""Row reduction over the rationals."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def rref(rows: Sequence[Sequence[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns.

    The last column may be an augmented right-hand side; callers pass
    ``ncols`` as the number of coefficient columns so that a pivot is never
    taken there (an inconsistent row then shows up as ``[0 ... 0 | b]``).
    """
    m = [list(map(Fraction, r)) for r in rows]
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][col]
        if p != 1:
            m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                k = m[i][col]
                m[i] = [a - k * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m, pivots


def solve_affine(
    a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]
) -> tuple[list[Fraction], list[list[Fraction]], list[int]] | None:
    """All solutions of ``a x = b`` as ``(particular, nullspace basis, free columns)``.

    The particular solution sets every free variable to zero; the basis
    vector for free column ``j`` has a 1 in position ``j`` and zeros in the
    other free positions.  Returns ``None`` when the system is inconsistent.
    """
    n = len(a[0]) if a else 0
    aug = [list(row) + [rhs] for row, rhs in zip(a, b)]
    m, pivots = rref(aug, n)
    for row in m[len(pivots):]:
        if row[n] != 0:
            return None
    free = [j for j in range(n) if j not in set(pivots)]
    x = [Fraction(0)] * n
    for i, pc in enumerate(pivots):
        x[pc] = m[i][n]
    basis = []
    for j in free:
        v = [Fraction(0)] * n
        v[j] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][j]
        basis.append(v)
    return x, basis, free


def solve_square(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[Fraction] | None:
    """Unique solution of a square system, or ``None`` if singular."""
    n = len(a)
    m, pivots = rref([list(r) + [v] for r, v in zip(a, b)], n)
    if len(pivots) < n:
        return None
    return [m[i][n] for i in range(n)]


def inverse(a: Sequence[Sequence[Fraction]]) -> list[list[Fraction]] | None:
    n = len(a)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    m, pivots = rref(aug, n)
    if len(pivots) < n:
        return None
    return [row[n:] for row in m]
