"""Small dense two-phase simplex over the rationals (Bland's rule).

Solves ``maximize c.x  subject to  A x <= b`` with free variables.  The
problems met in this package have a handful of variables and a few dozen
constraints, so a dense ``Fraction`` tableau is simple and exact.  Float
inputs are converted to exact binary fractions, so the answer is exact for
the data as given.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: tuple[Fraction, ...] | None = None
    value: Fraction | None = None
    ray: tuple[Fraction, ...] | None = None


def _pivot(t: list[list[Fraction]], basis: list[int], r: int, col: int) -> None:
    p = t[r][col]
    row = [v / p for v in t[r]] if p != 1 else t[r]
    t[r] = row
    nz = [j for j, v in enumerate(row) if v]  # tableaus are sparse; skip zero columns
    for i in range(len(t)):
        if i != r:
            k = t[i][col]
            if k:
                target = t[i]
                for j in nz:
                    target[j] = target[j] - k * row[j]
    basis[r] = col


def _run(t: list[list[Fraction]], basis: list[int], allowed: int) -> tuple[str, int | None]:
    """Maximize the objective held in the last row (stored as ``-c``)."""
    obj = t[-1]
    while True:
        obj = t[-1]
        col = next((j for j in range(allowed) if obj[j] < 0), None)
        if col is None:
            return "optimal", None
        best = None
        for i in range(len(t) - 1):
            a = t[i][col]
            if a > 0:
                ratio = t[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return "unbounded", col
        _pivot(t, basis, best[1], col)


def maximize(c: Sequence, a: Sequence[Sequence], b: Sequence) -> LPResult:
    n = len(c)
    m = len(a)
    cq = [Fraction(v) for v in c]
    aq = [[Fraction(v) for v in row] for row in a]
    bq = [Fraction(v) for v in b]
    if m == 0:
        if any(cq):
            ray = tuple(cq)
            return LPResult("unbounded", ray=ray)
        return LPResult("optimal", tuple(Fraction(0) for _ in range(n)), Fraction(0))

    # columns: x+ (n), x- (n), slack (m), artificial (m)
    nv = 2 * n + m
    width = nv + m + 1
    t: list[list[Fraction]] = []
    basis: list[int] = []
    for i in range(m):
        sgn = -1 if bq[i] < 0 else 1
        row = [Fraction(0)] * width
        for j in range(n):
            row[j] = sgn * aq[i][j]
            row[n + j] = -sgn * aq[i][j]
        row[2 * n + i] = Fraction(sgn)
        row[nv + i] = Fraction(1)
        row[-1] = sgn * bq[i]
        t.append(row)
        basis.append(nv + i)

    # phase 1: maximize -sum(artificials)
    obj = [Fraction(0)] * width
    for i in range(m):
        obj[nv + i] = Fraction(1)
    for i in range(m):
        obj = [o - v for o, v in zip(obj, t[i])]
    t.append(obj)
    _run(t, basis, nv + m)
    if t[-1][-1] != 0:
        return LPResult("infeasible")
    # drive remaining artificials out of the basis
    for i in range(m):
        if basis[i] >= nv:
            col = next((j for j in range(nv) if t[i][j] != 0), None)
            if col is not None:
                _pivot(t, basis, i, col)
    keep = [i for i in range(m) if basis[i] < nv]
    t = [t[i][:nv] + [t[i][-1]] for i in keep]
    basis = [basis[i] for i in keep]

    # phase 2
    obj = [Fraction(0)] * (nv + 1)
    for j in range(n):
        obj[j] = -cq[j]
        obj[n + j] = cq[j]
    for i, bcol in enumerate(basis):
        k = obj[bcol]
        if k:
            obj = [o - k * v for o, v in zip(obj, t[i])]
    t.append(obj)
    status, col = _run(t, basis, nv)
    vals = [Fraction(0)] * nv
    for i, bcol in enumerate(basis):
        vals[bcol] = t[i][-1]
    x = tuple(vals[j] - vals[n + j] for j in range(n))
    if status == "unbounded":
        assert col is not None
        d = [Fraction(0)] * nv
        d[col] = Fraction(1)
        for i, bcol in enumerate(basis):
            d[bcol] = -t[i][col]
        ray = tuple(d[j] - d[n + j] for j in range(n))
        return LPResult("unbounded", x, None, ray)
    return LPResult("optimal", x, t[-1][-1])
