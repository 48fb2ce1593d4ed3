"""Dense two-phase simplex over exact rationals (Bland's rule).

Small problems only: every pivot touches the full tableau.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


class LPInfeasible(Exception):
    pass


class LPUnbounded(Exception):
    pass


@dataclass(frozen=True)
class LPResult:
    x: tuple[Fraction, ...]
    objective: Fraction


def _pivot(rows, rhs, basis, r, col):
    piv = rows[r][col]
    row = rows[r]
    if piv != 1:
        inv = 1 / piv
        rows[r] = row = [v * inv for v in row]
        rhs[r] *= inv
    for i in range(len(rows)):
        if i == r:
            continue
        f = rows[i][col]
        if f:
            ri = rows[i]
            rows[i] = [a - f * b if b else a for a, b in zip(ri, row)]
            rhs[i] -= f * rhs[r]
    basis[r] = col


def _optimize(rows, rhs, basis, cost, ncols_allowed):
    m = len(rows)
    while True:
        cb = [cost[b] for b in basis]
        entering = None
        for j in range(ncols_allowed):
            if j in basis:
                continue
            red = cost[j] - sum(cb[i] * rows[i][j] for i in range(m) if rows[i][j])
            if red < 0:
                entering = j
                break
        if entering is None:
            return
        best = None
        for i in range(m):
            a = rows[i][entering]
            if a > 0:
                ratio = rhs[i] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            raise LPUnbounded("objective unbounded below")
        _pivot(rows, rhs, basis, best[1], entering)


def linprog_exact(
    c: Sequence,
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
) -> LPResult:
    """Minimize ``c @ x`` s.t. ``A_ub x <= b_ub``, ``A_eq x == b_eq``, ``x >= 0``."""
    F = Fraction
    n = len(c)
    n_ub = len(A_ub)
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for i, (a, b) in enumerate(zip(A_ub, b_ub)):
        rows.append([F(v) for v in a] + [F(1) if k == i else F(0) for k in range(n_ub)])
        rhs.append(F(b))
    for a, b in zip(A_eq, b_eq):
        rows.append([F(v) for v in a] + [F(0)] * n_ub)
        rhs.append(F(b))
    m = len(rows)
    basis: list = [None] * m
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]
        if i < n_ub and rows[i][n + i] == 1:
            basis[i] = n + i
    need_art = [i for i in range(m) if basis[i] is None]
    n_real = n + n_ub
    for r in rows:
        r.extend([F(0)] * len(need_art))
    for a_idx, i in enumerate(need_art):
        rows[i][n_real + a_idx] = F(1)
        basis[i] = n_real + a_idx
    total_cols = n_real + len(need_art)

    if need_art:
        phase1 = [F(0)] * n_real + [F(1)] * len(need_art)
        _optimize(rows, rhs, basis, phase1, total_cols)
        if sum(rhs[i] for i in range(m) if basis[i] >= n_real) > 0:
            raise LPInfeasible("no feasible point")
        for i in range(m):
            if basis[i] >= n_real:
                for j in range(n_real):
                    if rows[i][j] != 0 and j not in basis:
                        _pivot(rows, rhs, basis, i, j)
                        break
                # otherwise the row is redundant; its artificial stays basic at zero

    cost = [F(v) for v in c] + [F(0)] * (total_cols - n)
    _optimize(rows, rhs, basis, cost, n_real)
    x = [F(0)] * n
    for i, b in enumerate(basis):
        if b < n:
            x[b] = rhs[i]
    return LPResult(tuple(x), sum((F(ci) * xi for ci, xi in zip(c, x)), F(0)))
