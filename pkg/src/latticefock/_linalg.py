"""Small exact linear-algebra helpers (fields given by Python number objects)."""
from __future__ import annotations

from fractions import Fraction


class SparseSPDFactor:
    """Gaussian elimination without pivoting for a sparse SPD matrix.

    ``rows`` maps index -> {col: value}; indices are 0..n-1 and elimination
    follows that order, so a banded ordering keeps fill-in small.
    """

    def __init__(self, rows: dict, n: int, zero=Fraction(0)):
        self.n = n
        self.zero = zero
        work = [dict(rows.get(i, {})) for i in range(n)]
        self.upper = []  # upper[i] = (pivot, {j>i: a_ij})
        self.lower = []  # lower[i] = {j>i: l_ji}
        for i in range(n):
            row = work[i]
            piv = row.pop(i)
            if not piv:
                raise ZeroDivisionError("zero pivot; matrix not positive definite")
            tail = {j: v for j, v in row.items() if j > i}
            low = {}
            for j in tail:
                rj = work[j]
                a = rj.pop(i, None)
                if a is None or not a:
                    continue
                m = a / piv
                low[j] = m
                for k, v in tail.items():
                    nv = rj.get(k, zero) - m * v
                    if nv:
                        rj[k] = nv
                    else:
                        rj.pop(k, None)
            self.upper.append((piv, tail))
            self.lower.append(low)

    def solve(self, rhs: dict) -> list:
        y = [self.zero] * self.n
        for i, v in rhs.items():
            y[i] = y[i] + v
        for i in range(self.n):
            yi = y[i]
            if yi:
                for j, m in self.lower[i].items():
                    y[j] = y[j] - m * yi
        x = [self.zero] * self.n
        for i in range(self.n - 1, -1, -1):
            piv, tail = self.upper[i]
            s = y[i]
            for j, v in tail.items():
                xj = x[j]
                if xj:
                    s = s - v * xj
            x[i] = s / piv
        return x


def _inv(x):
    if hasattr(x, "inverse_monomial"):
        return x.inverse_monomial()
    return 1 / x


def rref(mat: list, zero=Fraction(0)):
    """Reduced row echelon form over an exact field; returns (rows, pivots)."""
    a = [list(r) for r in mat]
    if not a:
        return a, []
    m, n = len(a), len(a[0])
    pivots = []
    r = 0
    for c in range(n):
        p = None
        for i in range(r, m):
            if a[i][c]:
                p = i
                break
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = _inv(a[r][c])
        a[r] = [v * inv for v in a[r]]
        for i in range(m):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [vi - f * vr for vi, vr in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return a, pivots


def rank(mat: list, zero=Fraction(0)) -> int:
    return len(rref(mat, zero)[1])


def solve_dense(mat: list, rhs: list, zero=Fraction(0)) -> list:
    """Solve a square nonsingular system exactly; rhs is a list of columns."""
    n = len(mat)
    aug = [list(mat[i]) + [col[i] for col in rhs] for i in range(n)]
    red, piv = rref(aug, zero)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise ArithmeticError("singular system")
    return [[red[i][n + j] for i in range(n)] for j in range(len(rhs))]
