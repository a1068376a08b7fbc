"""Exact nullspaces by fraction-free (Bareiss) elimination."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence


class InconsistentSystem(ValueError):
    pass


def _integer_row(row: Sequence) -> list[int]:
    den = 1
    for x in row:
        if isinstance(x, Fraction):
            den = den * x.denominator // math.gcd(den, x.denominator)
    return [int(x * den) for x in row]


class RationalMatrix:
    """A dense matrix of exact rationals.

    Elimination works on an integer copy: each row is cleared of
    denominators first, then Bareiss' update keeps every intermediate entry
    an integer. Pivots are chosen as the first nonzero column, smallest
    row index, so results are reproducible.
    """

    def __init__(self, rows: Sequence[Sequence]):
        rows = [list(r) for r in rows]
        widths = {len(r) for r in rows}
        if len(widths) > 1:
            raise ValueError("ragged matrix")
        self.rows = rows
        self.ncols = widths.pop() if widths else 0

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def echelon(self) -> tuple[list[list[int]], list[int]]:
        """Fraction-free row echelon form and its pivot columns."""
        m = [_integer_row(r) for r in self.rows]
        pivots: list[int] = []
        prev = 1
        r = 0
        nrows, ncols = len(m), self.ncols
        for col in range(ncols):
            if r == nrows:
                break
            piv = next((i for i in range(r, nrows) if m[i][col]), None)
            if piv is None:
                continue
            if piv != r:
                m[r], m[piv] = m[piv], m[r]
            p = m[r][col]
            pr = m[r]
            for i in range(r + 1, nrows):
                mi = m[i]
                f = mi[col]
                if f:
                    for j in range(col + 1, ncols):
                        mi[j] = (p * mi[j] - f * pr[j]) // prev
                else:
                    for j in range(col + 1, ncols):
                        mi[j] = (p * mi[j]) // prev
                mi[col] = 0
            prev = p
            pivots.append(col)
            r += 1
        return m[:r], pivots

    def rank(self) -> int:
        return len(self.echelon()[1])

    def nullspace(self) -> list[list[Fraction]]:
        """Basis of {x : M x = 0}, one vector per free column.

        Each basis vector has a 1 in its free column and 0 in the other
        free columns (reduced form), so the basis is canonical.
        """
        ech, pivots = self.echelon()
        n = self.ncols
        free = [j for j in range(n) if j not in set(pivots)]
        basis = []
        for f in free:
            x: list[Fraction] = [Fraction(0)] * n
            x[f] = Fraction(1)
            for row, pc in zip(reversed(ech), reversed(pivots)):
                acc = sum((row[j] * x[j] for j in range(pc + 1, n) if row[j] and x[j]), Fraction(0))
                x[pc] = -acc / row[pc]
            basis.append(x)
        return basis

    def solve(self, rhs: Sequence) -> list[Fraction]:
        """Unique solution of M x = rhs; raises if none or not unique."""
        aug = RationalMatrix([list(r) + [b] for r, b in zip(self.rows, rhs)])
        ech, pivots = aug.echelon()
        if self.ncols in pivots:
            raise InconsistentSystem("no exact solution")
        if len(pivots) < self.ncols:
            raise InconsistentSystem("solution is not unique")
        x = [Fraction(0)] * self.ncols
        for row, pc in zip(reversed(ech), reversed(pivots)):
            acc = sum((row[j] * x[j] for j in range(pc + 1, self.ncols)), Fraction(0))
            x[pc] = (row[self.ncols] - acc) / row[pc]
        return x

    def __matmul__(self, vec: Sequence) -> list:
        return [sum((a * b for a, b in zip(row, vec)), Fraction(0)) for row in self.rows]


def nullspace(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    return RationalMatrix(rows).nullspace()


def primitive(vec: Sequence) -> list[int]:
    """Scale a rational vector to coprime integers, first nonzero entry positive."""
    den = 1
    for x in vec:
        x = Fraction(x)
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(Fraction(x) * den) for x in vec]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    if g == 0:
        return ints
    lead = next(x for x in ints if x)
    if lead < 0:
        g = -g
    return [x // g for x in ints]
