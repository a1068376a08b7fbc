"""Exact quadratic surds r + s*sqrt(d) and radicals k*sqrt(surd).

A negative radicand stands for an imaginary square root, sqrt(-2) = i*sqrt(2),
so complex values such as (31 - 8i*sqrt(2))/66 are ordinary surds.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from mpmath import libmp as L

from qmodular.numerics.bigcomplex import RND, BigComplex


def squarefree_part(n: int) -> tuple[int, int]:
    """n = f^2 * m with m squarefree (sign kept in m)."""
    if n == 0:
        return 0, 0
    sign = -1 if n < 0 else 1
    n = abs(n)
    f, m, p = 1, 1, 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
            f *= p
        if n % p == 0:
            n //= p
            m *= p
        p += 1
    return f, sign * m * n


@dataclass(frozen=True, eq=False)
class Surd:
    r: Fraction
    s: Fraction = Fraction(0)
    d: int = 1

    def __post_init__(self):
        r, s, d = Fraction(self.r), Fraction(self.s), int(self.d)
        if d == 0:
            s, d = Fraction(0), 1
        f, m = squarefree_part(d)
        s *= f
        if m == 1:
            r, s = r + s, Fraction(0)
        if s == 0:
            m = 1
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "d", m)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Surd(other)
        if not isinstance(other, Surd):
            return NotImplemented
        return (self.r, self.s, self.d) == (other.r, other.s, other.d)

    def __hash__(self):
        return hash((self.r, self.s, self.d))

    @classmethod
    def sqrt(cls, x) -> "Surd":
        """sqrt of a rational x (imaginary when x < 0)."""
        x = Fraction(x)
        # sqrt(p/q) = sqrt(p*q)/q
        return cls(0, Fraction(1, x.denominator), x.numerator * x.denominator)

    @property
    def is_rational(self) -> bool:
        return self.s == 0

    @property
    def is_real(self) -> bool:
        return self.d > 0

    def _lift(self, other) -> "Surd":
        if isinstance(other, Surd):
            return other
        if isinstance(other, (int, Fraction)):
            return Surd(other)
        raise TypeError

    def _common(self, o: "Surd") -> int:
        if self.is_rational:
            return o.d
        if o.is_rational or o.d == self.d:
            return self.d
        raise ValueError(f"radicands differ: {self.d} and {o.d}")

    def __add__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        return Surd(self.r + o.r, self.s + o.s, self._common(o))

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.r, -self.s, self.d)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        d = self._common(o)
        return Surd(self.r * o.r + self.s * o.s * d, self.r * o.s + self.s * o.r, d)

    __rmul__ = __mul__

    def conjugate_surd(self) -> "Surd":
        """Galois conjugate r - s*sqrt(d)."""
        return Surd(self.r, -self.s, self.d)

    def norm(self) -> Fraction:
        return self.r * self.r - self.s * self.s * self.d

    def __truediv__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero surd")
        num = self * o.conjugate_surd()
        return Surd(num.r / n, num.s / n, num.d)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, k: int):
        out = Surd(1)
        for _ in range(k):
            out = out * self
        return out

    def minimal_polynomial(self) -> list[Fraction]:
        """Monic coefficients, lowest degree first: x - r, or x^2 - 2r x + norm."""
        if self.is_rational:
            return [-self.r, Fraction(1)]
        return [self.norm(), -2 * self.r, Fraction(1)]

    def evaluate_poly(self, coeffs) -> "Surd":
        acc = Surd(0)
        for c in reversed(list(coeffs)):
            acc = acc * self + Fraction(c)
        return acc

    def to_bigcomplex(self, prec: int) -> BigComplex:
        w = prec + 24
        r = BigComplex(self.r, 0, w)
        if self.is_rational:
            return r.with_prec(prec)
        root = L.mpf_sqrt(L.from_int(abs(self.d)), w, RND)
        rt = BigComplex.from_mpf(root, prec=w) if self.d > 0 else BigComplex.from_mpf(L.fzero, root, prec=w)
        return (r + rt * self.s).with_prec(prec)

    def __str__(self):
        if self.is_rational:
            return str(self.r)
        head = "" if self.r == 0 else f"{self.r}"
        s = self.s
        sign = "-" if s < 0 else ("+" if head else "")
        mag = abs(s)
        coef = "" if mag == 1 else f"{mag}*"
        return f"{head}{sign}{coef}sqrt({self.d})"


@dataclass(frozen=True)
class Radical:
    """k * sqrt(inner) on the principal branch, or k alone when inner is None."""

    k: Surd
    inner: Surd | None = None

    def to_bigcomplex(self, prec: int) -> BigComplex:
        w = prec + 24
        v = self.k.to_bigcomplex(w)
        if self.inner is not None:
            v = v * self.inner.to_bigcomplex(w).sqrt()
        return v.with_prec(prec)

    def __str__(self):
        if self.inner is None:
            return str(self.k)
        return f"{self.k}*sqrt[{self.inner}]"


_TERM = re.compile(r"([+-]?)\s*([0-9]+(?:/[0-9]+)?)?\s*\*?\s*(sqrt\((-?[0-9]+(?:/[0-9]+)?)\))?")


def parse_surd(text: str) -> Surd:
    """Parse sums of terms like ``7/8-3/8*sqrt(5)``, ``-1/16*sqrt(-2)``, ``3/8``."""
    src = text.replace(" ", "")
    if not src:
        raise ValueError("empty surd literal")
    total = Surd(0)
    pos = 0
    while pos < len(src):
        m = _TERM.match(src, pos)
        if not m or m.end() == pos or (m.group(2) is None and m.group(3) is None):
            raise ValueError(f"bad surd literal {text!r} at {pos}")
        sign = -1 if m.group(1) == "-" else 1
        coef = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        term = Surd(sign * coef)
        if m.group(3):
            term = term * Surd.sqrt(Fraction(m.group(4)))
        total = total + term
        pos = m.end()
    return total


def parse_radical(text: str) -> Radical:
    """``k*sqrt[inner]`` with surd literals k and inner, or a plain surd."""
    src = text.replace(" ", "")
    if "sqrt[" not in src:
        return Radical(parse_surd(src))
    head, _, rest = src.partition("sqrt[")
    if not rest.endswith("]"):
        raise ValueError(f"bad radical literal {text!r}")
    head = head.rstrip("*")
    k = parse_surd(head) if head not in ("", "+") else Surd(1)
    if head == "-":
        k = Surd(-1)
    return Radical(k, parse_surd(rest[:-1]))
