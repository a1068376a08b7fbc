"""Positive definite binary quadratic forms a x^2 + b x y + c y^2."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt

from mpmath import libmp as L

from qmodular.numerics.bigcomplex import RND, BigComplex


class InvalidDiscriminant(ValueError):
    pass


@dataclass(frozen=True, order=True)
class QuadForm:
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def is_primitive(self) -> bool:
        return gcd(gcd(self.a, self.b), self.c) == 1

    @property
    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def tau(self, prec: int = 256) -> BigComplex:
        """The root (-b + i sqrt|d|)/(2a) in the upper half plane (needs a > 0)."""
        d = self.disc
        if d >= 0 or self.a <= 0:
            raise ValueError(f"{self} is not positive definite")
        w = prec + 16
        root = L.mpf_sqrt(L.from_int(-d), w, RND)
        z = BigComplex.from_mpf(L.from_int(-self.b), root, prec=w)
        return (z / (2 * self.a)).with_prec(prec)

    def __str__(self):
        return f"({self.a},{self.b},{self.c})"

    @classmethod
    def parse(cls, text: str) -> "QuadForm":
        parts = [int(p) for p in text.strip().strip("()").split(",")]
        if len(parts) != 3:
            raise ValueError(f"bad form {text!r}")
        return cls(*parts)


def reduce_form(f: QuadForm) -> QuadForm:
    """The reduced form properly equivalent to f."""
    if f.disc >= 0 or f.a <= 0:
        raise InvalidDiscriminant(f"{f} is not positive definite")
    a, b, c = f.a, f.b, f.c
    while True:
        # normalize b into (-a, a]
        if not (-a < b <= a):
            k = (a - b) // (2 * a)
            c = a * k * k + b * k + c
            b = b + 2 * a * k
        if a > c:
            a, b, c = c, -b, a
            continue
        if a == c and b < 0:
            b = -b
        return QuadForm(a, b, c)


def class_group_enumerate(d: int) -> list[QuadForm]:
    """All primitive reduced forms of discriminant d < 0."""
    if d >= 0 or d % 4 not in (0, 1):
        raise InvalidDiscriminant(f"invalid discriminant {d}")
    out = []
    amax = isqrt(-d // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b - d) % 2:
                continue
            num = b * b - d
            if num % (4 * a):
                continue
            f = QuadForm(a, b, num // (4 * a))
            if f.is_reduced and f.is_primitive:
                out.append(f)
    return sorted(out)


def class_number(d: int) -> int:
    return len(class_group_enumerate(d))
