"""Reference value of pi by the Chudnovsky series with integer binary splitting.

Kept independent of libmp's own pi so it can serve as an oracle.
"""

from __future__ import annotations

from functools import lru_cache
from math import isqrt

from mpmath import libmp as L

from qmodular.numerics.bigcomplex import RND, BigComplex

_A, _B, _C3_24 = 13591409, 545140134, 640320**3 // 24
_DIGITS_PER_TERM = 14.18


def _split(a: int, b: int) -> tuple[int, int, int]:
    if b - a == 1:
        if a == 0:
            p = q = 1
        else:
            p = (6 * a - 5) * (2 * a - 1) * (6 * a - 1)
            q = a * a * a * _C3_24
        t = p * (_A + _B * a)
        return p, q, -t if a & 1 else t
    m = (a + b) // 2
    p1, q1, t1 = _split(a, m)
    p2, q2, t2 = _split(m, b)
    return p1 * p2, q1 * q2, q2 * t1 + p1 * t2


@lru_cache(maxsize=16)
def pi_fixed(bits: int) -> int:
    """floor-ish of pi * 2^bits, accurate to a few units in the last place."""
    guard = 32
    w = bits + guard
    terms = int((w * 0.30103) / _DIGITS_PER_TERM) + 2
    _, q, t = _split(0, terms)
    one = 1 << w
    sq = isqrt(10005 * one * one)
    val = (q * 426880 * sq) // t
    return val >> guard


def chudnovsky_pi(prec: int) -> BigComplex:
    """pi as a BigComplex with ``prec`` bits."""
    v = L.from_man_exp(pi_fixed(prec + 8), -(prec + 8), prec, RND)
    return BigComplex.from_mpf(v, prec=prec)
