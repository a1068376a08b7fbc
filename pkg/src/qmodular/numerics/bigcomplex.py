"""Immutable arbitrary-precision complex numbers.

Values wrap raw mpmath.libmp tuples, so every operation takes its precision
from the operands and no global context is consulted. Mixed operations
round to the smaller precision.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

import mpmath
from mpmath import libmp as L

RND = L.round_nearest


def _wrap(v) -> mpmath.mpf:
    # make_mpf keeps the mantissa as is; mpf(tuple) would round to mp.prec
    return mpmath.mp.make_mpf(v)
Number = Union["BigComplex", int, Fraction, float]


def _mpf_from(x, prec: int):
    if isinstance(x, int):
        return L.from_int(x, prec, RND)
    if isinstance(x, Fraction):
        return L.from_rational(x.numerator, x.denominator, prec, RND)
    if isinstance(x, float):
        return L.from_float(x, prec, RND)
    raise TypeError(f"cannot convert {type(x).__name__}")


class BigComplex:
    __slots__ = ("_v", "prec")

    def __init__(self, re=0, im=0, prec: int = 256):
        if prec < 2:
            raise ValueError("precision must be at least 2 bits")
        object.__setattr__(self, "prec", prec)
        object.__setattr__(self, "_v", (_mpf_from(re, prec), _mpf_from(im, prec)))

    def __setattr__(self, *a):
        raise AttributeError("BigComplex is immutable")

    @classmethod
    def _raw(cls, v, prec: int) -> "BigComplex":
        z = object.__new__(cls)
        object.__setattr__(z, "_v", v)
        object.__setattr__(z, "prec", prec)
        return z

    @classmethod
    def from_mpf(cls, re, im=L.fzero, prec: int = 256) -> "BigComplex":
        """From raw libmp mantissa tuples."""
        return cls._raw((L.mpf_pos(re, prec, RND), L.mpf_pos(im, prec, RND)), prec)

    def _coerce(self, other) -> tuple[tuple, int]:
        if isinstance(other, BigComplex):
            return other._v, min(self.prec, other.prec)
        if isinstance(other, complex):
            return (_mpf_from(other.real, self.prec), _mpf_from(other.imag, self.prec)), self.prec
        return (_mpf_from(other, self.prec), L.fzero), self.prec

    # arithmetic
    def __add__(self, other):
        try:
            w, p = self._coerce(other)
        except TypeError:
            return NotImplemented
        return BigComplex._raw(L.mpc_add(self._v, w, p, RND), p)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            w, p = self._coerce(other)
        except TypeError:
            return NotImplemented
        return BigComplex._raw(L.mpc_sub(self._v, w, p, RND), p)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            w, p = self._coerce(other)
        except TypeError:
            return NotImplemented
        return BigComplex._raw(L.mpc_mul(self._v, w, p, RND), p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            w, p = self._coerce(other)
        except TypeError:
            return NotImplemented
        if w == L.mpc_zero:
            raise ZeroDivisionError("BigComplex division by zero")
        return BigComplex._raw(L.mpc_div(self._v, w, p, RND), p)

    def __rtruediv__(self, other):
        w, p = self._coerce(other)
        return BigComplex._raw(w, p) / self

    def __neg__(self):
        return BigComplex._raw(L.mpc_neg(self._v), self.prec)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return 1 / self ** (-n)
        return BigComplex._raw(L.mpc_pow_int(self._v, n, self.prec, RND), self.prec)

    def conj(self) -> "BigComplex":
        return BigComplex._raw(L.mpc_conjugate(self._v, self.prec, RND), self.prec)

    def exp(self) -> "BigComplex":
        return BigComplex._raw(L.mpc_exp(self._v, self.prec, RND), self.prec)

    def sqrt(self) -> "BigComplex":
        """Principal square root."""
        return BigComplex._raw(L.mpc_sqrt(self._v, self.prec, RND), self.prec)

    def with_prec(self, prec: int) -> "BigComplex":
        return BigComplex._raw((L.mpf_pos(self._v[0], prec, RND), L.mpf_pos(self._v[1], prec, RND)), prec)

    # inspection
    @property
    def real(self) -> "BigComplex":
        return BigComplex._raw((self._v[0], L.fzero), self.prec)

    @property
    def imag(self) -> "BigComplex":
        return BigComplex._raw((self._v[1], L.fzero), self.prec)

    def abs(self) -> mpmath.mpf:
        """|z| as an mpmath.mpf (comparisons on it are exact)."""
        return _wrap(L.mpc_abs(self._v, self.prec, RND))

    def re_mpf(self) -> mpmath.mpf:
        return _wrap(self._v[0])

    def im_mpf(self) -> mpmath.mpf:
        return _wrap(self._v[1])

    def is_zero(self) -> bool:
        return self._v == L.mpc_zero

    def to_complex(self) -> complex:
        return L.mpc_to_complex(self._v)

    def to_mpc(self) -> mpmath.mpc:
        return mpmath.mp.make_mpc(self._v)

    def to_str(self, digits: int = 30) -> str:
        re = L.to_str(self._v[0], digits)
        if self._v[1] == L.fzero:
            return re
        im = L.to_str(self._v[1], digits)
        sign = "" if im.startswith("-") else "+"
        return f"{re}{sign}{im}j"

    def __eq__(self, other):
        if isinstance(other, BigComplex):
            return self._v == other._v
        try:
            w, _ = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self._v == w

    def __hash__(self):
        return hash(self._v)

    def __repr__(self):
        return f"BigComplex({self.to_str(20)}, prec={self.prec})"


def ulp_error(a: BigComplex, b: BigComplex) -> mpmath.mpf:
    return (a - b).abs()


def log10_abs(x: mpmath.mpf) -> float:
    """log10 of a positive mpf, -inf for zero, computed without global state."""
    if x == 0:
        return float("-inf")
    return float(L.to_float(L.mpf_log(x._mpf_, 64, RND)) / 2.302585092994046)
