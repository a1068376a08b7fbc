"""
Truncated q-series with exact rational coefficients.

Exponents live on the grid (1/24)Z. A series stores a dense coefficient
list on the sub-grid ``lead + k*step`` (both in units of 1/24), together
with a truncation ``order``: every coefficient with exponent strictly below
``order/24`` is known exactly, nothing above is. ``order`` may be
``math.inf`` for exact (polynomial) series.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence, Union

Number = Union[int, Fraction]

DENOM = 24
INF = math.inf


class SeriesError(ValueError):
    pass


def _norm(c) -> Number:
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, int):
        return c
    if isinstance(c, Rational):
        return _norm(Fraction(c.numerator, c.denominator))
    raise TypeError(f"coefficient must be rational, got {type(c).__name__}")


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _count(lead: int, step: int, order) -> int:
    """Number of grid points lead + k*step strictly below order."""
    if order == INF:
        raise SeriesError("exact series has no finite length")
    if order <= lead:
        return 0
    return _ceil_div(order - lead, step)


class QSeries:
    """An element of Q((q^(1/24))) known modulo q^(order/24)."""

    __slots__ = ("coeffs", "lead", "step", "order")

    def __init__(self, coeffs: Sequence = (), lead: int = 0, step: int = DENOM, order=INF):
        if step <= 0:
            raise SeriesError("grid step must be positive")
        coeffs = [_norm(c) for c in coeffs]
        if order != INF:
            order = int(order)
            coeffs = coeffs[: _count(lead, step, order)]
        # strip leading zeros
        k = 0
        while k < len(coeffs) and coeffs[k] == 0:
            k += 1
        if k:
            coeffs = coeffs[k:]
            lead += k * step
        if order == INF:
            while coeffs and coeffs[-1] == 0:
                coeffs.pop()
        if not coeffs:
            lead = 0 if order == INF else order
            step = DENOM
        else:
            g = 0
            for i, c in enumerate(coeffs):
                if c and i:
                    g = math.gcd(g, i)
                    if g == 1:
                        break
            if g > 1:
                coeffs = coeffs[::g]
                step *= g
        self.coeffs = coeffs
        self.lead = lead
        self.step = step
        self.order = order

    # ----- construction -------------------------------------------------

    @classmethod
    def from_q(cls, coeffs: Sequence, order=None) -> "QSeries":
        """Series sum c_n q^n for n = 0, 1, ...; ``order`` in powers of q."""
        o = INF if order is None else DENOM * order
        return cls(coeffs, 0, DENOM, o)

    @classmethod
    def from_terms(cls, terms: Mapping, order=None) -> "QSeries":
        """Build from ``{exponent: coeff}`` with rational exponents in q."""
        o = INF if order is None else _to24(order)
        if not terms:
            return cls((), 0, DENOM, o)
        exps = {_to24(e): c for e, c in terms.items()}
        lo = min(exps)
        g = 0
        for e in exps:
            g = math.gcd(g, e - lo)
        g = math.gcd(g, DENOM) if g else DENOM
        n = (max(exps) - lo) // g + 1
        dense = [0] * n
        for e, c in exps.items():
            dense[(e - lo) // g] += c
        return cls(dense, lo, g, o)

    @classmethod
    def constant(cls, c, order=None) -> "QSeries":
        return cls.from_q([c], order)

    @classmethod
    def monomial(cls, exponent, c=1, order=None) -> "QSeries":
        return cls.from_terms({exponent: c}, order)

    @classmethod
    def zero(cls, order=None) -> "QSeries":
        return cls.from_q([], order)

    # ----- inspection ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_exact(self) -> bool:
        return self.order == INF

    @property
    def valuation(self) -> Fraction:
        """Lowest exponent carrying a nonzero coefficient, in powers of q."""
        if not self.coeffs:
            raise SeriesError("zero series has no valuation")
        return Fraction(self.lead, DENOM)

    @property
    def qorder(self):
        return INF if self.order == INF else Fraction(self.order, DENOM)

    @property
    def is_integral(self) -> bool:
        """True when every exponent is an integer."""
        return not self.coeffs or (self.lead % DENOM == 0 and self.step % DENOM == 0)

    def terms(self) -> Iterable[tuple[Fraction, Number]]:
        for k, c in enumerate(self.coeffs):
            if c:
                yield Fraction(self.lead + k * self.step, DENOM), c

    def coefficient(self, exponent) -> Number:
        e = _to24(exponent)
        if self.order != INF and e >= self.order:
            raise SeriesError(f"coefficient of q^{exponent} lies beyond the truncation order {self.qorder}")
        if not self.coeffs:
            return 0
        k, r = divmod(e - self.lead, self.step)
        if r or k < 0 or k >= len(self.coeffs):
            return 0
        return self.coeffs[k]

    def __getitem__(self, n) -> Number:
        return self.coefficient(n)

    def to_list(self, n: int | None = None) -> list[Number]:
        """Coefficients of q^0 .. q^(n-1); requires integral exponents."""
        if not self.is_integral:
            raise SeriesError("series has fractional exponents")
        if n is None:
            if self.order == INF:
                n = (self.lead + self.step * len(self.coeffs)) // DENOM if self.coeffs else 0
            else:
                n = _ceil_div(self.order, DENOM)
        return [self.coefficient(i) for i in range(n)]

    def first_nonzero(self):
        """Exponent (in q) of the lowest nonzero coefficient, or None."""
        return Fraction(self.lead, DENOM) if self.coeffs else None

    # ----- plumbing -----------------------------------------------------

    def _regrid(self, lead: int, step: int, n: int) -> list[Number]:
        out = [0] * n
        if not self.coeffs:
            return out
        off, r = divmod(self.lead - lead, step)
        ratio = self.step // step
        assert r == 0 and self.step % step == 0
        for k, c in enumerate(self.coeffs):
            i = off + k * ratio
            if i >= n:
                break
            out[i] = c
        return out

    def truncate(self, order) -> "QSeries":
        """Drop information at exponents >= order (order in 1/24 units)."""
        o = min(self.order, order)
        return QSeries(self.coeffs, self.lead, self.step, o)

    def truncate_q(self, n) -> "QSeries":
        return self.truncate(_to24(n))

    def shift(self, e24: int) -> "QSeries":
        """Multiply by q^(e24/24)."""
        lead = self.lead + e24
        order = self.order + e24
        if not self.coeffs:
            return QSeries((), 0, DENOM, order)
        return QSeries(self.coeffs, lead, self.step, order)

    def shift_q(self, n) -> "QSeries":
        return self.shift(_to24(n))

    def __repr__(self) -> str:
        return f"QSeries({self.pretty(8)})"

    def pretty(self, nterms: int = 10) -> str:
        parts = []
        for e, c in self.terms():
            if len(parts) >= nterms:
                parts.append("...")
                break
            parts.append(f"{c}*q^{e}" if e != 0 else f"{c}")
        if self.order != INF:
            parts.append(f"O(q^{self.qorder})")
        return " + ".join(parts) if parts else "0"

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = QSeries.constant(other)
        if not isinstance(other, QSeries):
            return NotImplemented
        # a lone coefficient may sit on any grid step, so compare terms
        return self.order == other.order and list(self.terms()) == list(other.terms())

    def __hash__(self):
        return hash((tuple(self.terms()), self.order))

    def agrees_with(self, other: "QSeries") -> bool:
        """Equality on the common range of validity."""
        return (self - other).is_zero()

    # ----- ring operations ---------------------------------------------

    def __neg__(self) -> "QSeries":
        return QSeries([-c for c in self.coeffs], self.lead, self.step, self.order)

    def __add__(self, other) -> "QSeries":
        other = _promote(other)
        if other is NotImplemented:
            return other
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other) -> "QSeries":
        other = _promote(other)
        if other is NotImplemented:
            return other
        return add(self, -other)

    def __rsub__(self, other) -> "QSeries":
        other = _promote(other)
        if other is NotImplemented:
            return other
        return add(other, -self)

    def __mul__(self, other) -> "QSeries":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return QSeries((), 0, DENOM, INF if self.order == INF else self.order)
            return QSeries([c * other for c in self.coeffs], self.lead, self.step, self.order)
        other = _promote(other)
        if other is NotImplemented:
            return other
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "QSeries":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division of a series by zero")
            inv = Fraction(1) / other
            return QSeries([c * inv for c in self.coeffs], self.lead, self.step, self.order)
        other = _promote(other)
        if other is NotImplemented:
            return other
        return div(self, other)

    def __rtruediv__(self, other) -> "QSeries":
        other = _promote(other)
        if other is NotImplemented:
            return other
        return div(other, self)

    def __pow__(self, k: int) -> "QSeries":
        return power(self, k)

    def inverse(self, rel=None) -> "QSeries":
        return inverse(self, rel)

    def q_derivative(self) -> "QSeries":
        return q_derivative(self)

    def derivative(self) -> "QSeries":
        """Ordinary d/dq, i.e. q^-1 * (q d/dq)."""
        return q_derivative(self).shift(-DENOM)

    def log_derivative(self) -> "QSeries":
        """q d/dq log(self) = (q d/dq self) / self."""
        return div(q_derivative(self), self)

    def subs_power(self, m: int) -> "QSeries":
        """Substitute q -> q^m for a positive integer m."""
        if m <= 0:
            raise SeriesError("substitution exponent must be positive")
        order = self.order * m if self.order != INF else INF
        if not self.coeffs:
            return QSeries((), 0, DENOM, order)
        return QSeries(self.coeffs, self.lead * m, self.step * m, order)

    def negate_q(self) -> "QSeries":
        """Substitute q -> -q; requires integral exponents."""
        if not self.is_integral:
            raise SeriesError("q -> -q is ambiguous for fractional exponents")
        out = []
        for k, c in enumerate(self.coeffs):
            e = (self.lead + k * self.step) // DENOM
            out.append(-c if e % 2 else c)
        return QSeries(out, self.lead, self.step, self.order)

    def __call__(self, inner: "QSeries") -> "QSeries":
        return compose(self, inner)


def _to24(e) -> int:
    if e == INF:
        return INF
    f = Fraction(e) * DENOM
    if f.denominator != 1:
        raise SeriesError(f"exponent {e} is not on the 1/24 grid")
    return int(f)


def _promote(x):
    if isinstance(x, QSeries):
        return x
    if isinstance(x, (int, Fraction)):
        return QSeries.constant(x)
    return NotImplemented


def _rel(s: QSeries):
    """Relative precision: order minus lead."""
    if not s.coeffs:
        return 0
    return s.order - s.lead


# ----- operations ----------------------------------------------------------


def add(a: QSeries, b: QSeries) -> QSeries:
    order = min(a.order, b.order)
    if not a.coeffs:
        return b.truncate(order) if order != b.order else b
    if not b.coeffs:
        return a.truncate(order) if order != a.order else a
    lead = min(a.lead, b.lead)
    step = math.gcd(math.gcd(a.step, b.step), abs(a.lead - b.lead))
    if order == INF:
        end = max(a.lead + a.step * len(a.coeffs), b.lead + b.step * len(b.coeffs))
    else:
        end = order
    n = max(0, _ceil_div(end - lead, step))
    ca = a._regrid(lead, step, n)
    cb = b._regrid(lead, step, n)
    return QSeries([x + y for x, y in zip(ca, cb)], lead, step, order)


def _convolve(ca, ra, cb, rb, n) -> list:
    """out[k] = sum ca[i]*cb[j] over i*ra + j*rb = k, for k < n."""
    out = [0] * n
    nzb = [(j * rb, c) for j, c in enumerate(cb) if c]
    for i, x in enumerate(ca):
        if not x:
            continue
        base = i * ra
        if base >= n:
            break
        for jb, y in nzb:
            k = base + jb
            if k >= n:
                break
            out[k] += x * y
    return out


def mul(a: QSeries, b: QSeries) -> QSeries:
    """Cauchy product; the result is known exactly up to the tightest order."""
    if not a.coeffs or not b.coeffs:
        if a.order == INF and not a.coeffs or b.order == INF and not b.coeffs:
            return QSeries.zero()
        la = a.lead if a.coeffs else a.order
        lb = b.lead if b.coeffs else b.order
        order = min(a.order + lb, b.order + la)
        return QSeries((), 0, DENOM, order)
    order = min(a.order + b.lead, b.order + a.lead)
    lead = a.lead + b.lead
    step = math.gcd(a.step, b.step)
    if order == INF:
        n = (len(a.coeffs) - 1) * (a.step // step) + (len(b.coeffs) - 1) * (b.step // step) + 1
    else:
        n = _count(lead, step, order)
    out = _convolve(a.coeffs, a.step // step, b.coeffs, b.step // step, n)
    return QSeries(out, lead, step, order)


def inverse(b: QSeries, rel=None) -> QSeries:
    """1/b. ``rel`` caps the relative precision (in 1/24 units) when b is exact."""
    if not b.coeffs:
        raise ZeroDivisionError("inverse of the zero series")
    r = _rel(b)
    if rel is not None:
        r = min(r, rel)
    if len(b.coeffs) == 1:
        c = Fraction(1) / b.coeffs[0]
        order = INF if r == INF else -b.lead + r
        return QSeries([c], -b.lead, DENOM, order)
    if r == INF:
        raise SeriesError("inverse of a non-monomial exact series needs a truncation order")
    s = b.step
    n = _ceil_div(r, s)
    c0 = b.coeffs[0]
    unit = c0 in (1, -1)
    bc = b.coeffs[:n]
    out = [0] * n
    out[0] = c0 if unit else Fraction(1) / c0
    inv0 = out[0]
    nzb = [(j, c) for j, c in enumerate(bc) if c and j]
    for k in range(1, n):
        acc = 0
        for j, c in nzb:
            if j > k:
                break
            acc += c * out[k - j]
        out[k] = -acc * inv0
    return QSeries(out, -b.lead, s, -b.lead + r)


def div(a: QSeries, b: QSeries) -> QSeries:
    if not b.coeffs:
        raise ZeroDivisionError("division by the zero series")
    if not a.coeffs:
        order = a.order - b.lead if a.order != INF else INF
        return QSeries((), 0, DENOM, order)
    rel = min(_rel(a), _rel(b))
    if len(b.coeffs) == 1:
        return mul(a, inverse(b))
    if rel == INF:
        raise SeriesError("exact division by a non-monomial needs a truncation order")
    return mul(a, inverse(b, rel))


def power(a: QSeries, k: int) -> QSeries:
    if not isinstance(k, int):
        raise TypeError("series powers must be integers")
    if k < 0:
        return power(inverse(a), -k)
    result = None
    base = a
    while True:
        if k & 1:
            result = base if result is None else mul(result, base)
        k >>= 1
        if not k:
            break
        base = mul(base, base)
    if result is None:
        return QSeries.constant(1)
    return result


def q_derivative(a: QSeries) -> QSeries:
    """The operator q d/dq: the coefficient at exponent e is multiplied by e."""
    out = []
    for k, c in enumerate(a.coeffs):
        e = a.lead + k * a.step
        out.append(Fraction(c * e, DENOM) if c else 0)
    if not out:
        return QSeries((), 0, DENOM, a.order)
    return QSeries(out, a.lead, a.step, a.order)


def compose(outer: QSeries, inner: QSeries) -> QSeries:
    """Substitute ``inner`` for the variable of ``outer``.

    ``outer`` must have non-negative integral exponents (it is read as a
    power series in one variable); ``inner`` must have no constant term.
    """
    if not outer.is_integral or (outer.coeffs and outer.lead < 0):
        raise SeriesError("outer series must have non-negative integral exponents")
    if not inner.coeffs:
        if inner.order == INF:
            c0 = outer.coefficient(0) if outer.order > 0 else None
            if c0 is None:
                raise SeriesError("outer series has no known constant term")
            return QSeries.constant(c0)
        raise SeriesError("cannot substitute an inexact zero series")
    if inner.lead <= 0:
        raise SeriesError("inner series must have positive valuation (no constant term)")
    li = inner.lead
    # first unknown term of the outer series contributes O(inner^N)
    bound = INF
    if outer.order != INF:
        nout = _ceil_div(outer.order, DENOM)
        bound = nout * li
    else:
        nout = (outer.lead + outer.step * len(outer.coeffs)) // DENOM
    cs = [outer.coefficient(i) if outer.order == INF or i * DENOM < outer.order else 0
          for i in range(nout)]
    if inner.order != INF:
        first = next((i for i in range(1, nout) if cs[i]), None)
        if first is not None:
            bound = min(bound, inner.order + (first - 1) * li)
    if bound == INF:
        # exact polynomial in an exact polynomial
        acc = QSeries.constant(cs[-1] if cs else 0)
        for c in reversed(cs[:-1]):
            acc = mul(acc, inner) + c
        return acc
    inner_t = inner.truncate(bound)
    acc = QSeries.constant(0).truncate(bound)
    for c in reversed(cs):
        acc = mul(acc, inner_t).truncate(bound) + QSeries((c,), 0, DENOM, bound)
    return acc.truncate(bound)


def revert(a: QSeries) -> QSeries:
    """Compositional inverse of a = q + O(q^2) by Newton iteration.

    Returns b with a(b(q)) = q = b(a(q)) modulo the order of a.
    """
    if not a.is_integral or not a.coeffs or a.lead != DENOM or a.coeffs[0] != 1:
        raise SeriesError("reversion needs a series of the form q + O(q^2)")
    if a.order == INF:
        raise SeriesError("reversion of an exact series needs a truncation order")
    target = a.order
    da = a.derivative()
    q = QSeries.monomial(1)
    b = q.truncate(2 * DENOM)
    prec = 2 * DENOM
    while prec < target:
        # correct mod q^k  ->  correct mod q^(2k-1)
        prec = min(2 * prec - DENOM, target)
        bt = QSeries(b.coeffs, b.lead, b.step, prec)
        ab = compose(a.truncate(prec), bt)
        dab = compose(da.truncate(prec - DENOM), bt)
        corr = div((ab - q).truncate(prec), dab)
        b = (bt - corr).truncate(prec)
    return b.truncate(target)


def q_series(coeffs: Sequence, order=None) -> QSeries:
    """Shorthand for :meth:`QSeries.from_q`."""
    return QSeries.from_q(coeffs, order)
