"""
q-expansions of the level-20 modular objects and exact linear relations
between them.

Orders passed to the builders here are in powers of q: ``order=N`` means
every coefficient of q^e with e < N is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, Sequence

from qmodular.linalg import InconsistentSystem, RationalMatrix
from qmodular.series import DENOM, QSeries

LEVEL = 20


def divisors(n: int) -> list[int]:
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def divisor_sums(k: int, n: int) -> list[int]:
    """sigma_k(m) for m < n (sigma_k(0) reported as 0)."""
    out = [0] * n
    for d in range(1, n):
        dk = d**k
        for m in range(d, n, d):
            out[m] += dk
    return out


def _qlen(order) -> int:
    """Number of integral exponents 0 <= e < order."""
    return max(0, math.ceil(Fraction(order)))


def euler_function(order) -> QSeries:
    """prod_{j>=1} (1 - q^j), via the pentagonal number theorem."""
    n = _qlen(order)
    c = [0] * n
    if n:
        c[0] = 1
    k = 1
    while True:
        p1 = k * (3 * k - 1) // 2
        if p1 >= n:
            break
        sign = -1 if k % 2 else 1
        c[p1] += sign
        p2 = k * (3 * k + 1) // 2
        if p2 < n:
            c[p2] += sign
        k += 1
    return QSeries(c, 0, DENOM, DENOM * n)


# ----- eta products --------------------------------------------------------


@dataclass(frozen=True)
class EtaProduct:
    """prod over delta | level of eta(delta*tau)^r_delta."""

    level: int
    exponents: tuple[tuple[int, int], ...] = ()

    def __init__(self, level: int, exponents: Mapping[int, int] | Sequence[tuple[int, int]] = ()):
        items = dict(exponents.items() if isinstance(exponents, Mapping) else exponents)
        for d in items:
            if d <= 0 or level % d:
                raise ValueError(f"{d} is not a positive divisor of the level {level}")
        cleaned = tuple(sorted((d, r) for d, r in items.items() if r))
        object.__setattr__(self, "level", level)
        object.__setattr__(self, "exponents", cleaned)

    @property
    def exponent_map(self) -> dict[int, int]:
        return dict(self.exponents)

    @property
    def weight(self) -> Fraction:
        return Fraction(sum(r for _, r in self.exponents), 2)

    @property
    def valuation(self) -> Fraction:
        """Order of vanishing at infinity, sum(delta*r)/24."""
        return Fraction(sum(d * r for d, r in self.exponents), 24)

    def __mul__(self, other: "EtaProduct") -> "EtaProduct":
        level = math.lcm(self.level, other.level)
        m = self.exponent_map
        for d, r in other.exponents:
            m[d] = m.get(d, 0) + r
        return EtaProduct(level, m)

    def __truediv__(self, other: "EtaProduct") -> "EtaProduct":
        return self * other ** -1

    def __pow__(self, k: int) -> "EtaProduct":
        return EtaProduct(self.level, {d: r * k for d, r in self.exponents})

    def at_level(self, level: int) -> "EtaProduct":
        if level % self.level:
            raise ValueError("new level must be a multiple of the old one")
        return EtaProduct(level, self.exponent_map)

    def expand(self, order) -> QSeries:
        return eta_expand(self, order)


def eta(*pairs: tuple[int, int], level: int = LEVEL) -> EtaProduct:
    return EtaProduct(level, dict(pairs))


def eta_expand(e: EtaProduct, order) -> QSeries:
    """Exact expansion of an eta product, including its q^(sum delta r/24) prefactor."""
    lead24 = sum(d * r for d, r in e.exponents)
    target = DENOM * Fraction(order)
    if target.denominator != 1:
        raise ValueError("order must lie on the 1/24 grid")
    target = int(target)
    rel = target - lead24
    if rel <= 0:
        return QSeries((), 0, DENOM, target)
    nq = -(-rel // DENOM)
    base = euler_function(nq)
    num = QSeries.constant(1)
    den = QSeries.constant(1)
    for d, r in e.exponents:
        f = base.subs_power(d).truncate(DENOM * nq)
        if r > 0:
            num = (num * f**r).truncate(DENOM * nq)
        else:
            den = (den * f ** (-r)).truncate(DENOM * nq)
    unit = num.truncate(DENOM * nq) if den.is_exact else num.truncate(DENOM * nq) / den
    return unit.shift(lead24).truncate(target)


# ----- eta-product membership test ---------------------------------------


@dataclass(frozen=True)
class EtaMembership:
    level: int
    weight: Fraction
    conditions: dict = field(hash=False)

    @property
    def passes(self) -> bool:
        return all(self.conditions.values())

    def failed(self) -> list[str]:
        return [k for k, ok in self.conditions.items() if not ok]


def eta_membership(e: EtaProduct) -> EtaMembership:
    """Evaluate the five sufficient conditions for an eta product to lie in
    M_k(Gamma_0(level)) with trivial character."""
    level = e.level
    r = e.exponent_map
    k = e.weight
    s = 1
    for d, x in r.items():
        s *= d ** abs(x)
    root = math.isqrt(s)
    conds = {
        "even_weight": k.denominator == 1 and k.numerator % 2 == 0,
        "square_product": root * root == s,
        "cusp_infinity": sum(d * x for d, x in r.items()) % 24 == 0,
        "cusp_zero": sum((level // d) * x for d, x in r.items()) % 24 == 0,
        "holomorphic_cusps": all(
            sum(Fraction(math.gcd(c, d) ** 2 * x, d) for d, x in r.items()) >= 0
            for c in divisors(level)
        ),
    }
    return EtaMembership(level, k, conds)


# ----- theta functions and Eisenstein series --------------------------------


def theta_series(which: int, order) -> QSeries:
    """Null theta functions theta_2, theta_3, theta_4 by direct lattice sum."""
    target = int(DENOM * Fraction(order))
    terms: dict[int, int] = {}
    if which in (3, 4):
        n = 0
        while DENOM * n * n < target:
            c = 1 if n == 0 else 2
            if which == 4 and n % 2:
                c = -c
            terms[DENOM * n * n] = c
            n += 1
    elif which == 2:
        n = 0
        while 24 * n * n + 24 * n + 6 < target:
            terms[24 * n * n + 24 * n + 6] = 2
            n += 1
    else:
        raise ValueError("theta index must be 2, 3 or 4")
    return QSeries.from_terms({Fraction(e, DENOM): c for e, c in terms.items()}, Fraction(target, DENOM))


def _divisor_series(k: int, scale: int, order, c0: int, mult: int) -> QSeries:
    n = _qlen(order)
    m = (n - 1) // scale + 1 if n else 0
    sig = divisor_sums(k, m)
    coeffs = [0] * n
    if n:
        coeffs[0] = c0
    for j in range(1, m):
        coeffs[j * scale] = mult * sig[j]
    return QSeries(coeffs, 0, DENOM, DENOM * n)


def eisenstein_P(scale: int, order) -> QSeries:
    """P(q^scale) = 1 - 24 sum sigma_1(n) q^(scale n)."""
    if scale < 1:
        raise ValueError("scale must be positive")
    return _divisor_series(1, scale, order, 1, -24)


def eisenstein_Q(scale: int, order) -> QSeries:
    """Q(q^scale) = 1 + 240 sum sigma_3(n) q^(scale n)."""
    if scale < 1:
        raise ValueError("scale must be positive")
    return _divisor_series(3, scale, order, 1, 240)


def lattice_sum(form: tuple[int, int, int], order) -> QSeries:
    """sum over (m, n) in Z^2 of q^(A m^2 + B m n + C n^2)."""
    A, B, C = form
    disc = B * B - 4 * A * C
    if A <= 0 or disc >= 0:
        raise ValueError(f"form {form} is not positive definite")
    n_max = _qlen(order)
    # A m^2 + B m n + C n^2 <= N  implies  n^2 <= 4 A N/|D| and m^2 <= 4 C N/|D|
    bn = math.isqrt(4 * A * n_max // -disc) + 1
    bm = math.isqrt(4 * C * n_max // -disc) + 1
    coeffs = [0] * n_max
    for n in range(-bn, bn + 1):
        for m in range(-bm, bm + 1):
            v = A * m * m + B * m * n + C * n * n
            if v < n_max:
                coeffs[v] += 1
    return QSeries(coeffs, 0, DENOM, DENOM * n_max)


def lattice_theta(form: tuple[int, int, int], order) -> QSeries:
    """Square of the lattice sum of a positive definite binary form."""
    s = lattice_sum(form, order)
    return s * s


# ----- catalog ---------------------------------------------------------------

ETA_FORMS: dict[str, EtaProduct] = {
    "eta": EtaProduct(1, {1: 1}),
    "z": eta((2, 2), (10, 2)),
    "u": eta((1, 2), (20, 2), (4, -2), (5, -2)),
    "v": eta((2, 2), (5, 2), (20, 2), (1, -2), (4, -2), (10, -2)),
    "k": eta((4, 2), (20, 2), (2, -2), (10, -2)),
    "w": eta((2, 3), (20, 3), (4, -3), (10, -3)),
    "one_plus_v": eta((10, 8), (1, -1), (4, -1), (5, -3), (20, -3)),
    "one_plus_5v": eta((2, 10), (5, 1), (20, 1), (1, -5), (4, -5), (10, -2)),
}

QUADRATIC_FORMS = {"Z": (1, 0, 5), "Zbold": (2, 2, 3)}


def _theta4(which: int, order) -> QSeries:
    return build(f"theta{which}", order) ** 4


_BUILDERS: dict[str, Callable[[int], QSeries]] = {
    "theta2": lambda N: theta_series(2, N),
    "theta3": lambda N: theta_series(3, N),
    "theta4": lambda N: theta_series(4, N),
    "Z": lambda N: lattice_theta((1, 0, 5), N),
    "Zbold": lambda N: lattice_theta((2, 2, 3), N),
    "X": lambda N: build("z", N) / build("Z", N + 1),
    "F": lambda N: _theta4(3, N),
    "T": lambda N: (_theta4(2, N + 1) * _theta4(4, N + 1)) / (16 * _theta4(3, N + 1) ** 2),
    "x": lambda N: _theta4(2, N) / _theta4(3, N),
}
for _d in divisors(LEVEL):
    _BUILDERS[f"P{_d}"] = (lambda d: lambda N: eisenstein_P(d, N))(_d)
    _BUILDERS[f"Q{_d}"] = (lambda d: lambda N: eisenstein_Q(d, N))(_d)
for _name, _e in ETA_FORMS.items():
    _BUILDERS[_name] = (lambda e: lambda N: eta_expand(e, N))(_e)

HAUPTMODULN = {
    "20+": ("1/u - 2 + u", lambda N: 1 / build("u", N + 2) - 2 + build("u", N)),
    "20|2+": ("1/w - w", lambda N: 1 / build("w", N + 2) - build("w", N)),
    "20+4": ("1/v + 2", lambda N: 1 / build("v", N + 2) + 2),
    "20|2+5": ("1/k", lambda N: 1 / build("k", N + 2)),
    "20|2+10": ("1/w", lambda N: 1 / build("w", N + 2)),
    "20+20": ("1/u - 2", lambda N: 1 / build("u", N + 2) - 2),
}


def catalog_names() -> list[str]:
    return list(_BUILDERS)


@lru_cache(maxsize=512)
def _build(name: str, order: Fraction) -> QSeries:
    return _BUILDERS[name](order).truncate(int(DENOM * order))


def build(name: str, order) -> QSeries:
    """Look up a catalog object by key and expand it to the given q-order."""
    if name not in _BUILDERS:
        raise KeyError(f"unknown catalog object {name!r}")
    return _build(name, Fraction(order))


def hauptmodul(group: str, order) -> QSeries:
    return HAUPTMODULN[group][1](order).truncate(int(DENOM * Fraction(order)))


# ----- relations -------------------------------------------------------------


@dataclass(frozen=True)
class RelationReport:
    order: int
    basis: list

    @property
    def independent(self) -> bool:
        return not self.basis

    @property
    def vector(self) -> list[Fraction]:
        if len(self.basis) != 1:
            raise ValueError(f"relation space has dimension {len(self.basis)}")
        v = self.basis[0]
        lead = next(x for x in v if x)
        return [x / lead for x in v]


def coefficient_matrix(series: Sequence[QSeries], order) -> list[list]:
    """Rows indexed by exponents below ``order``, columns by the series."""
    limit = int(DENOM * Fraction(order))
    for s in series:
        if s.order < limit:
            raise ValueError(f"series known only to q^{s.qorder}, below the requested order {order}")
    exps = sorted({int(e * DENOM) for s in series for e, _ in s.terms() if e * DENOM < limit})
    return [[s.coefficient(Fraction(e, DENOM)) for s in series] for e in exps]


def find_relation(series: Sequence[QSeries], order, guard: int = 10) -> RelationReport:
    """All rational linear relations sum c_i s_i = O(q^order)."""
    if Fraction(order) < len(series) + guard:
        raise ValueError(f"order {order} too small for {len(series)} series (guard {guard})")
    rows = coefficient_matrix(series, order)
    return RelationReport(int(order), RationalMatrix(rows).nullspace() if rows else
                          [[Fraction(int(i == j)) for i in range(len(series))] for j in range(len(series))])


M20_LABELS = ["2P2-P1", "4P4-P1", "5P5-P1", "10P10-P1", "20P20-P1", "z"]


def m20_basis(order) -> list[QSeries]:
    p1 = build("P1", order)
    out = [d * build(f"P{d}", order) - p1 for d in (2, 4, 5, 10, 20)]
    out.append(build("z", order))
    return out


@dataclass(frozen=True)
class Decomposition:
    order: int
    basis_coeffs: tuple

    @property
    def eisenstein(self) -> dict[int, Fraction]:
        """Coefficients c_d of P(q^d) in the Eisenstein part."""
        c = self.basis_coeffs
        out = {1: -sum(c[:5], Fraction(0))}
        for d, x in zip((2, 4, 5, 10, 20), c[:5]):
            out[d] = d * x
        return out

    @property
    def cusp(self) -> Fraction:
        return self.basis_coeffs[5]


def membership_decomposition(f: QSeries, order=None) -> Decomposition:
    """Write f in the six-element basis of M_2(Gamma_0(20)), exactly.

    Raises InconsistentSystem if no combination matches f below ``order``.
    """
    if order is None:
        order = f.qorder
    order = int(order)
    basis = m20_basis(order)
    rows = coefficient_matrix(basis + [f], order)
    a = RationalMatrix([r[:-1] for r in rows])
    x = a.solve([r[-1] for r in rows])
    return Decomposition(order, tuple(x))


def eisenstein_combination(coeffs: Mapping[int, Fraction], cusp=0, order=200) -> QSeries:
    """sum c_d P(q^d) + cusp * z."""
    out = QSeries.zero(order)
    for d, c in coeffs.items():
        if c:
            out = out + Fraction(c) * build(f"P{d}", order)
    if cusp:
        out = out + Fraction(cusp) * build("z", order)
    return out
