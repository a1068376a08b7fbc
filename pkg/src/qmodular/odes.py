"""
Identity catalog and differential equations.

Every identity is checked as an exact residual ``lhs - rhs`` to a stated
q-order. Identities involving square roots are checked squared, plus a
sign comparison of the leading coefficients.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from qmodular.forms import build, eta, eta_expand
from qmodular.series import DENOM, QSeries, compose, revert

GUARD = 6


@dataclass
class ResidualReport:
    name: str
    order: int
    tested_order: Fraction
    passed: bool
    first_nonzero_exponent: Fraction | None = None
    expect_nonzero: bool = False
    lead_signs_match: bool | None = None
    note: str = ""

    @property
    def status(self) -> str:
        if self.expect_nonzero:
            return "paper-discrepancy" if self.first_nonzero_exponent is not None else "fail"
        if self.passed:
            return "pass"
        if self.first_nonzero_exponent is None:
            return "insufficient-order"
        return "fail"

    @property
    def ok(self) -> bool:
        return self.status in ("pass", "paper-discrepancy")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["tested_order"] = str(self.tested_order)
        d["first_nonzero_exponent"] = (None if self.first_nonzero_exponent is None
                                       else str(self.first_nonzero_exponent))
        d["status"] = self.status
        if self.lead_signs_match is None:
            del d["lead_signs_match"]
        if not self.note:
            del d["note"]
        if not self.expect_nonzero:
            del d["expect_nonzero"]
        return d


def residual_report(name: str, lhs: QSeries, rhs: QSeries, order: int, **extra) -> ResidualReport:
    res = (lhs - rhs).truncate(DENOM * order)
    tested = res.qorder
    nz = res.first_nonzero()
    passed = nz is None and tested >= order
    return ResidualReport(name, order, tested, passed, nz, **extra)


@dataclass(frozen=True)
class Identity:
    name: str
    anchor: str
    sides: Callable[[int], tuple[QSeries, QSeries]]
    expect_nonzero: bool = False
    squared_signs: Callable[[int], tuple[QSeries, QSeries]] | None = None
    min_order: int = 2


def _qd(s: QSeries) -> QSeries:
    return s.q_derivative()


def _t4(i, N):
    return build(f"theta{i}", N) ** 4


def _t8(i, N):
    return _t4(i, N) ** 2


def _P(d, N):
    return build(f"P{d}", N)


def _comb(N, coeffs: dict, cusp=Fraction(0)) -> QSeries:
    out = QSeries.zero(N)
    for d, c in coeffs.items():
        out = out + Fraction(c) * _P(d, N)
    return out + Fraction(cusp) * build("z", N)


def _f(name, N):
    return build(name, N)


def _P2_param(N, literal: bool = False):
    t3_4 = _t4(3, N)
    x = _f("x", N)
    dx = _qd(x)
    if literal:
        # 6x(1-x) d(theta3^2)/dx as printed
        t3_2 = build("theta3", N) ** 2
        rhs = (1 - 2 * x) * t3_4 + 6 * x * (1 - x) * _qd(t3_2) / dx
    else:
        rhs = (1 - 2 * x) * t3_4 + 3 * x * (1 - x) * _qd(t3_4) / dx
    return _P(2, N), rhs


def _dF_dT(N, printed_sign: bool = False):
    t2, t3, t4 = _t4(2, N), _t4(3, N), _t4(4, N)
    s = -1 if printed_sign else 1
    lhs = _qd(_f("F", N)) / _qd(_f("T", N))
    rhs = 16 * t3**2 * (t2**2 - t4**2 + s * t3 * _P(2, N)) / (3 * t2 * t4 * (t3 - 2 * t2))
    return lhs, rhs


def _uvz(N):
    return _f("u", N), _f("v", N), _f("z", N)


ZERO = QSeries.zero()

_ENTRIES: list[Identity] = [
    Identity("jacobi-quartic", "theta3^4 = theta4^4 + theta2^4",
             lambda N: (_t4(3, N), _t4(4, N) + _t4(2, N))),
    Identity("deq-theta3", "q d/dq theta3^4 = (theta2^8 - theta4^8 + theta3^4 P2)/3",
             lambda N: (_qd(_t4(3, N)), (_t8(2, N) - _t8(4, N) + _t4(3, N) * _P(2, N)) / 3)),
    Identity("deq-theta4", "q d/dq theta4^4 = (theta2^8 - theta3^8 + theta4^4 P2)/3",
             lambda N: (_qd(_t4(4, N)), (_t8(2, N) - _t8(3, N) + _t4(4, N) * _P(2, N)) / 3)),
    Identity("deq-theta2", "q d/dq theta2^4 = (theta3^8 - theta4^8 + theta2^4 P2)/3",
             lambda N: (_qd(_t4(2, N)), (_t8(3, N) - _t8(4, N) + _t4(2, N) * _P(2, N)) / 3)),
    Identity("deq-P2", "q d/dq P2 = (2 P2^2 - theta2^8 - theta3^8 - theta4^8)/12",
             lambda N: (_qd(_P(2, N)), (2 * _P(2, N) ** 2 - _t8(2, N) - _t8(3, N) - _t8(4, N)) / 12)),
    Identity("ramanujan-P", "q dP/dq = (P^2 - Q)/12",
             lambda N: (_qd(_P(1, N)), (_P(1, N) ** 2 - _f("Q1", N)) / 12)),
    Identity("Q2-theta", "Q(q^2) = (theta2^8 + theta3^8 + theta4^8)/2",
             lambda N: (_f("Q2", N), (_t8(2, N) + _t8(3, N) + _t8(4, N)) / 2)),
    Identity("jacobi-x", "q dx/dq = theta3^4 x(1-x), x = theta2^4/theta3^4",
             lambda N: (_qd(_f("x", N)), _t4(3, N) * _f("x", N) * (1 - _f("x", N)))),
    Identity("P2-parameterization", "P(q^2) = (1-2x) theta3^4 + 3x(1-x) d(theta3^4)/dx",
             lambda N: _P2_param(N)),
    Identity("dT", "q dT/dq = theta2^4 theta4^4/(16 theta3^4) (1 - 2 theta2^4/theta3^4)",
             lambda N: (_qd(_f("T", N)),
                        _t4(2, N) * _t4(4, N) / (16 * _t4(3, N)) * (1 - 2 * _t4(2, N) / _t4(3, N)))),
    Identity("dF-dT", "dF/dT = 16 theta3^8 (theta2^8 - theta4^8 + theta3^4 P2)/(3 theta2^4 theta4^4 (theta3^4 - 2 theta2^4))",
             lambda N: _dF_dT(N)),
    Identity("zu-eisenstein", "zu = (P1 - 6P2 + 20P4 - 25P5 + 30P10 - 20P20)/72 + z/3",
             lambda N: (_f("z", N) * _f("u", N),
                        _comb(N, {1: Fraction(1, 72), 2: Fraction(-6, 72), 4: Fraction(20, 72), 5: Fraction(-25, 72),
                                  10: Fraction(30, 72), 20: Fraction(-20, 72)}, Fraction(1, 3)))),
    Identity("z/u-eisenstein", "z/u = (-5P1 + 6P2 - 4P4 + 5P5 - 30P10 + 100P20)/72 + z/3",
             lambda N: (_f("z", N + 2) / _f("u", N + 2),
                        _comb(N, {1: Fraction(-5, 72), 2: Fraction(6, 72), 4: Fraction(-4, 72), 5: Fraction(5, 72),
                                  10: Fraction(-30, 72), 20: Fraction(100, 72)}, Fraction(1, 3)))),
    Identity("zv-eisenstein", "zv = (-P1 + 4P4 + P5 - 4P20)/72 - z/3",
             lambda N: (_f("z", N) * _f("v", N),
                        _comb(N, {1: Fraction(-1, 72), 4: Fraction(4, 72), 5: Fraction(1, 72), 20: Fraction(-4, 72)},
                              Fraction(-1, 3)))),
    Identity("z/v-eisenstein", "z/v = (P1 - 4P4 - 25P5 + 100P20)/72 - 5z/3",
             lambda N: (_f("z", N + 2) / _f("v", N + 2),
                        _comb(N, {1: Fraction(1, 72), 4: Fraction(-4, 72), 5: Fraction(-25, 72), 20: Fraction(100, 72)},
                              Fraction(-5, 3)))),
    Identity("cusp-relation", "4z + 5zv + z/v - zu - z/u = 0",
             lambda N: ((lambda u, v, z: 4 * z + 5 * z * v + z / v - z * u - z / u)(*_uvz(N + 2)), ZERO)),
    Identity("uv-hauptmodul", "1/u + u = 1/v + 4 + 5v",
             lambda N: ((lambda u, v, z: (1 / u + u, 1 / v + 4 + 5 * v))(*_uvz(N + 2)))),
    Identity("one-plus-v", "1 + v = eta10^8/(eta1 eta4 eta5^3 eta20^3)",
             lambda N: (1 + _f("v", N), _f("one_plus_v", N))),
    Identity("one-plus-5v", "1 + 5v = eta2^10 eta5 eta20/(eta1^5 eta4^5 eta10^2)",
             lambda N: (1 + 5 * _f("v", N), _f("one_plus_5v", N))),
    Identity("z-one-plus-v", "z + zv = -P1/72 + P4/18 + P5/72 - P20/18 + 2z/3",
             lambda N: (_f("z", N) * (1 + _f("v", N)),
                        _comb(N, {1: Fraction(-1, 72), 4: Fraction(1, 18), 5: Fraction(1, 72), 20: Fraction(-1, 18)},
                              Fraction(2, 3)))),
    Identity("z-eta-quotient", "eta2^2 eta10^10/(eta20^3 eta5^3 eta4 eta1) = -P1/72 + P4/18 + P5/72 - P20/18 + 2z/3",
             lambda N: (eta_expand(eta((2, 2), (10, 10), (20, -3), (5, -3), (4, -1), (1, -1)), N),
                        _comb(N, {1: Fraction(-1, 72), 4: Fraction(1, 18), 5: Fraction(1, 72), 20: Fraction(-1, 18)},
                              Fraction(2, 3)))),
    Identity("Z-eisenstein", "Z = -P1/18 + 2P4/9 - 5P5/18 + 10P20/9 + 8z/3",
             lambda N: (_f("Z", N),
                        _comb(N, {1: Fraction(-1, 18), 4: Fraction(2, 9), 5: Fraction(-5, 18), 20: Fraction(10, 9)},
                              Fraction(8, 3)))),
    Identity("Z-in-u", "Z = zu + z/u + 2z",
             lambda N: (_f("Z", N), (lambda u, v, z: z * u + z / u + 2 * z)(*_uvz(N + 2)))),
    Identity("X-in-u", "X = u/(1+u)^2",
             lambda N: (_f("X", N), _f("u", N) / (1 + _f("u", N)) ** 2)),
    Identity("X-in-v", "X = v/((1+v)(1+5v))",
             lambda N: (_f("X", N), _f("v", N) / ((1 + _f("v", N)) * (1 + 5 * _f("v", N))))),
    Identity("dlogu-eisenstein", "q d/dq log u = P1/12 - P4/3 - 5P5/12 + 5P20/3",
             lambda N: (_f("u", N + 2).log_derivative(),
                        _comb(N, {1: Fraction(1, 12), 4: Fraction(-1, 3), 5: Fraction(-5, 12), 20: Fraction(5, 3)}))),
    Identity("dlogu-cusp", "q d/dq log u = -5zv + z/v",
             lambda N: (_f("u", N + 2).log_derivative(),
                        (lambda u, v, z: -5 * z * v + z / v)(*_uvz(N + 2)))),
    Identity("F-in-v", "theta3^4 = z(1+5v)^2/v",
             lambda N: (_f("F", N), (lambda u, v, z: z * (1 + 5 * v) ** 2 / v)(*_uvz(N + 2)))),
    Identity("T-in-v", "T = v/((1+v)(1+5v)^5)",
             lambda N: (_f("T", N), _f("v", N) / ((1 + _f("v", N)) * (1 + 5 * _f("v", N)) ** 5))),
    Identity("Z-in-v", "Z = z(1+v)(1+5v)/v",
             lambda N: (_f("Z", N), (lambda u, v, z: z * (1 + v) * (1 + 5 * v) / v)(*_uvz(N + 2)))),
    Identity("theta-sign-flip", "theta3(-q) = theta4(q)",
             lambda N: (build("theta3", N).negate_q(), build("theta4", N))),
    Identity("du-squared", "(q d/dq log u)^2 = (z/u)^2 (1 - 8u - 2u^2 - 8u^3 + u^4)",
             lambda N: (lambda u, v, z: (u.log_derivative() ** 2,
                                         (z / u) ** 2 * (1 - 8 * u - 2 * u**2 - 8 * u**3 + u**4)))(*_uvz(N + 2)),
             squared_signs=lambda N: (lambda u, v, z: (u.log_derivative(), z / u))(*_uvz(N + 2))),
    Identity("dX-squared", "(q d/dq log X)^2 = Z^2 (1-4X)(1-12X+16X^2)",
             lambda N: (lambda X, Z: (X.log_derivative() ** 2, Z**2 * (1 - 4 * X) * (1 - 12 * X + 16 * X**2)))(
                 _f("X", N + 2), _f("Z", N)),
             squared_signs=lambda N: (_f("X", N + 2).log_derivative(), _f("Z", N))),
    # literal readings that do not hold; kept to document the discrepancy
    Identity("P2-parameterization-literal", "P(q^2) = (1-2x) theta3^4 + 6x(1-x) d(theta3^2)/dx, as printed",
             lambda N: _P2_param(N, literal=True), expect_nonzero=True),
    Identity("dF-dT-literal", "dF/dT with -theta3^4 P2 in the numerator, as printed",
             lambda N: _dF_dT(N, printed_sign=True), expect_nonzero=True),
    Identity("Z-eta-literal", "zu + z/u + 2z = eta1^24 eta4^24/eta2^48, as printed",
             lambda N: ((lambda u, v, z: z * u + z / u + 2 * z)(*_uvz(N + 2)),
                        eta_expand(eta((1, 24), (4, 24), (2, -48)), N)), expect_nonzero=True),
]

IDENTITIES: dict[str, Identity] = {e.name: e for e in _ENTRIES}

SQUARED = ("du-squared", "dX-squared")


def identity_names(include_literal: bool = True) -> list[str]:
    return [e.name for e in _ENTRIES if include_literal or not e.expect_nonzero]


def verify_identity(name: str, order: int = 200) -> ResidualReport:
    try:
        entry = IDENTITIES[name]
    except KeyError:
        raise KeyError(f"unknown identity {name!r}") from None
    if order < entry.min_order:
        raise ValueError(f"{name} needs order >= {entry.min_order}")
    lhs, rhs = entry.sides(order + GUARD)
    extra = {}
    if entry.squared_signs is not None:
        a, b = entry.squared_signs(order + GUARD)
        extra["lead_signs_match"] = (a.coeffs[0] > 0) == (b.coeffs[0] > 0)
    report = residual_report(name, lhs, rhs, order, expect_nonzero=entry.expect_nonzero, **extra)
    if extra.get("lead_signs_match") is False:
        report.passed = False
    return report


def verify_sqrt_identity(name: str, order: int = 200) -> ResidualReport:
    if name not in SQUARED:
        raise KeyError(f"{name!r} is not a squared-radical identity")
    return verify_identity(name, order)


def verify_P2_parameterization(order: int = 200) -> tuple[ResidualReport, ResidualReport]:
    """The corrected parameterization and the literal printed one."""
    return verify_identity("P2-parameterization", order), verify_identity("P2-parameterization-literal", order)


# ----- coefficient sequences ---------------------------------------------------


@dataclass(frozen=True)
class CoeffSequence:
    values: tuple

    @property
    def integral(self) -> bool:
        return all(Fraction(v).denominator == 1 for v in self.values)

    def as_ints(self) -> list[int]:
        if not self.integral:
            raise ValueError("sequence has non-integral entries")
        return [int(v) for v in self.values]

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]


def recurrence_coeffs(count: int) -> CoeffSequence:
    """a_0..a_{count-1} from the three-term recurrence with seeds 1, 4, 20."""
    if count < 1:
        raise ValueError("count must be positive")
    a = [Fraction(1), Fraction(4), Fraction(20)]
    n = 2
    while len(a) < count:
        d = Fraction(1, (n + 1) ** 3)
        a.append(4 * (2 * n + 1) * (2 * n * n + 2 * n + 1) * d * a[n]
                 - 16 * n * (4 * n * n + 1) * d * a[n - 1]
                 + 8 * (2 * n - 1) ** 3 * d * a[n - 2])
        n += 1
    return CoeffSequence(tuple(int(x) if x.denominator == 1 else x for x in a[:count]))


def series_in(target: str, variable: str, order: int) -> QSeries:
    """Expand a catalog object as a power series in a catalog Hauptmodul
    (variable = q + O(q^2)) by reversion and composition."""
    var = build(variable, order)
    inv = revert(var)
    return compose(build(target, order), inv)


def Z_in_X(order: int) -> CoeffSequence:
    """Coefficients of Z as a power series in X, through X^(order-1)."""
    if order < 1:
        raise ValueError("order must be positive")
    s = series_in("Z", "X", order)
    return CoeffSequence(tuple(s.to_list(order)))


def F_in_T(order: int) -> CoeffSequence:
    s = series_in("F", "T", order)
    return CoeffSequence(tuple(s.to_list(order)))


# ----- ODE residuals -------------------------------------------------------------

Poly = Sequence  # coefficient list, lowest degree first


def _poly(coeffs: Poly) -> QSeries:
    return QSeries.from_q([Fraction(c) for c in coeffs])


def _pmul(a: Poly, b: Poly) -> list:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _padd(*ps: Poly) -> list:
    n = max(len(p) for p in ps)
    out = [Fraction(0)] * n
    for p in ps:
        for i, x in enumerate(p):
            out[i] += x
    return out


def _trim(p: Poly) -> list:
    p = [Fraction(x) for x in p]
    while p and p[-1] == 0:
        p.pop()
    return p


# Z-ODE in d/dX form: coefficients of D^3, D^2, D, 1
ZX_OPERATOR = (
    _pmul([0, 0, 1], _pmul([1, -4], [1, -12, 16])),
    _pmul([0, 3], [1, -24, 128, -160]),
    [1, -56, 464, -784],
    [-4, 80, -216],
)

# compact form in theta = X d/dX: coefficients of theta^3, theta^2, theta, 1
ZX_THETA_OPERATOR = (
    _pmul([-1, 4], [1, -12, 16]),
    _pmul([0, 24], _pmul([-1, 2], [-1, 6])),
    _pmul([0, 16], [1, -13, 27]),
    _pmul([0, 4], [1, -20, 54]),
)

FT_OPERATOR = (
    _pmul([0, 0, 1], [1, -64]),
    _pmul([0, 3], [1, -96]),
    [1, -208],
    [-8],
)


def theta_to_d(theta_op) -> tuple:
    """Rewrite sum c_k theta^k (theta = X d/dX) in the basis D^3, D^2, D, 1.

    Uses theta = X D, theta^2 = X^2 D^2 + X D, theta^3 = X^3 D^3 + 3 X^2 D^2 + X D.
    """
    c3, c2, c1, c0 = theta_op
    d3 = _pmul(c3, [0, 0, 0, 1])
    d2 = _padd(_pmul(c3, [0, 0, 3]), _pmul(c2, [0, 0, 1]))
    d1 = _pmul(_padd(c3, c2, c1), [0, 1])
    return tuple(_trim(p) for p in (d3, d2, d1, c0))


def apply_operator(op, f: QSeries) -> QSeries:
    """sum p_k(X) D^k f with D = d/dX, highest derivative first in ``op``."""
    k = len(op) - 1
    out = None
    g = f
    derivs = [f]
    for _ in range(k):
        g = g.derivative()
        derivs.append(g)
    for p, d in zip(op, reversed(derivs)):
        term = _poly(p) * d
        out = term if out is None else out + term
    return out


def apply_theta_operator(op, f: QSeries) -> QSeries:
    out = None
    g = f
    powers = [f]
    for _ in range(len(op) - 1):
        g = g.q_derivative()
        powers.append(g)
    for p, d in zip(op, reversed(powers)):
        term = _poly(p) * d
        out = term if out is None else out + term
    return out


@dataclass
class ODEReport:
    name: str
    order: int
    residuals: list = field(default_factory=list)
    operators_agree: bool | None = None

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.residuals) and self.operators_agree is not False

    def to_dict(self) -> dict:
        d = {"name": self.name, "order": self.order, "pass": self.passed,
             "residuals": [r.to_dict() for r in self.residuals]}
        if self.operators_agree is not None:
            d["operators_agree"] = self.operators_agree
        return d


def apply_operator_q(op, f: QSeries, x: QSeries) -> QSeries:
    """Same as apply_operator, with d/dX realized as (q d/dq) / (q dx/dq)
    on q-series, so no reversion is involved."""
    dx = x.q_derivative()
    derivs = [f]
    for _ in range(len(op) - 1):
        derivs.append(derivs[-1].q_derivative() / dx)
    out = None
    for p, d in zip(op, reversed(derivs)):
        poly = QSeries.zero() if not p else compose(_poly(p), x) if len(p) > 1 else QSeries.constant(Fraction(p[0]))
        term = poly * d
        out = term if out is None else out + term
    return out


def _in_variable_report(name, res: QSeries, order):
    res = res.truncate(DENOM * order)
    nz = res.first_nonzero()
    return ResidualReport(name, order, res.qorder, nz is None and res.qorder >= order, nz)


def ode_residual_Z(order: int = 50) -> ODEReport:
    """Z(X) from reversion, substituted into both forms of the third-order ODE."""
    if order < 3:
        raise ValueError("order must be at least 3")
    zx = series_in("Z", "X", order + 4)
    r1 = apply_operator(ZX_OPERATOR, zx)
    r2 = apply_theta_operator(ZX_THETA_OPERATOR, zx)
    # theta form = -X * (d/dX form)
    converted = theta_to_d(ZX_THETA_OPERATOR)
    expected = tuple(_trim(_pmul(p, [0, -1])) for p in ZX_OPERATOR)
    # second path: everything as q-series, X = q + O(q^2) so orders coincide
    N = order + 4
    r3 = apply_operator_q(ZX_OPERATOR, build("Z", N), build("X", N))
    rep = ODEReport("Z-ode", order)
    rep.residuals = [_in_variable_report("ZX-equation", r1, order),
                     _in_variable_report("ZX-theta-form", r2, order),
                     _in_variable_report("ZX-equation-q", r3, order)]
    rep.operators_agree = converted == expected
    return rep


def ode_residual_F(order: int = 50) -> ODEReport:
    if order < 3:
        raise ValueError("order must be at least 3")
    ft = series_in("F", "T", order + 4)
    r = apply_operator(FT_OPERATOR, ft)
    N = order + 4
    r2 = apply_operator_q(FT_OPERATOR, build("F", N), build("T", N))
    rep = ODEReport("F-ode", order)
    rep.residuals = [_in_variable_report("FT-equation", r, order),
                     _in_variable_report("FT-equation-q", r2, order)]
    return rep
