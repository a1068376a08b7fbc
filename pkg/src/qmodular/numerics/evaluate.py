"""Evaluation of q-series and modular objects at points of the upper half plane.

Every value comes with an error certificate: a bound on |computed - true|
that covers the discarded tail and accumulated rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from qmodular.forms import ETA_FORMS, QUADRATIC_FORMS, EtaProduct, euler_function, lattice_sum
from qmodular.numerics.bigcomplex import BigComplex
from qmodular.numerics.pi import chudnovsky_pi
from qmodular.series import DENOM, QSeries

GUARD = 32
_SAFETY = mpmath.mpf("1.01")


class PrecisionError(ArithmeticError):
    """The requested accuracy cannot be certified at this point."""


@dataclass(frozen=True)
class Certified:
    value: BigComplex
    error: mpmath.mpf
    terms: int = 0
    heuristic: bool = False

    @property
    def prec(self) -> int:
        return self.value.prec


def _mpf(x) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x) if not isinstance(x, mpmath.mpf) else x


def qpower(tau: BigComplex, exponent24: int, prec: int) -> BigComplex:
    """exp(2 pi i tau * exponent24/24)."""
    two_pi_i = BigComplex(0, 2, prec) * chudnovsky_pi(prec)
    return (two_pi_i * tau.with_prec(prec) * Fraction(exponent24, DENOM)).exp()


def _tail(C, p: int, r, k0: int):
    """Bound for sum_{k >= k0} C (k+1)^p r^k."""
    if C == 0:
        return mpmath.mpf(0)
    rho = r * (mpmath.mpf(k0 + 2) / (k0 + 1)) ** p
    if rho >= 1:
        return mpmath.inf
    return C * mpmath.mpf(k0 + 1) ** p * r**k0 / (1 - rho)


def eval_qseries(s: QSeries, tau: BigComplex, prec: int = 256,
                 coeff_bound: tuple | None = None) -> Certified:
    """Sum ``s`` at q = exp(2 pi i tau).

    ``coeff_bound = (C, p)`` asserts |c_k| <= C (k+1)^p for the k-th grid
    coefficient of the untruncated object; it bounds the part beyond the
    series' truncation order. Without it the largest coefficient present is
    used, and the certificate is marked heuristic.
    """
    if tau.im_mpf() <= 0:
        raise ValueError("tau must lie in the upper half plane")
    w = prec + GUARD
    thr = mpmath.mpf(2) ** (-prec - GUARD)
    if s.is_zero():
        return Certified(BigComplex(0, 0, prec), mpmath.mpf(0))
    base = qpower(tau, s.step, w)
    start = qpower(tau, s.lead, w)
    r = base.abs()
    if r >= 1 - mpmath.mpf(2) ** -20:
        raise PrecisionError("|q| too close to 1 for a certified sum")
    coeffs = s.coeffs
    n = len(coeffs)
    mags = [abs(Fraction(c)) for c in coeffs]
    suffix = [Fraction(0)] * (n + 1)
    for k in range(n - 1, -1, -1):
        suffix[k] = max(suffix[k + 1], mags[k])
    sabs = start.abs()

    heuristic = False
    if s.is_exact:
        trunc = mpmath.mpf(0)
    else:
        if coeff_bound is None:
            coeff_bound, heuristic = (_mpf(max(mags)), 0), True
        C, p = coeff_bound
        trunc = sabs * _tail(_mpf(C), p, r, n)
        if not trunc < thr * 2 ** (GUARD // 2):
            raise PrecisionError("series truncated too early for the requested precision")

    acc = BigComplex(0, 0, w)
    term = start
    absum = mpmath.mpf(0)
    used = 0
    stop_tail = mpmath.mpf(0)
    for k in range(n):
        rest = sabs * _mpf(suffix[k]) * r**k / (1 - r)
        if rest < thr:
            stop_tail = rest
            break
        c = coeffs[k]
        if c:
            t = term * c
            acc = acc + t
            absum += t.abs()
        term = term * base
        used = k + 1
    rounding = (used + 2) * 4 * mpmath.mpf(2) ** (-w) * (absum + sabs)
    value = acc.with_prec(prec)
    final = value.abs() * mpmath.mpf(2) ** (1 - prec)
    err = (trunc + stop_tail + rounding + final) * _SAFETY
    return Certified(value, err, used, heuristic)


def _euler_order(r, prec: int) -> int:
    # r^N / (1 - r) below 2^-(prec+GUARD+8)
    lr = -math.log(float(r))
    extra = -math.log(float(1 - r))
    return int(((prec + GUARD + 8) * math.log(2) + extra) / lr) + 2


def eta_value(tau: BigComplex, prec: int = 256) -> Certified:
    """Dedekind eta by the pentagonal series."""
    if tau.im_mpf() <= 0:
        raise ValueError("tau must lie in the upper half plane")
    r = qpower(tau, DENOM, 64).abs()
    if r >= 1 - mpmath.mpf(2) ** -20:
        raise PrecisionError("|q| too close to 1")
    N = _euler_order(r, prec)
    e = euler_function(N).shift(1)
    return eval_qseries(e, tau, prec, coeff_bound=(1, 0))


def eta_product_value(e: EtaProduct, tau: BigComplex, prec: int = 256) -> Certified:
    """prod eta(delta tau)^r with a first-order relative error bound."""
    w = prec + GUARD
    val = BigComplex(1, 0, w)
    rel = mpmath.mpf(0)
    for delta, ex in e.exponent_map.items():
        c = eta_value(tau * delta, w)
        mag = c.value.abs()
        if mag == 0 or c.error >= mag / 4:
            raise PrecisionError("eta value not resolved")
        val = val * c.value ** ex
        rel += abs(ex) * c.error / mag
    rel = rel * 2 + mpmath.mpf(2) ** (-w) * 8 * len(e.exponent_map)
    out = val.with_prec(prec)
    err = out.abs() * rel * _SAFETY + out.abs() * mpmath.mpf(2) ** (1 - prec)
    return Certified(out, err)


def lattice_value(form: tuple[int, int, int], tau: BigComplex, prec: int = 256) -> Certified:
    """sum over Z^2 of q^(A m^2 + B m n + C n^2)."""
    A, B, C = form
    D = -(B * B - 4 * A * C)
    r = qpower(tau, DENOM, 64).abs()
    if r >= 1 - mpmath.mpf(2) ** -20:
        raise PrecisionError("|q| too close to 1")
    K = (2 * math.sqrt(4 * C / D) + 3) * (2 * math.sqrt(4 * A / D) + 3)
    N = _euler_order(r, prec) + 8
    while _tail(mpmath.mpf(K), 1, r, N) > mpmath.mpf(2) ** (-prec - GUARD):
        N += max(8, N // 8)
    return eval_qseries(lattice_sum(form, N), tau, prec, coeff_bound=(K, 1))


def X_value(tau: BigComplex, prec: int = 256, route: str = "eta") -> Certified:
    """The level-20 Hauptmodul X = u/(1+u)^2 = z/Z at tau.

    route "eta" uses the eta quotient u; route "lattice" uses the eta
    quotient z over the squared theta series of x^2 + 5y^2.
    """
    w = prec + 16
    if route == "eta":
        u = eta_product_value(ETA_FORMS["u"], tau, w)
        uv = u.value
        x = uv / (1 + uv) ** 2
        # |dX/du| = |1-u| / |1+u|^3
        d = (1 - uv).abs() / ((1 + uv).abs() ** 3)
        if (1 + uv).abs() <= 2 * u.error:
            raise PrecisionError("1 + u not resolved")
        err = d * u.error * 2
    elif route == "lattice":
        z = eta_product_value(ETA_FORMS["z"], tau, w)
        th = lattice_value(QUADRATIC_FORMS["Z"], tau, w)
        Z = th.value * th.value
        Zerr = 2 * th.value.abs() * th.error * _SAFETY
        if Z.abs() <= 2 * Zerr:
            raise PrecisionError("Z not resolved")
        x = z.value / Z
        err = (z.error / Z.abs() + z.value.abs() * Zerr / Z.abs() ** 2) * 2
    else:
        raise ValueError(f"unknown route {route!r}")
    out = x.with_prec(prec)
    # rounding of the final quotient and of its inputs at the working precision
    ulp = mpmath.mpf(2) ** (4 - prec) * (1 + out.abs())
    return Certified(out, err * _SAFETY + ulp)
