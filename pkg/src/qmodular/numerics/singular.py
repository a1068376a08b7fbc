"""Singular values of X at CM points and the 1/pi series built on them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath

from qmodular.numerics.bigcomplex import BigComplex, log10_abs
from qmodular.numerics.evaluate import X_value
from qmodular.numerics.pi import chudnovsky_pi
from qmodular.numerics.tables import PiSeriesRow, SingularRow, Tables, load_tables
from qmodular.odes import recurrence_coeffs


def reference_inv_pi(prec: int) -> BigComplex:
    """1/pi from the independent Chudnovsky value, with 64 guard bits."""
    return (1 / chudnovsky_pi(prec + 64)).with_prec(prec)


def _fmt(x: mpmath.mpf) -> str:
    return mpmath.nstr(x, 6) if x else "0"


@dataclass
class SingularReport:
    form: str
    disc: int
    status: str
    error: mpmath.mpf
    certificate: mpmath.mpf
    tolerance: mpmath.mpf
    routes_agree: bool
    value: str
    printed: str
    printed_error: mpmath.mpf | None = None
    diagonal_root: bool | None = None

    @property
    def ok(self) -> bool:
        return self.status in ("pass", "paper-discrepancy")

    def to_dict(self) -> dict:
        d = {"form": self.form, "disc": self.disc, "status": self.status, "value": self.value,
             "printed": self.printed, "error": _fmt(self.error), "certificate": _fmt(self.certificate),
             "tolerance": _fmt(self.tolerance), "routes_agree": self.routes_agree}
        if self.printed_error is not None:
            d["printed_error"] = _fmt(self.printed_error)
        if self.diagonal_root is not None:
            d["diagonal_root"] = self.diagonal_root
        return d


def verify_singular_value(row: SingularRow, prec: int = 256, tables: Tables | None = None) -> SingularReport:
    """Compare X(tau(form)) with the tabulated surd."""
    from qmodular.modeq import PSI3
    from qmodular.numerics.surd import parse_surd

    tau = row.form.tau(prec + 32)
    x = X_value(tau, prec + 32, "eta")
    x2 = X_value(tau, prec + 32, "lattice")
    agree = (x.value - x2.value).abs() <= x.error + x2.error
    target = row.target
    err = (x.value - target.to_bigcomplex(prec + 32)).abs()
    tol = mpmath.mpf(2) ** (-prec // 2)
    good = err < tol and agree
    printed_err = None
    if row.status != "ok":
        try:
            printed_err = (x.value - parse_surd(row.printed).to_bigcomplex(prec)).abs()
        except ValueError:
            printed_err = None
    diag = None
    mats = (tables.matrices if tables is not None else [])
    if any(m.form == row.form and m.n == 3 for m in mats):
        diag = target.evaluate_poly(PSI3.diagonal()) == 0
        good = good and diag
    if not good:
        status = "fail"
    else:
        status = "pass" if row.status == "ok" else "paper-discrepancy"
    return SingularReport(str(row.form), row.disc, status, err, x.error, tol, agree,
                          str(target), row.printed, printed_err, diag)


def verify_all_singular(prec: int = 256, tables: Tables | None = None) -> list[SingularReport]:
    t = tables or load_tables()
    return [verify_singular_value(r, prec, t) for r in t.singular]


@lru_cache(maxsize=8)
def _coeffs(terms: int) -> tuple[int, ...]:
    return tuple(recurrence_coeffs(terms).as_ints())


# a_{n+1}/a_n stays below 8/(3 - sqrt 5) < 10.48
GROWTH = mpmath.mpf("10.48")


@dataclass
class PiSum:
    row: int
    terms: int
    value: BigComplex
    tail_estimate: mpmath.mpf
    error: mpmath.mpf = field(default=mpmath.mpf(0))
    imag_error: mpmath.mpf = field(default=mpmath.mpf(0))

    @property
    def digits(self) -> int:
        if self.error == 0:
            return self.value.prec * 30103 // 100000
        return max(0, math.floor(-log10_abs(self.error * mpmath.pi)))

    def to_dict(self) -> dict:
        return {"row": self.row, "terms": self.terms, "value": self.value.to_str(40),
                "error": _fmt(self.error), "imag": _fmt(self.imag_error),
                "tail_estimate": _fmt(self.tail_estimate), "digits": self.digits}


def pi_series_sum(row: PiSeriesRow, terms: int, prec: int = 512) -> PiSum:
    """A * sum_{n < terms} a_n (n + B) C^n with a heuristic tail estimate."""
    if terms < 1:
        raise ValueError("terms must be positive")
    a = _coeffs(max(terms, 3))
    w = prec + 32
    A = row.A.to_bigcomplex(w)
    B = row.B.to_bigcomplex(w)
    C = row.C.to_bigcomplex(w)
    acc = BigComplex(0, 0, w)
    cn = BigComplex(1, 0, w)
    last = None
    for n in range(terms):
        last = cn * a[n] * (B + n)
        acc = acc + last
        cn = cn * C
    val = (A * acc).with_prec(prec)
    x = C.abs() * GROWTH
    lt = (A * last).abs()
    tail = lt * x / (1 - x) if x < 1 else mpmath.inf
    return PiSum(row.index, terms, val, tail)


def pi_check(row: PiSeriesRow, terms: int = 80, prec: int = 512) -> PiSum:
    s = pi_series_sum(row, terms, prec)
    ref = reference_inv_pi(prec)
    s.error = (s.value - ref).abs()
    s.imag_error = s.value.imag.abs()
    return s


@dataclass
class MatchReport:
    matches: dict
    unmatched_series: list
    forms_without_series: list

    def to_dict(self) -> dict:
        return {"matches": {str(k): v for k, v in self.matches.items()},
                "unmatched_series": self.unmatched_series,
                "forms_without_series": self.forms_without_series}


def match_table3_to_forms(tables: Tables | None = None, prec: int = 128) -> MatchReport:
    """Pair each series row with the forms whose computed X(tau) equals its C."""
    t = tables or load_tables()
    xs = [(r.form, X_value(r.form.tau(prec), prec).value) for r in t.singular]
    tol = mpmath.mpf(2) ** (-prec // 2)
    matches: dict[int, list[str]] = {}
    used = set()
    for s in t.series:
        c = s.C.to_bigcomplex(prec)
        hits = [str(f) for f, x in xs if (x - c).abs() < tol]
        matches[s.index] = hits
        used.update(hits)
    unmatched = [i for i, h in matches.items() if not h]
    orphans = [str(f) for f, _ in xs if str(f) not in used]
    return MatchReport(matches, unmatched, orphans)
