from __future__ import annotations

from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import libmp

from oracles import reduced_classes
from qmodular.forms import ETA_FORMS
from qmodular.numerics import (
    BigComplex, PrecisionError, QuadForm, Radical, Surd, X_value, chudnovsky_pi,
    class_group_enumerate, eta_value, eval_qseries, parse_radical, parse_surd, reduce_form,
)
from qmodular.numerics.evaluate import eta_product_value, lattice_value
from qmodular.numerics.quadform import InvalidDiscriminant, class_number
from qmodular.numerics.singular import (
    GROWTH, match_table3_to_forms, pi_check, pi_series_sum, reference_inv_pi, verify_singular_value,
)
from qmodular.numerics.tables import ENV_VAR, TableError, load_tables, parse_tables
from qmodular.series import QSeries

TABLES = load_tables()
RHO = (3 - mpmath.sqrt(5)) / 8


def mp_at(prec: int):
    return mpmath.workprec(prec)


# ----- BigComplex and pi -------------------------------------------------------------


@pytest.mark.parametrize("prec", [53, 64, 256, 512, 2000])
def test_chudnovsky_matches_libmp(prec):
    ours = chudnovsky_pi(prec).re_mpf()
    ref = libmp.mpf_pi(prec + 20)
    with mp_at(prec + 20):
        diff = abs(ours - mpmath.mp.make_mpf(ref))
        assert diff <= mpmath.mpf(2) ** (2 - prec)


def test_bigcomplex_min_precision_rule():
    a = BigComplex(1, 2, 100)
    b = BigComplex(3, -1, 300)
    assert (a + b).prec == 100
    assert (a * b).prec == 100
    assert (a / b).prec == 100
    assert (b * 2).prec == 300


def test_bigcomplex_arithmetic():
    a = BigComplex(Fraction(1, 3), 2, 128)
    b = BigComplex(-1, Fraction(1, 7), 128)
    with mp_at(200):
        ra, rb = mpmath.mpc(mpmath.mpf(1) / 3, 2), mpmath.mpc(-1, mpmath.mpf(1) / 7)
        for ours, ref in [(a + b, ra + rb), (a - b, ra - rb), (a * b, ra * rb), (a / b, ra / rb),
                          (a**5, ra**5), (a.exp(), mpmath.exp(ra)), (b.sqrt(), mpmath.sqrt(rb))]:
            assert abs(ours.to_mpc() - ref) <= abs(ref) * mpmath.mpf(2) ** -120
    assert a.conj().im_mpf() == -a.im_mpf()
    assert BigComplex(0, 0, 64).is_zero()
    with pytest.raises(AttributeError):
        a.prec = 3


def test_bigcomplex_abs_keeps_precision():
    x = BigComplex(Fraction(1, 3), 0, 400)
    with mp_at(500):
        assert abs(x.abs() - mpmath.mpf(1) / 3) < mpmath.mpf(2) ** -390


# ----- surds -----------------------------------------------------------------------


def test_surd_normalization_and_parse():
    assert parse_surd("7/8-3/8*sqrt(5)") == Surd(Fraction(7, 8), Fraction(-3, 8), 5)
    assert parse_surd("sqrt(5/2)") == Surd(0, Fraction(1, 2), 10)
    assert parse_surd("1/16*sqrt(-2)") == Surd(0, Fraction(1, 16), -2)
    assert parse_surd("sqrt(4)") == 2
    assert Surd(0, 1, 12) == Surd(0, 2, 3)
    with pytest.raises(ValueError):
        parse_surd("7/8-x")


def test_surd_field_arithmetic():
    a = parse_surd("7/8-3/8*sqrt(5)")
    b = a.conjugate_surd()
    assert a * b == a.norm() == Fraction(1, 16)
    assert a + b == Fraction(7, 4)
    assert (a / b) * b == a
    assert a.evaluate_poly(a.minimal_polynomial()) == 0
    assert (Surd.sqrt(-15) ** 2) == -15
    with pytest.raises(ValueError):
        Surd(0, 1, 2) + Surd(0, 1, 3)


@pytest.mark.parametrize("text", ["7/8-3/8*sqrt(5)", "-721/4+57*sqrt(10)", "1/16*sqrt(-2)", "3/8"])
def test_surd_to_bigcomplex(text):
    s = parse_surd(text)
    v = s.to_bigcomplex(300)
    with mp_at(400):
        ref = mpmath.mpf(s.r.numerator) / s.r.denominator + (
            mpmath.mpf(s.s.numerator) / s.s.denominator) * mpmath.sqrt(mpmath.mpc(s.d))
        assert abs(v.to_mpc() - ref) <= mpmath.mpf(2) ** -290 * max(1, abs(ref))


def test_radical_parse_and_value():
    r = parse_radical("2*sqrt[-20+9*sqrt(5)]")
    assert r == Radical(Surd(2), parse_surd("-20+9*sqrt(5)"))
    with mp_at(300):
        ref = 2 * mpmath.sqrt(-20 + 9 * mpmath.sqrt(5))
        assert abs(r.to_bigcomplex(256).to_mpc() - ref) < mpmath.mpf(10) ** -70
    assert parse_radical("3/8") == Radical(Surd(Fraction(3, 8)))


# ----- quadratic forms ------------------------------------------------------------


def test_class_group_of_minus_20():
    assert class_group_enumerate(-20) == [QuadForm(1, 0, 5), QuadForm(2, 2, 3)]
    assert class_number(-20) == 2


@pytest.mark.parametrize("d", [d for d in range(-3, -201, -1) if d % 4 in (0, 1)])
def test_class_group_against_orbit_oracle(d):
    ours = {(f.a, f.b, f.c) for f in class_group_enumerate(d)}
    assert ours == reduced_classes(d)


def test_reduce_form():
    assert reduce_form(QuadForm(20, -40, 23)) == QuadForm(3, 0, 20)
    assert reduce_form(QuadForm(4, -8, 5)) == QuadForm(1, 0, 4)
    with pytest.raises(InvalidDiscriminant):
        class_group_enumerate(-7 * 4 + 2)
    with pytest.raises(InvalidDiscriminant):
        reduce_form(QuadForm(1, 3, 1))


@settings(max_examples=300)
@given(st.integers(1, 30), st.integers(-60, 60), st.integers(1, 30))
def test_reduction_is_idempotent_and_keeps_disc(a, b, c):
    f = QuadForm(a, b, c)
    if f.disc >= 0:
        return
    g = reduce_form(f)
    assert g.is_reduced and g.disc == f.disc
    assert reduce_form(g) == g


def test_tau_root():
    t = QuadForm(20, -40, 23).tau(128)
    with mp_at(160):
        ref = mpmath.mpc(1, mpmath.sqrt(15) / 10)
        assert abs(t.to_mpc() - ref) < mpmath.mpf(2) ** -120


# ----- evaluation --------------------------------------------------------------------


def test_eta_at_i_closed_form():
    c = eta_value(BigComplex(0, 1, 256), 256)
    with mp_at(300):
        ref = mpmath.gamma(mpmath.mpf(1) / 4) / (2 * mpmath.pi ** (mpmath.mpf(3) / 4))
        err = abs(c.value.to_mpc() - ref)
        assert err <= c.error
        assert err < mpmath.mpf(2) ** -240


def test_eta_against_mpmath_qp():
    tau = BigComplex(Fraction(1, 3), Fraction(7, 10), 200)
    c = eta_value(tau, 200)
    with mp_at(260):
        t = tau.to_mpc()
        q = mpmath.exp(2j * mpmath.pi * t)
        ref = mpmath.exp(2j * mpmath.pi * t / 24) * mpmath.qp(q)
        assert abs(c.value.to_mpc() - ref) <= c.error


def test_X_at_tau0_is_one_sixteenth():
    tau0 = QuadForm(20, -40, 23).tau(300)
    for route in ("eta", "lattice"):
        c = X_value(tau0, 256, route)
        err = (c.value - BigComplex(Fraction(1, 16), 0, 256)).abs()
        assert err < mpmath.mpf(10) ** -40
        assert err <= c.error


def test_precision_error_near_real_axis():
    with pytest.raises(PrecisionError):
        eval_qseries(QSeries.from_q([1, 1, 1], 3), BigComplex(0, Fraction(1, 10**9), 64), 64)
    with pytest.raises(ValueError):
        eta_value(BigComplex(0, -1, 64), 64)


def test_truncated_series_needs_enough_terms():
    s = QSeries.from_q([1] * 5, 5)
    with pytest.raises(PrecisionError):
        eval_qseries(s, BigComplex(0, 1, 256), 256, coeff_bound=(1, 0))



def test_eta_product_and_lattice_values():
    tau = QuadForm(1, 0, 5).tau(200)
    z = eta_product_value(ETA_FORMS["z"], tau, 160)
    th = lattice_value((1, 0, 5), tau, 160)
    x = (z.value / (th.value * th.value))
    assert (x - X_value(tau, 160).value).abs() < mpmath.mpf(2) ** -140


# ----- singular values and series ----------------------------------------------------


def test_reference_inv_pi():
    with mp_at(600):
        assert abs(reference_inv_pi(512).to_mpc() - 1 / mpmath.pi) < mpmath.mpf(2) ** -505


def test_singular_row_ok():
    rep = verify_singular_value(TABLES.singular[0], 128, TABLES)
    assert rep.status == "pass" and rep.routes_agree


def test_flagged_singular_row():
    row = next(r for r in TABLES.singular if r.disc == -1360)
    rep = verify_singular_value(row, 128, TABLES)
    assert rep.status == "paper-discrepancy"
    assert rep.printed_error > 100


def test_wrong_singular_value_fails():
    from dataclasses import replace

    row = replace(TABLES.singular[0], value=parse_surd("7/8+3/8*sqrt(5)"))
    assert verify_singular_value(row, 128, TABLES).status == "fail"


def test_one_term_sum_is_A_times_B():
    for row in TABLES.series:
        s = pi_series_sum(row, 1, 128)
        ab = row.A.to_bigcomplex(160) * row.B.to_bigcomplex(160)
        assert (s.value - ab).abs() < mpmath.mpf(2) ** -120


def test_conjugate_pair_is_conjugate():
    s3 = pi_series_sum(TABLES.series[3], 40, 256)
    s4 = pi_series_sum(TABLES.series[4], 40, 256)
    assert (s3.value - s4.value.conj()).abs() < mpmath.mpf(2) ** -240


def test_series_converge_with_enough_terms():
    # terms needed for 45 digits follow from the geometric ratio |C|/rho
    for row in TABLES.series:
        ratio = row.C.to_bigcomplex(64).abs() / RHO
        terms = int(50 * mpmath.log(10) / -mpmath.log(ratio)) + 40
        assert pi_check(row, terms, 256).error < mpmath.mpf(10) ** -45


def test_doubling_terms_shrinks_error():
    floor = mpmath.mpf(2) ** -500
    for row in TABLES.series:
        e80 = pi_check(row, 80, 512).error
        e160 = pi_check(row, 160, 512).error
        ratio = abs(row.C.to_bigcomplex(64).abs()) / RHO
        if e80 < floor:
            assert e160 < floor
        else:
            assert e160 == 0 or e80 / e160 >= mpmath.mpf("0.1") * ratio ** -80


def test_growth_constant_bounds_ratio():
    assert 1 / RHO < GROWTH


def test_series_rows_match_forms():
    rep = match_table3_to_forms(TABLES, 96)
    assert rep.unmatched_series == []
    assert rep.forms_without_series == ["(20,-20,11)"]
    assert len(rep.matches[0]) == 2


# ----- table file --------------------------------------------------------------------


def test_packaged_tables_shape():
    assert len(TABLES.singular) == 16
    assert len(TABLES.matrices) == 16
    assert len(TABLES.series) == 13


def test_env_override(tmp_path, monkeypatch):
    from importlib import resources

    text = resources.files("qmodular").joinpath("data/tables.txt").read_text()
    lines = [ln for ln in text.splitlines() if not ln.startswith("-3040")]
    p = tmp_path / "t.txt"
    p.write_text("\n".join(lines))
    monkeypatch.setenv(ENV_VAR, str(p))
    t = load_tables()
    assert len(t.singular) == 15 and t.source == str(p)


def test_table_validation():
    with pytest.raises(TableError):
        parse_tables("no header\n")
    header = "# format: qmodular-tables 1\n"
    with pytest.raises(TableError, match="discriminant"):
        parse_tables(header + "[singular]\n-17 | 4,-8,5 | 1/16 | ok |\n")
    with pytest.raises(TableError, match="radius"):
        parse_tables(header + "[series]\n1 | 1 | 1/4\n")
