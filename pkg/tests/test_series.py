from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from oracles import pinv, pmul, sigma
from qmodular.forms import build, theta_series
from qmodular.series import QSeries, SeriesError, compose, revert

small = st.one_of(st.integers(-9, 9), st.fractions(min_value=-5, max_value=5, max_denominator=6))


@st.composite
def series(draw, min_len=1, max_len=40, unit=False, order=None):
    n = order if order is not None else draw(st.integers(min_len, max_len))
    coeffs = draw(st.lists(small, min_size=n, max_size=n))
    if unit:
        coeffs[0] = draw(st.sampled_from([1, -1, 2, Fraction(1, 3)]))
    return QSeries.from_q(coeffs, n)


@st.composite
def series_triple(draw):
    n = draw(st.integers(1, 40))
    return tuple(draw(series(order=n)) for _ in range(3))


# ----- examples ------------------------------------------------------------


def test_theta3_plus_theta4_keeps_even_squares():
    s = theta_series(3, 30) + theta_series(4, 30)
    expected = [0] * 30
    for n in range(0, 6):
        if (2 * n) ** 2 < 30:
            expected[(2 * n) ** 2] = 2 if n == 0 else 4
    assert s.to_list() == expected


def test_theta3_squared_counts_sums_of_two_squares():
    n = 60
    s = theta_series(3, n) ** 2
    brute = [0] * n
    for a in range(-8, 9):
        for b in range(-8, 9):
            if a * a + b * b < n:
                brute[a * a + b * b] += 1
    assert s.to_list() == brute


def test_theta2_fourth_power_by_convolution():
    t2 = theta_series(2, 12) ** 4
    assert t2.is_integral
    assert t2.to_list(8) == [0, 16, 0, 64, 0, 96, 0, 128]
    # independent route: (2 q^(1/4) sum q^(n^2+n))^4 = 16 q (sum q^(n^2+n))^4
    base = [Fraction(0)] * 12
    n = 0
    while n * n + n < 12:
        base[n * n + n] = 1
        n += 1
    sq = pmul(base, base, 12)
    assert [16 * c for c in pmul(sq, sq, 11)] == t2.to_list(12)[1:]


def test_geometric_composition_gives_fibonacci():
    geo = QSeries.from_q([1] * 20, 20)
    out = compose(geo, QSeries.from_q([0, 1, 1]))
    fib = [1, 1]
    while len(fib) < 20:
        fib.append(fib[-1] + fib[-2])
    assert out.to_list() == fib


def test_q_derivative_of_P_is_minus_24_n_sigma1():
    p = build("P1", 40)
    assert p.q_derivative().to_list() == [-24 * n * sigma(1, n) if n else 0 for n in range(40)]


def test_fractional_exponents_and_shift():
    eta_like = QSeries.from_q([1, -1, -1], 3).shift(1)
    assert eta_like.valuation == Fraction(1, 24)
    assert not eta_like.is_integral
    assert (eta_like**24).valuation == 1
    with pytest.raises(SeriesError):
        eta_like.to_list()


def test_truncation_is_tracked():
    a = QSeries.from_q([1, 2, 3], 3)
    b = QSeries.from_q([1, 1, 1, 1, 1], 5)
    assert (a + b).qorder == 3
    assert (a * b).qorder == 3
    assert QSeries.from_q([1, 2]).is_exact
    with pytest.raises(SeriesError):
        a.coefficient(3)


def test_division_by_nonunit_shifts_order():
    a = QSeries.from_q([0, 0, 1, 1], 10)
    b = QSeries.from_q([0, 1, 1], 10)
    c = a / b
    assert c.valuation == 1
    assert (c * b - a).is_zero()


def test_revert_known_example():
    # q/(1-q) has inverse q/(1+q)
    a = QSeries.from_q([0] + [1] * 19, 20)
    assert revert(a).to_list() == [0] + [(-1) ** (k + 1) for k in range(1, 20)]


def test_revert_rejects_bad_input():
    with pytest.raises(SeriesError):
        revert(QSeries.from_q([0, 2, 1], 10))
    with pytest.raises(SeriesError):
        revert(QSeries.from_q([1, 1], 10))


def test_subs_power_and_negate():
    s = QSeries.from_q([1, 2, 3], 3)
    assert s.subs_power(2).to_list() == [1, 0, 2, 0, 3, 0]
    assert s.negate_q().to_list() == [1, -2, 3]
    assert theta_series(3, 50).negate_q() == theta_series(4, 50)


# ----- property suites ---------------------------------------------------------


@given(series(unit=True))
def test_inverse_is_involution(a):
    inv = a.inverse()
    assert (a * inv - 1).is_zero()
    assert inv.inverse() == a
    assert inv.to_list() == pinv(a.to_list(), len(a.to_list()))


@given(series_triple())
def test_product_rule(abc):
    a, b, _ = abc
    assert (a * b).q_derivative() == a.q_derivative() * b + a * b.q_derivative()
