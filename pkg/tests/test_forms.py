from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import lattice_count, pentagonal, pinv, pmul, sigma
from qmodular.forms import (
    ETA_FORMS, HAUPTMODULN, EtaProduct, build, coefficient_matrix, eisenstein_combination,
    eta, eta_expand, eta_membership, euler_function, find_relation, hauptmodul,
    lattice_sum, m20_basis, membership_decomposition,
)
from qmodular.linalg import InconsistentSystem, RationalMatrix, primitive

N = 60


def spread(c: list, m: int, n: int) -> list:
    """c(q) -> c(q^m), truncated to n terms."""
    out = [0] * n
    for i, x in enumerate(c):
        if i * m < n:
            out[i * m] = x
    return out


# ----- expansions against closed-form oracles ------------------------------


def test_euler_function_is_pentagonal():
    assert euler_function(200).to_list() == pentagonal(200)


def test_eta_product_against_pentagonal_route():
    # z = q prod (1-q^2n)^2 (1-q^10n)^2
    e = pentagonal(N)
    oracle = pmul(pmul(spread(e, 2, N), spread(e, 2, N), N), pmul(spread(e, 10, N), spread(e, 10, N), N), N)
    assert build("z", N).to_list() == [0] + oracle[: N - 1]


def test_eta_product_weight_and_valuation():
    u = ETA_FORMS["u"]
    assert u.weight == 0
    assert u.valuation == 1
    assert ETA_FORMS["z"].weight == 2
    assert eta((1, 1), level=1).valuation == Fraction(1, 24)
    assert eta_expand(eta((1, 1), level=1), 3).pretty(3).startswith("1*q^1/24")


def test_theta3_fourth_power_is_jacobi_four_squares():
    r4 = [1] + [8 * sum(d for d in range(1, n + 1) if n % d == 0 and d % 4) for n in range(1, N)]
    assert build("F", N).to_list() == r4


def test_theta2_theta4_expansions():
    t2 = build("theta2", 30)
    assert {e: c for e, c in t2.terms()} == {Fraction((2 * n + 1) ** 2, 4): 2 for n in range(5)}
    t4 = build("theta4", 30).to_list()
    assert t4[:10] == [1, -2, 0, 0, 2, 0, 0, 0, 0, -2]


def test_jacobi_quartic_identity():
    t2, t3, t4 = (build(f"theta{k}", 80) ** 4 for k in (2, 3, 4))
    assert (t3 - t2 - t4).is_zero()


def test_eisenstein_divisor_sums():
    assert build("P1", N).to_list() == [1] + [-24 * sigma(1, n) for n in range(1, N)]
    assert build("Q1", N).to_list() == [1] + [240 * sigma(3, n) for n in range(1, N)]
    assert build("P5", N).to_list() == [1] + [-24 * sigma(1, n // 5) if n % 5 == 0 else 0 for n in range(1, N)]


def test_lattice_sums_against_brute_force():
    for form in [(1, 0, 5), (2, 2, 3), (1, 1, 1), (3, 2, 7)]:
        assert lattice_sum(form, 40).to_list() == lattice_count(form, 40)


def test_Z_and_Zbold_frozen_prefix():
    assert build("Z", 10).to_list()[:6] == [1, 4, 4, 0, 4, 12]
    assert build("Zbold", 10).to_list()[:4] == [1, 0, 4, 8]
    assert lattice_sum((1, 0, 5), 10).to_list()[:7] == [1, 2, 0, 0, 2, 2, 4]


def test_X_is_z_over_Z_by_long_division():
    z = build("z", N).to_list()
    zz = lattice_count((1, 0, 5), N)
    Z = pmul(zz, zz, N)
    oracle = pmul(z, pinv(Z, N), N)
    assert build("X", N - 1).to_list() == oracle[: N - 1]
    assert oracle[:5] == [0, 1, -4, 10, -24]


def test_lattice_rejects_indefinite():
    with pytest.raises(ValueError):
        lattice_sum((1, 3, 1), 10)


# ----- membership test -------------------------------------------------------


@pytest.mark.parametrize("name", ["z", "zu", "z/u", "zv", "z/v"])
def test_membership_accepts_weight_two_forms(name):
    z = ETA_FORMS["z"]
    e = {"z": z, "zu": z * ETA_FORMS["u"], "z/u": z / ETA_FORMS["u"],
         "zv": z * ETA_FORMS["v"], "z/v": z / ETA_FORMS["v"]}[name]
    rep = eta_membership(e)
    assert rep.level == 20 and rep.weight == 2
    assert rep.passes, rep.failed()


COUNTEREXAMPLES = {
    "even_weight": EtaProduct(4, {1: -4, 2: -2, 4: 20}),
    "square_product": EtaProduct(5, {1: -3, 5: 15}),
    "cusp_infinity": EtaProduct(2, {1: -4, 2: 8}),
    "cusp_zero": EtaProduct(2, {2: 12}),
    "holomorphic_cusps": EtaProduct(1, {1: -24}),
}


@pytest.mark.parametrize("condition", sorted(COUNTEREXAMPLES))
def test_membership_rejects_counterexample(condition):
    rep = eta_membership(COUNTEREXAMPLES[condition])
    assert not rep.passes
    assert rep.failed() == [condition]


def test_delta_is_accepted_at_level_one():
    rep = eta_membership(EtaProduct(1, {1: 24}))
    assert rep.passes and rep.weight == 12


# ----- Hauptmoduln -----------------------------------------------------------


@pytest.mark.parametrize("group", sorted(HAUPTMODULN))
def test_hauptmodul_shape(group):
    h = hauptmodul(group, 100)
    assert h.qorder == 100
    assert h.valuation == -1
    assert h.coefficient(-1) == 1
    assert h.coefficient(0) == 0
    assert all(isinstance(c, int) for _, c in h.terms())


# ----- relations and decompositions ------------------------------------------


def test_find_relation_recovers_theta_eisenstein_link():
    # 3 theta3^4 = 4 P(q^4) - P(q)
    rep = find_relation([build("F", 40), build("P1", 40), build("P4", 40)], 40)
    assert primitive(rep.vector) == [3, 1, -4]


def test_find_relation_reports_independence():
    rep = find_relation([build("P1", 30), build("P2", 30), build("z", 30)], 30)
    assert rep.independent


def test_find_relation_needs_order_guard():
    with pytest.raises(ValueError):
        find_relation([build("P1", 12), build("P2", 12), build("P4", 12)], 12)


def test_m20_basis_has_rank_six():
    rows = coefficient_matrix(m20_basis(40), 40)
    assert RationalMatrix(rows).rank() == 6


def test_decomposition_of_cusp_form():
    dec = membership_decomposition(build("z", 60))
    assert dec.cusp == 1
    assert all(v == 0 for v in dec.eisenstein.values())


def test_decomposition_rejects_non_member():
    with pytest.raises(InconsistentSystem):
        membership_decomposition(build("Q1", 40))


@settings(max_examples=100)
@given(st.lists(st.integers(-20, 20), min_size=5, max_size=5), st.integers(-5, 5))
def test_modular_eisenstein_combinations_decompose_exactly(cs, cusp):
    c2, c4, c5, c10, c20 = cs
    # sum c_d / d = 0 is the condition for sum c_d P(q^d) to be modular
    num = -(10 * c2 + 5 * c4 + 4 * c5 + 2 * c10 + c20)
    c1 = Fraction(num, 20)
    coeffs = {1: c1, 2: c2, 4: c4, 5: c5, 10: c10, 20: c20}
    f = eisenstein_combination(coeffs, cusp, order=40)
    dec = membership_decomposition(f)
    assert dec.eisenstein == {d: Fraction(c) for d, c in coeffs.items()}
    assert dec.cusp == cusp


def test_one_plus_v_quotient():
    order = 60
    lhs = 1 + build("v", order)
    assert (lhs - build("one_plus_v", order)).is_zero()
