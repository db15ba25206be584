from __future__ import annotations

import random
from fractions import Fraction

import pytest

from oracles import random_good_lift, st_equation_residual, v2_frac
from sym2chab.curves import CurveModel, translate
from sym2chab.dyadic import QuadDyadic, hensel_artin_schreier
from sym2chab.series import (
    TruncSeries,
    basis_change_matrix,
    complete_symmetric,
    default_truncation,
    diff_quotient,
    eta_at_disk,
    eta_at_infinity,
    expand_s_of_t,
    expand_y_of_x,
    infinity_expansion,
    integrate,
    omega_at_infinity,
    st_curve_residual,
)

X9_X_1 = CurveModel.long((0, 0, 0, 0, 0, 0, 0, 1, 1))
X9_X2_1 = CurveModel.long((0, 0, 0, 0, 0, 0, 1, 0, 1))


def test_default_truncation():
    assert default_truncation(4) == 16
    assert default_truncation(10) == 26


def test_series_arithmetic_inverse():
    a = TruncSeries.of([1, 2, 3, 4])
    b = a.inverse()
    prod = a * b
    assert prod.coeffs == (1, 0, 0, 0)


def test_s_of_t_example():
    s = expand_s_of_t(X9_X_1, 16)
    nonzero = {i: c for i, c in enumerate(s.coeffs) if c != 0}
    assert nonzero == {2: 1, 11: 1}
    assert all(c == 0 for c in st_curve_residual(X9_X_1, s).coeffs)


def test_s_of_t_against_independent_residual():
    rng = random.Random(5)
    for g in (2, 3, 4, 5):
        for _ in range(3):
            h = CurveModel.long(random_good_lift(g, rng))
            s = expand_s_of_t(h, 16)
            res = st_equation_residual(g, h.coeffs, [Fraction(c) for c in s.coeffs], 17)
            assert all(r == 0 for r in res)


def test_omega_structure_example():
    om1 = omega_at_infinity(X9_X_1, 1, 16)
    assert om1[0] == 1 and om1[1] == 0 and om1[2] == 0
    assert infinity_expansion(X9_X_1, 16).normalizer == -1
    om2 = omega_at_infinity(X9_X_1, 2, 16)
    assert om2[0] == om2[1] == 0 and om2[2] == 1
    assert omega_at_infinity(X9_X2_1, 1, 16)[3] % 2 == 0


def test_omega_t2_coefficient_is_even_in_general():
    # The t^2 coefficient of omega_1/dt equals -2*c_1: even, zero only when c_1 = 0.
    h = CurveModel.long((3, 0, 0, 0, 0, 0, 0, 1, 1))
    om1 = omega_at_infinity(h, 1, 16)
    assert om1[2] == -6


def test_integrate_differentiate_round_trip():
    om1 = omega_at_infinity(X9_X_1, 1, 16)
    F = integrate(om1)
    assert F.derivative().coeffs == om1.coeffs
    assert [t.vden for t in F.terms[:8]] == [0, 1, 0, 2, 0, 1, 0, 3]


def test_diff_quotient_telescopes():
    f = TruncSeries.of([Fraction(1), Fraction(3), Fraction(-2), Fraction(5), Fraction(7)])
    F = integrate(f)
    dq = diff_quotient(F)
    for u1, u2 in [(Fraction(2), Fraction(5)), (Fraction(-1, 3), Fraction(4, 7))]:
        assert dq.evaluate(u1, u2) == (F.evaluate(u1) - F.evaluate(u2)) / (u1 - u2)
    bi = dq.as_bivariate()
    assert bi[(0, 0)] == 1
    assert bi[(1, 0)] == bi[(0, 1)] == Fraction(3, 2)
    assert complete_symmetric(2, 2, 3) == 4 + 6 + 9


@pytest.mark.parametrize("x0", [0, 1])
def test_y_of_x_solves_curve_equation(x0):
    h = X9_X_1
    H = translate(h, x0).ascending()
    gamma = hensel_artin_schreier(H[0])
    T = 16
    y = expand_y_of_x(h, x0, gamma, T)
    sq = y * y + y
    for k in range(T + 1):
        target = H[k] if k < len(H) else 0
        assert (sq[k] - target).agrees(0, 30)


def test_eta_constant_term():
    gamma = hensel_artin_schreier(1)
    eta1 = eta_at_disk(X9_X_1, 1, 0, gamma, 8)
    assert (eta1[0] * (2 * gamma + 1)).agrees(1, 30)


def test_basis_change_is_reversal():
    rng = random.Random(9)
    for g in (2, 3, 4, 5):
        h = CurveModel.long(random_good_lift(g, rng))
        bc = basis_change_matrix(h, default_truncation(g))
        assert bc.det_odd
        for i in range(g):
            for j in range(g):
                assert bc.A[i][j] == (-1 if i + j == g - 1 else 0)


def test_basis_change_reproduces_omegas():
    T = 16
    bc = basis_change_matrix(X9_X_1, T)
    etas = eta_at_infinity(X9_X_1, T)
    omegas = infinity_expansion(X9_X_1, T).omegas
    g = 4
    order = bc.checked_order
    for i in range(g):
        combo = [sum(bc.A[i][j] * etas[j][k] for j in range(g)) for k in range(order + 1)]
        assert combo == [Fraction(omegas[i][k]) for k in range(order + 1)]


def test_basis_change_needs_enough_terms():
    with pytest.raises(ValueError):
        basis_change_matrix(X9_X_1, 9)


def test_valuation_oracle_agrees_with_vden():
    F = integrate(TruncSeries.of([1] * 20))
    for t in F.terms:
        assert t.vden == v2_frac(Fraction(t.i + 1))
