from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import residue_mod_2k, v2_frac
from sym2chab.dyadic import (
    INF,
    Dyadic,
    HalfVal,
    QuadDyadic,
    hensel_artin_schreier,
    v2,
    valuation,
)
from sym2chab.errors import DivisionByZeroToPrecision, Indistinguishable, PrecisionExhausted

N = 32
ints = st.integers(min_value=-(10 ** 12), max_value=10 ** 12)
odd_den = st.integers(min_value=0, max_value=500).map(lambda k: 2 * k + 1)
rationals = st.builds(Fraction, ints, odd_den)


def D(x, prec=N):
    return Dyadic.from_rational(x, prec)


def test_v2_basics():
    assert v2(1) == 0
    assert v2(12) == 2
    assert v2(-8) == 3
    assert valuation(0) == INF
    assert valuation(Fraction(3, 8)) == -3


@given(rationals)
def test_from_rational_matches_residue(x):
    d = D(x)
    assert d.residue(N) == residue_mod_2k(x, N)


@given(rationals, rationals)
def test_add_mul_match_fraction_oracle(x, y):
    assert (D(x) + D(y)).residue(N) == residue_mod_2k(x + y, N)
    assert (D(x) - D(y)).residue(N) == residue_mod_2k(x - y, N)
    assert (D(x) * D(y)).residue(N) == residue_mod_2k(x * y, N)


@given(rationals, rationals.filter(lambda q: q != 0 and v2_frac(q) == 0))
def test_division_by_unit(x, y):
    assert (D(x) / D(y)).residue(N) == residue_mod_2k(x / y, N)


@given(rationals, rationals, rationals)
def test_ring_axioms(x, y, z):
    a, b, c = D(x), D(y), D(z)
    assert ((a + b) + c).agrees(a + (b + c), N)
    assert (a * (b + c)).agrees(a * b + a * c, N)
    assert ((a * b) * c).agrees(a * (b * c), N)
    assert (a + b).agrees(b + a, N)


def test_precision_loss_on_division():
    q = D(3) / D(4)
    assert q.valuation == -2
    # 4 carries only N - 2 relative digits, so the quotient does too.
    assert q.relprec == N - 2
    assert q.absprec == N - 4


def test_zero_divisor_raises():
    with pytest.raises(DivisionByZeroToPrecision):
        D(1) / Dyadic.zero(10)
    with pytest.raises(ZeroDivisionError):
        D(1) / D(2 ** 40)


def test_equality_is_never_claimed_to_precision():
    with pytest.raises(Indistinguishable):
        D(5) == D(5 + 2 ** 40)
    assert (D(5) == D(7)) is False


def test_residue_needs_precision():
    with pytest.raises(PrecisionExhausted):
        D(3, 8).residue(9)


def test_halfval_ordering_and_arithmetic():
    assert HalfVal(1) < 1
    assert HalfVal(2) == 1
    assert HalfVal(1) * 3 == HalfVal(3)
    assert str(HalfVal(3)) == "3/2"
    assert HalfVal(-2) + HalfVal(1) * 2 == 0


quads = st.builds(lambda a, b: QuadDyadic.of(a, b, N), ints, ints)


@given(quads, quads)
def test_conjugation_is_a_ring_morphism(u, v):
    assert (u * v).conj().agrees(u.conj() * v.conj(), N)
    assert (u + v).conj().agrees(u.conj() + v.conj(), N)
    assert u.conj().conj().agrees(u, N)


@given(quads)
def test_norm_and_trace(u):
    assert (u * u.conj()).agrees(QuadDyadic(u.norm(), Dyadic.zero(N)), N)
    assert (u + u.conj()).agrees(QuadDyadic(u.trace(), Dyadic.zero(N)), N)


def test_w_satisfies_its_minimal_polynomial():
    w = QuadDyadic.w()
    assert (w * w + w + 1).agrees(0, N)
    assert (w + w.conj()).agrees(-1, N)
    assert w.reduce_f4() == 2


@given(ints)
@settings(max_examples=200)
def test_hensel_root_residual(c):
    gamma = hensel_artin_schreier(c, N)
    assert (gamma * gamma + gamma - c).agrees(0, N)
    # Odd c forces a root reducing to a primitive cube root of unity mod 2.
    assert (gamma.reduce_f4() in (2, 3)) == (c % 2 == 1)


def test_hensel_example_reduces_to_alpha():
    gamma = hensel_artin_schreier(5)
    assert gamma.reduce_f4() == 2
