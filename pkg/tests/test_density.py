from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import good_patterns_oracle
from sym2chab.density import (
    DyadicRational,
    delta_lower_bound,
    family_density,
    goodness_fraction,
    goodness_fraction_bruteforce,
    scaling_exponent,
)
from sym2chab.errors import GenusTooSmall

dy = st.builds(DyadicRational, st.integers(-10 ** 6, 10 ** 6), st.integers(0, 40))


def test_normalization():
    assert DyadicRational(12, 4) == DyadicRational(3, 2)
    assert DyadicRational(3, 2).numerator == 3
    assert DyadicRational(0, 9).exponent == 0
    assert str(DyadicRational(-1, 1)) == "-1/2^1"
    assert DyadicRational.pow2(-95).log2_form() == "2^-95"
    assert DyadicRational(5, 138).log2_form() == "5*2^-138"


@given(dy, dy)
def test_exact_arithmetic_matches_fractions(a, b):
    fa, fb = a.to_fraction(), b.to_fraction()
    assert (a + b).to_fraction() == fa + fb
    assert (a - b).to_fraction() == fa - fb
    assert (a * b).to_fraction() == fa * fb
    assert (a < b) == (fa < fb)


def test_rejects_non_dyadic():
    with pytest.raises(ValueError):
        DyadicRational.of(Fraction(1, 3))


@pytest.mark.parametrize("g", [2, 3, 4, 5, 6])
def test_dp_matches_enumeration(g):
    oracle = DyadicRational.of(Fraction(len(good_patterns_oracle(g)), 2 ** (2 * g + 1)))
    assert goodness_fraction(g) == goodness_fraction_bruteforce(g) == oracle


def test_large_genus_dp():
    assert goodness_fraction(12) == DyadicRational(1, 3)
    assert goodness_fraction(40) == DyadicRational(1, 3)


def test_genus_too_small():
    with pytest.raises(GenusTooSmall):
        goodness_fraction(1)
    with pytest.raises(GenusTooSmall):
        family_density(0)


def test_scaling_exponent_is_sum_of_indices():
    for g in range(2, 11):
        assert scaling_exponent(g) == (2 * g + 1) * (g + 1) == 2 * g * g + 3 * g + 1


def test_family_density_values():
    assert family_density(4) == DyadicRational.pow2(-93)
    assert family_density(3) == DyadicRational.pow2(-59)
    for g in range(2, 11):
        assert family_density(g) * DyadicRational.pow2(4 * g * g + 6 * g + 5) == 1


def test_delta_bounds():
    d4 = delta_lower_bound(4)
    assert d4.value == DyadicRational.pow2(-95)
    assert d4.comparison == "equality" and not d4.vacuous
    d3 = delta_lower_bound(3)
    assert d3.factor == DyadicRational(-1, 1)
    assert d3.vacuous and d3.comparison == "fails"
    d5 = delta_lower_bound(5)
    assert d5.value == DyadicRational(5, 3) * DyadicRational.pow2(-135)
    assert d5.comparison == "strict"
    for g in range(5, 11):
        assert delta_lower_bound(g).comparison == "strict"
