from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import (
    count_affine_points,
    good_by_definition,
    good_patterns_oracle,
    lattice_points_strictly_inside_segment,
    lower_hull_is_single_segment,
    random_good_lift,
    v2_frac,
)
from sym2chab.curves import (
    LONG,
    OTHER,
    PAIR_AT,
    SHORT,
    TWO_INFINITY,
    CurveModel,
    all_patterns,
    complete_square,
    enumerate_points,
    good_patterns,
    is_good,
    newton_polygon,
    parse_curve_line,
    scale_to_family,
    sym2_classes,
    torsion_condition_ok,
    translate,
    uncomplete_square,
    unscale_from_family,
)
from sym2chab.errors import GenusTooSmall, InputFormatError, NotGood, NotInFamily

X9_X_1 = (0, 0, 0, 0, 0, 0, 0, 1, 1)


def test_example_curve_is_good():
    rep = is_good(CurveModel.long(X9_X_1))
    assert rep.good
    assert sorted(rep.S) == [0, 1, 9]
    assert sorted(rep.S0) == [0, 9]


def test_genus_one_rejected():
    with pytest.raises(GenusTooSmall):
        CurveModel(1, LONG, (0, 0, 1))


@pytest.mark.parametrize("g", [2, 3, 4, 5, 6])
def test_goodness_matches_definition_exhaustively(g):
    assert good_patterns(g) == good_patterns_oracle(g)
    assert len(good_patterns(g)) * 8 == 2 ** (2 * g + 1)


@pytest.mark.parametrize("g", [2, 3, 4, 5, 6])
def test_point_counts_match_brute_force(g):
    for pat in all_patterns(g):
        h = CurveModel(g, LONG, pat)
        asc = [c % 2 for c in h.ascending()]
        for field in ("F2", "F4"):
            assert len(enumerate_points(h, field)) == 1 + len(count_affine_points(asc, field))


def test_points_of_example_over_f4():
    h = CurveModel.long(X9_X_1)
    assert [str(p) for p in enumerate_points(h, "F2")] == ["P_inf"]
    f4 = enumerate_points(h, "F4")
    assert len(f4) == 5
    assert {str(p.x) for p in f4 if not p.is_infinity} == {"0", "1"}


def test_sym2_classes_good_curve():
    h = CurveModel.long(X9_X_1)
    classes = sym2_classes(h)
    assert [c.kind for c in classes] == [TWO_INFINITY, PAIR_AT, PAIR_AT]
    assert sorted(c.x0 for c in classes if c.kind == PAIR_AT) == [0, 1]
    assert torsion_condition_ok(h)


def test_sym2_classes_bad_curve():
    h = CurveModel.long((0,) * 9)  # y^2 + y = x^9
    with pytest.raises(NotGood):
        sym2_classes(h)
    classes = sym2_classes(h, strict=False)
    assert len(classes) == 9
    assert any(c.kind == OTHER for c in classes)
    assert not torsion_condition_ok(h)


def test_complete_square_round_trip():
    h = CurveModel.long((3, -1, 0, 2, 5))
    f = complete_square(h)
    assert f.kind == SHORT
    assert f.coeffs[-1] == 5 + Fraction(1, 4)
    assert uncomplete_square(f).coeffs == h.coeffs


def test_scaling_to_family_round_trip():
    h = CurveModel.long(X9_X_1)
    f = scale_to_family(h)
    assert f.coeffs[-1] == 4 ** 9 + 4 ** 8
    assert unscale_from_family(f).coeffs == h.coeffs
    with pytest.raises(NotInFamily):
        unscale_from_family(CurveModel(4, SHORT, (1,) + f.coeffs[1:]))


def test_translate_is_taylor_shift():
    h = CurveModel.long((1, 2, 3, 4, 5))
    t = translate(h, 1)
    for x in range(-3, 4):
        assert t(x) == h(x + 1)


def _polygon_oracle(f: CurveModel):
    pts = [(k, Fraction(v2_frac(c))) for k, c in enumerate(f.ascending()) if c != 0]
    return pts


def test_newton_polygon_random_good_lifts():
    rng = random.Random(11)
    for _ in range(20):
        h = CurveModel.long(random_good_lift(4, rng))
        f = complete_square(h)
        poly = newton_polygon(f)
        pts = _polygon_oracle(f)
        assert lower_hull_is_single_segment(pts)
        assert poly.vertices == ((0, -2), (9, 0))
        assert lattice_points_strictly_inside_segment(0, -2, 9, 0) == 0
        assert poly.irreducible_by_polygon


def test_newton_polygon_small_cases():
    assert newton_polygon([2, 2, 1]).irreducible_by_polygon  # x^2 + 2x + 2
    assert not newton_polygon([-1, 0, 1]).irreducible_by_polygon  # x^2 - 1


def test_parse_curve_line():
    h = parse_curve_line("4; 0,0,0,0,0,0,0,1,1")
    assert h.coeffs == X9_X_1
    with pytest.raises(InputFormatError) as exc:
        parse_curve_line("4; 1,2", 7)
    assert exc.value.line == 7
    with pytest.raises(InputFormatError):
        parse_curve_line("no separator")


@given(st.lists(st.integers(0, 1), min_size=9, max_size=9))
def test_goodness_depends_only_on_parity(pat):
    h = CurveModel.long(tuple(pat))
    shifted = CurveModel.long(tuple(c + 2 * (i + 1) for i, c in enumerate(pat)))
    assert is_good(h).good == is_good(shifted).good == good_by_definition(4, pat)
