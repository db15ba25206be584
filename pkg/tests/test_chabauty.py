from __future__ import annotations

import dataclasses
import json
import random
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import criterion_oracle, random_good_lift
from sym2chab.chabauty import (
    FLOOR_RAMIFIED,
    FLOOR_UNRAMIFIED,
    INFINITY,
    ONE_PAIR,
    ZERO_PAIR,
    SelmerInput,
    assemble_rholog,
    certificate_report,
    certify_disk_infinity,
    certify_disk_pair,
    criterion,
    parse_image,
    pascal_mod2,
    recheck_certificate,
    tail_lemma,
    term_bound,
)
from sym2chab.curves import CurveModel, good_patterns
from sym2chab.dyadic import HalfVal
from sym2chab.errors import (
    DimensionMismatch,
    InputFormatError,
    NotGood,
    RankTooLarge,
)
from sym2chab.modp import F2Vec, ProjPtF2

H = CurveModel.long((0, 0, 0, 0, 0, 0, 0, 1, 1))
P = ProjPtF2.from_str


def test_infinity_certificate_example():
    cert = certify_disk_infinity(H, 16)
    assert cert.floor == FLOOR_RAMIFIED
    assert [str(p) for p in cert.image] == ["(1:0:0:0)"]
    assert cert.surviving == ((1, 0),)
    assert all(t.positive for t in cert.terms if (t.j, t.i) != (1, 0))
    t13 = next(t for t in cert.terms if (t.j, t.i) == (1, 3))
    assert t13.v_den == 2
    assert t13.net is None or t13.net >= HalfVal(1)
    assert recheck_certificate(cert) == []


@pytest.mark.parametrize("x0, disk", [(0, ZERO_PAIR), (1, ONE_PAIR)])
def test_pair_certificate_example(x0, disk):
    cert = certify_disk_pair(H, x0, 16)
    assert cert.disk == disk
    assert cert.floor == FLOOR_UNRAMIFIED
    assert [str(p) for p in cert.image] == ["(1:0:0:0)", "(1:1:0:0)"]
    assert set(cert.surviving) == {(1, 0), (2, 1)}
    assert all(w.ok for w in cert.witnesses)
    t32 = next(t for t in cert.terms if (t.j, t.i) == (3, 2))
    assert t32.net is None or t32.net >= 2
    assert recheck_certificate(cert) == []


def test_term_bound_arithmetic():
    t = term_bound(1, 3, 1, 2, FLOOR_RAMIFIED)
    assert t.net == HalfVal(1)
    assert t.positive
    assert term_bound(2, 1, 0, 1, FLOOR_UNRAMIFIED).surviving


def test_tail_lemma_examples():
    lem = tail_lemma(FLOOR_RAMIFIED, 8)
    assert lem.ok
    assert abs(lem.gap_at_start - (4.5 - 3.321928)) < 1e-5
    assert tail_lemma(FLOOR_UNRAMIFIED, 8).ok
    assert not tail_lemma(FLOOR_RAMIFIED, 1).positive_at_start


def test_recheck_detects_tampering():
    cert = certify_disk_infinity(H, 16)
    bad = list(cert.terms)
    k = next(n for n, t in enumerate(bad) if (t.j, t.i) == (2, 4))
    bad[k] = dataclasses.replace(bad[k], v_coeff=-5)
    assert recheck_certificate(dataclasses.replace(cert, terms=tuple(bad)))
    assert recheck_certificate(dataclasses.replace(cert, surviving=((1, 0), (2, 1))))
    assert recheck_certificate(dataclasses.replace(cert, image=(P("1100"),)))


def test_non_good_input_rejected():
    with pytest.raises(NotGood):
        certify_disk_infinity(CurveModel.long((0,) * 9), 16)


def test_assembled_image_example():
    im = assemble_rholog(H)
    assert im.cardinality == 5
    assert P("1000") in im.points
    assert im.per_disk[INFINITY] == (P("1000"),)
    doc = json.loads(certificate_report(im))
    assert doc["cardinality"] == 5


def test_pascal_matrix():
    assert pascal_mod2(4).to_lists() == [[1, 0, 0, 0], [1, 1, 0, 0], [1, 0, 1, 0], [1, 1, 1, 1]]


def test_local_constancy_example():
    h2 = CurveModel.long(H.coeffs[:4] + (H.coeffs[4] + 2 ** 18,) + H.coeffs[5:])
    assert assemble_rholog(h2).points == assemble_rholog(H).points


@pytest.mark.parametrize("g", [4, 5])
def test_every_good_class_certifies(g):
    for pat in good_patterns(g):
        im = assemble_rholog(CurveModel.long(pat))
        assert im.cardinality <= 5
        assert im.per_disk[INFINITY] == (ProjPtF2(F2Vec.unit(g, 1)),)


def test_low_genus_curves_certify():
    rng = random.Random(2)
    for g in (2, 3, 6):
        im = assemble_rholog(CurveModel.long(random_good_lift(g, rng)))
        assert im.cardinality <= 5
        assert all(recheck_certificate(c) == [] for c in im.certificates)


def test_determinism():
    a = certificate_report(assemble_rholog(H))
    b = certificate_report(assemble_rholog(CurveModel.long(H.coeffs)))
    assert a == b


# -- criterion --------------------------------------------------------------------------

IMAGE5 = [P(s) for s in ("1000", "0001", "0011", "1111", "0101")]


def test_criterion_examples():
    assert criterion(IMAGE5, SelmerInput(4, ()), True).overall
    v = criterion(IMAGE5, SelmerInput.from_strings(4, ["1000"]), True)
    assert not v.disjoint and v.witness == P("1000")
    v = criterion(IMAGE5, SelmerInput.from_strings(4, ["0100", "0100"]), True)
    assert not v.sigma_injective
    assert not criterion(IMAGE5, SelmerInput(4, ()), False).overall


def test_criterion_errors():
    with pytest.raises(DimensionMismatch):
        criterion(IMAGE5, SelmerInput(5, ()), True)
    big = SelmerInput(11, tuple(1 << k for k in range(11)) + tuple(3 << k for k in range(10)))
    with pytest.raises(RankTooLarge):
        criterion([ProjPtF2(F2Vec.unit(11, 1))], big, True)


image_bits = {p.bits for p in IMAGE5}


@given(st.lists(st.integers(1, 15), max_size=4))
def test_criterion_matches_oracle(rows):
    v = criterion(IMAGE5, SelmerInput(4, tuple(rows)), True)
    assert v.overall == criterion_oracle(rows, image_bits)


@given(st.lists(st.integers(1, 15), max_size=4), st.integers(1, 15))
@settings(max_examples=200)
def test_adding_a_row_never_rescues(rows, extra):
    before = criterion(IMAGE5, SelmerInput(4, tuple(rows)), True).overall
    after = criterion(IMAGE5, SelmerInput(4, tuple(rows) + (extra,)), True).overall
    assert not (after and not before)


def test_selmer_file_round_trip():
    sel = SelmerInput.parse("# comment\n4 2\n1000\n0110\n")
    assert sel.rank == 2
    assert SelmerInput.parse(sel.dumps()) == sel
    with pytest.raises(InputFormatError):
        SelmerInput.parse("4 2\n1000\n")
    with pytest.raises(InputFormatError):
        SelmerInput.parse("2 5\n10\n01\n11\n10\n01\n")


def test_parse_image():
    pts = parse_image("(1:0:0:0)\n# c\n0101\n")
    assert pts == [P("1000"), P("0101")]
    with pytest.raises(InputFormatError):
        parse_image("1000\n010\n")
