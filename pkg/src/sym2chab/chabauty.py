"""Certified rho-log images of the three residue polydisks and the criterion.

Each residue polydisk of Sym^2 over F_2 (above 2P_inf, (0,a)+(0,a+1) and
(1,a)+(1,a+1)) gets a DiskCertificate: for every component j and every
explicit term (F(u1) - F(u2))/(u1 - u2) = sum a_i/(i+1) h_i(u1, u2) it
records the net valuation bound v(a_i) - v(i+1) + i*floor, where floor is
the guaranteed valuation of the disk coordinate.  Terms with positive bound
vanish mod 2; the few zero-bound terms determine the image in P^{g-1}(F_2).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import mpmath

from .curves import CurveModel, is_good, translate
from .dyadic import DEFAULT_PRECISION, INF, Dyadic, HalfVal, QuadDyadic, hensel_artin_schreier
from .errors import (
    CertificateFailure,
    DimensionMismatch,
    InputFormatError,
    NotGood,
    RankTooLarge,
)
from .modp import F2Vec, MatF2, ProjPtF2
from .series import (
    basis_change_matrix,
    default_truncation,
    diff_quotient,
    eta_at_disk,
    expand_y_of_x,
    infinity_expansion,
    integrate,
)

INFINITY = "Infinity"
ZERO_PAIR = "ZeroPair"
ONE_PAIR = "OnePair"

FLOOR_RAMIFIED = HalfVal(1)   # t in pi*O_K, K possibly ramified quadratic
FLOOR_UNRAMIFIED = HalfVal(2)  # x in 2*O_K, K = Q_4

# Zero-bound terms allowed by the analysis on each disk.
PERMITTED_SURVIVORS = {
    INFINITY: frozenset({(1, 0)}),
    ZERO_PAIR: frozenset({(1, 0), (2, 1)}),
    ONE_PAIR: frozenset({(1, 0), (2, 1)}),
}

MAX_SELMER_RANK = 20


@dataclass(frozen=True)
class TermBound:
    j: int
    i: int
    v_coeff: int | float  # lower bound; INF for an exactly vanishing coefficient
    v_den: int
    floor: HalfVal
    net: HalfVal | None  # None encodes +infinity

    @property
    def positive(self) -> bool:
        return self.net is None or self.net > 0

    @property
    def surviving(self) -> bool:
        return self.net is not None and self.net == 0

    def as_dict(self) -> dict:
        return {
            "j": self.j, "i": self.i,
            "v_coeff": "inf" if self.v_coeff == INF else self.v_coeff,
            "v_den": self.v_den, "floor": str(self.floor),
            "net": "inf" if self.net is None else str(self.net),
            "verdict": "positive" if self.positive else ("survives" if self.surviving else "NEGATIVE"),
        }


def term_bound(j: int, i: int, coeff_valuation, v_den: int, floor: HalfVal) -> TermBound:
    if coeff_valuation == INF:
        return TermBound(j, i, INF, v_den, floor, None)
    net = HalfVal(2 * coeff_valuation - 2 * v_den) + floor * i
    return TermBound(j, i, coeff_valuation, v_den, floor, net)


@dataclass(frozen=True)
class TailLemma:
    """i*floor - log2(i+1) > 0 at i = T0+1 and increasing from there on."""

    floor: HalfVal
    T0: int
    positive_at_start: bool
    increasing: bool
    gap_at_start: float

    @property
    def ok(self) -> bool:
        return self.positive_at_start and self.increasing

    def as_dict(self) -> dict:
        return {"floor": str(self.floor), "T0": self.T0, "i": self.T0 + 1,
                "gap": round(self.gap_at_start, 6),
                "positive": self.positive_at_start, "increasing": self.increasing,
                "ok": self.ok}


def tail_lemma(floor: HalfVal, T0: int) -> TailLemma:
    """Exact integer form of the tail bound for coefficients in Z_2 (or O_K).

    With f = floor = twice/2, at i = T0 + 1:
      i*f > log2(i+1)            iff  2^(i*twice) > (i+1)^2
      f > log2((i+2)/(i+1))      iff  2^twice * (i+1)^2 > (i+2)^2
    and (i+2)/(i+1) decreases in i, so the step inequality persists.
    """
    i = T0 + 1
    tw = floor.twice
    positive = 2 ** (i * tw) > (i + 1) ** 2
    increasing = 2 ** tw * (i + 1) ** 2 > (i + 2) ** 2
    gap = float(floor) * i - float(mpmath.log(i + 1, 2))
    return TailLemma(floor, T0, positive, increasing, gap)


@dataclass(frozen=True)
class Witness:
    label: str
    u1: str
    u2: str
    expected: ProjPtF2
    computed: ProjPtF2 | None

    @property
    def ok(self) -> bool:
        return self.computed is not None and self.computed == self.expected

    def as_dict(self) -> dict:
        return {"label": self.label, "u1": self.u1, "u2": self.u2,
                "expected": str(self.expected),
                "computed": None if self.computed is None else str(self.computed),
                "ok": self.ok}


@dataclass(frozen=True)
class DiskCertificate:
    disk: str
    genus: int
    T: int
    floor: HalfVal
    basis: str
    terms: tuple[TermBound, ...]
    surviving: tuple[tuple[int, int], ...]
    tail: TailLemma
    integral_up_to_T: bool
    image: tuple[ProjPtF2, ...]
    witnesses: tuple[Witness, ...]
    notes: tuple[str, ...] = field(default_factory=tuple)

    def as_dict(self) -> dict:
        return {
            "disk": self.disk, "genus": self.genus, "T": self.T,
            "floor": str(self.floor), "basis": self.basis,
            "terms": [t.as_dict() for t in self.terms],
            "surviving": [list(s) for s in self.surviving],
            "tail": self.tail.as_dict(),
            "integral_up_to_T": self.integral_up_to_T,
            "image": [str(p) for p in self.image],
            "witnesses": [w.as_dict() for w in self.witnesses],
            "notes": list(self.notes),
        }


def _require_good(h: CurveModel) -> None:
    if not is_good(h).good:
        raise NotGood("residue-disk certificates require a good h")


def _term_table(series_list, floor: HalfVal, T: int) -> list[TermBound]:
    out = []
    for j, ser in enumerate(series_list, start=1):
        for t in integrate(ser.truncate(T)).terms:
            out.append(term_bound(j, t.i, _valuation_lower_bound(t.a), t.vden, floor))
    return out


def _valuation_lower_bound(a) -> int | float:
    if isinstance(a, (int, Fraction)):
        if a == 0:
            return INF
        return _frac_val(Fraction(a))
    return a.min_valuation


def _frac_val(x: Fraction) -> int:
    from .dyadic import v2
    return v2(x.numerator) - v2(x.denominator)


def _image_from_survivors(g: int, surviving: Iterable[tuple[int, int]]) -> tuple[ProjPtF2, ...]:
    # i = 0 survivors give a fixed unit coordinate; i = 1 survivors give a free bit.
    fixed = 0
    free = []
    for j, i in surviving:
        if i == 0:
            fixed |= 1 << (j - 1)
        else:
            free.append(j - 1)
    pts = set()
    for mask in range(1 << len(free)):
        v = fixed
        for k, comp in enumerate(free):
            if (mask >> k) & 1:
                v |= 1 << comp
        pts.add(v)
    return tuple(sorted(ProjPtF2(F2Vec(g, v)) for v in pts if v))


def _check_terms(disk: str, terms: list[TermBound]) -> tuple[tuple[int, int], ...]:
    permitted = PERMITTED_SURVIVORS[disk]
    surviving = []
    for t in terms:
        if t.positive:
            continue
        if t.surviving and (t.j, t.i) in permitted:
            surviving.append((t.j, t.i))
            continue
        raise CertificateFailure(
            f"{disk}: term j={t.j}, i={t.i} has net bound {t.net} (not certified positive)", t)
    missing = permitted - set(surviving)
    if (1, 0) in missing:
        raise CertificateFailure(f"{disk}: leading coefficient of component 1 is not a unit")
    return tuple(sorted(surviving))


def _reduce_ratio(x, lead) -> int | None:
    """Residue bit of x / lead in F_2, or None if it is not integral and F_2-rational."""
    r = x / lead
    if isinstance(r, QuadDyadic):
        if r.min_valuation < 0 or r.b.min_valuation < 1:
            return None
        return r.a.residue(1)
    if r.min_valuation < 0:
        return None
    return r.residue(1)


def _witness_point(dqs, u1, u2, g: int) -> ProjPtF2 | None:
    comps = [dq.evaluate(u1, u2) for dq in dqs]
    bits = 0
    for k, c in enumerate(comps):
        b = _reduce_ratio(c, comps[0])
        if b is None:
            return None
        bits |= b << k
    return ProjPtF2(F2Vec(g, bits)) if bits else None


def certify_disk_infinity(h: CurveModel, T: int | None = None) -> DiskCertificate:
    """Certificate that rho-log is constant (1:0:...:0) on the polydisk at 2P_inf."""
    _require_good(h)
    g = h.genus
    T = default_truncation(g) if T is None else T
    if T < 8:
        raise ValueError("certificates need truncation T >= 8")
    omegas = infinity_expansion(h, T).omegas
    integral = all(_valuation_lower_bound(c) >= 0 for om in omegas for c in om.coeffs)
    if not integral:
        raise CertificateFailure("omega expansion is not 2-integral up to T")
    terms = _term_table(omegas, FLOOR_RAMIFIED, T)
    surviving = _check_terms(INFINITY, terms)
    tail = tail_lemma(FLOOR_RAMIFIED, T)
    if not tail.ok:
        raise CertificateFailure(f"tail lemma fails at i = {T + 1} with floor 1/2")
    image = _image_from_survivors(g, surviving)
    dqs = [diff_quotient(integrate(om)) for om in omegas]
    t1, t3 = Dyadic.from_rational(2), Dyadic.from_rational(4)
    expected = ProjPtF2(F2Vec.unit(g, 1))
    wit = Witness("t1=2, t3=4", "2", "4", expected, _witness_point(dqs, t1, t3, g))
    if not wit.ok:
        raise CertificateFailure("infinity witness does not reduce to (1:0:...:0)")
    return DiskCertificate(INFINITY, g, T, FLOOR_RAMIFIED, "omega", tuple(terms),
                           surviving, tail, integral, image, (wit,))


def certify_disk_pair(h: CurveModel, x0: int, T: int | None = None,
                      precision: int = DEFAULT_PRECISION) -> DiskCertificate:
    """Certificate for the polydisk above (x0, a) + (x0, a+1), x0 in {0, 1}.

    For x0 = 1 the curve is translated by x -> x + 1 first, so the image is
    reported in the translated basis (x - 1)^{j-1} dx/(2y+1).
    """
    if x0 not in (0, 1):
        raise ValueError("x0 must be 0 or 1")
    _require_good(h)
    g = h.genus
    T = default_truncation(g) if T is None else T
    if T < 8:
        raise ValueError("certificates need truncation T >= 8")
    hh = translate(h, 1) if x0 == 1 else h
    gamma = hensel_artin_schreier(hh.coeffs[-1], precision)
    y = expand_y_of_x(hh, 0, gamma, T)
    etas = [eta_at_disk(hh, j, 0, gamma, T, y=y) for j in range(1, g + 1)]
    integral = all(_valuation_lower_bound(c) >= 0 for e in etas for c in e.coeffs)
    if not integral:
        raise CertificateFailure("eta expansion is not integral up to T")
    terms = _term_table(etas, FLOOR_UNRAMIFIED, T)
    surviving = _check_terms(ZERO_PAIR if x0 == 0 else ONE_PAIR, terms)
    notes = []
    if (2, 1) in surviving:
        scale = etas[1][1] / etas[0][0]
        if scale.reduce_f4() != 1:
            raise CertificateFailure("free component is scaled by a non-F_2 unit")
        notes.append("component 2 carries (x1+x2)/2 = trace(u) for x1 = 2u; its residue is free")
    tail = tail_lemma(FLOOR_UNRAMIFIED, T)
    if not tail.ok:
        raise CertificateFailure(f"tail lemma fails at i = {T + 1} with floor 1")
    image = _image_from_survivors(g, surviving)
    dqs = [diff_quotient(integrate(e)) for e in etas]
    witnesses = []
    for label, u in (("x1 = 4w", QuadDyadic.of(0, 4, precision)),
                     ("x1 = 2w", QuadDyadic.of(0, 2, precision))):
        x2 = u.conj()
        tr = (u + x2) / 2  # (x1 + x2)/2
        bit = tr.a.residue(1)
        expected = ProjPtF2(F2Vec(g, 1 | (bit << 1)))
        witnesses.append(Witness(label, label.split("= ")[1], "conj(x1)", expected,
                                 _witness_point(dqs, u, x2, g)))
    if set(w.expected for w in witnesses) != set(image) or not all(w.ok for w in witnesses):
        raise CertificateFailure("pair-disk witnesses do not realize the certified image")
    disk = ZERO_PAIR if x0 == 0 else ONE_PAIR
    return DiskCertificate(disk, g, T, FLOOR_UNRAMIFIED,
                           "eta" if x0 == 0 else "eta_translated", tuple(terms),
                           surviving, tail, integral, image, tuple(witnesses), tuple(notes))


def recheck_certificate(cert: DiskCertificate) -> list[str]:
    """Independent re-verification; returns the list of problems (empty = valid).

    Recomputes every net bound in exact rationals from the stored triples,
    re-derives the survivor set, and checks the tail lemma numerically with
    50-digit logarithms instead of the integer comparisons used to emit it.
    """
    problems = []
    f = Fraction(cert.floor.twice, 2)
    seen = set()
    survivors = set()
    for t in cert.terms:
        seen.add((t.j, t.i))
        if t.v_coeff == INF:
            if t.net is not None:
                problems.append(f"term {t.j},{t.i}: infinite coefficient valuation with finite net")
            continue
        net = Fraction(t.v_coeff) - t.v_den + t.i * f
        if t.net is None or t.net.as_fraction() != net:
            problems.append(f"term {t.j},{t.i}: stored net {t.net} != {net}")
        if t.v_den != _val_int(t.i + 1):
            problems.append(f"term {t.j},{t.i}: v({t.i + 1}) recorded as {t.v_den}")
        if net < 0:
            problems.append(f"term {t.j},{t.i}: negative net bound {net}")
        elif net == 0:
            survivors.add((t.j, t.i))
    expected_terms = {(j, i) for j in range(1, cert.genus + 1) for i in range(cert.T + 1)}
    if seen != expected_terms:
        problems.append("term table does not cover every (j, i) with i <= T")
    if survivors != set(cert.surviving):
        problems.append(f"survivors {sorted(survivors)} != recorded {list(cert.surviving)}")
    if not survivors <= PERMITTED_SURVIVORS[cert.disk]:
        problems.append(f"survivors {sorted(survivors)} outside the permitted set")
    if (1, 0) not in survivors:
        problems.append("component 1 has no unit leading term")
    i = cert.tail.T0 + 1
    if cert.tail.T0 < cert.T:
        problems.append("tail starts before the last explicit term")
    with mpmath.workdps(50):
        gap = i * mpmath.mpf(f.numerator) / f.denominator - mpmath.log(i + 1, 2)
        slope = mpmath.mpf(f.numerator) / f.denominator - 1 / ((i + 1) * mpmath.log(2))
    if not (gap > 0 and slope > 0):
        problems.append(f"tail lemma fails numerically at i = {i}")
    if not cert.integral_up_to_T:
        problems.append("integrality spot-check failed")
    if tuple(cert.image) != _image_from_survivors(cert.genus, sorted(survivors)):
        problems.append("image does not match the survivor structure")
    if not all(w.ok for w in cert.witnesses):
        problems.append("a witness does not realize its point")
    return problems


def _val_int(n: int) -> int:
    return (n & -n).bit_length() - 1


def pascal_mod2(g: int) -> MatF2:
    """eta-coordinates = P @ translated-eta-coordinates, P[j][k] = C(j, k) mod 2."""
    # Lucas: C(j, k) is odd iff k is a submask of j.
    return MatF2(g, tuple(sum(1 << k for k in range(j + 1) if (k & j) == k)
                          for j in range(g)))


@dataclass(frozen=True)
class RhoLogImage:
    genus: int
    certificates: tuple[DiskCertificate, ...]
    A_mod2: MatF2
    pascal_mod2: MatF2
    per_disk: dict
    points: tuple[ProjPtF2, ...]

    @property
    def cardinality(self) -> int:
        return len(self.points)

    def bitset(self) -> frozenset[int]:
        return frozenset(p.bits for p in self.points)

    def as_dict(self) -> dict:
        return {
            "genus": self.genus,
            "certificates": [c.as_dict() for c in self.certificates],
            "A_mod2": self.A_mod2.to_lists(),
            "pascal_mod2": self.pascal_mod2.to_lists(),
            "per_disk_omega": {k: [str(p) for p in v] for k, v in self.per_disk.items()},
            "points": [str(p) for p in self.points],
            "cardinality": self.cardinality,
        }


def assemble_rholog(h: CurveModel, T: int | None = None,
                    precision: int = DEFAULT_PRECISION) -> RhoLogImage:
    """Union of the three disk images, expressed in the omega basis."""
    g = h.genus
    T = default_truncation(g) if T is None else T
    c_inf = certify_disk_infinity(h, T)
    c0 = certify_disk_pair(h, 0, T, precision)
    c1 = certify_disk_pair(h, 1, T, precision)
    bc = basis_change_matrix(h, max(T, 2 * g + 2))
    if not bc.A_mod2.is_invertible():
        raise CertificateFailure("basis change matrix is not invertible mod 2")
    P = pascal_mod2(g)
    per_disk = {
        INFINITY: tuple(c_inf.image),
        ZERO_PAIR: tuple(sorted(ProjPtF2(F2Vec(g, bc.A_mod2.apply(p.bits))) for p in c0.image)),
        ONE_PAIR: tuple(sorted(ProjPtF2(F2Vec(g, bc.A_mod2.apply(P.apply(p.bits))))
                               for p in c1.image)),
    }
    points = tuple(sorted(set().union(*per_disk.values())))
    if per_disk[INFINITY] != (ProjPtF2(F2Vec.unit(g, 1)),):
        raise CertificateFailure("infinity disk image is not (1:0:...:0)")
    if len(points) > 5:
        raise CertificateFailure(f"assembled image has {len(points)} > 5 points")
    return RhoLogImage(g, (c_inf, c0, c1), bc.A_mod2, P, per_disk, points)


# -- Selmer data and the criterion ----------------------------------------------


@dataclass(frozen=True)
class SelmerInput:
    """sigma-images (log coordinates mod 2) of a basis of Sel_2 J, one row each."""

    genus: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) > 2 * self.genus:
            raise InputFormatError(f"rank {len(self.rows)} exceeds 2g = {2 * self.genus}")
        for r in self.rows:
            if r < 0 or r >> self.genus:
                raise InputFormatError(f"row {r:#x} wider than genus {self.genus}")

    @property
    def rank(self) -> int:
        return len(self.rows)

    @classmethod
    def from_strings(cls, g: int, rows: Iterable[str]) -> SelmerInput:
        vecs = [F2Vec.from_str(r) for r in rows]
        for v in vecs:
            if v.length != g:
                raise InputFormatError(f"row {v} has length {v.length}, expected {g}")
        return cls(g, tuple(v.bits for v in vecs))

    @classmethod
    def parse(cls, text: str) -> SelmerInput:
        lines = [ln.strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln and not ln.startswith("#")]
        if not lines:
            raise InputFormatError("empty Selmer file", 1)
        head = lines[0].split()
        if len(head) != 2:
            raise InputFormatError("first line must be 'g r'", 1)
        try:
            g, r = int(head[0]), int(head[1])
        except ValueError:
            raise InputFormatError("first line must be 'g r'", 1) from None
        body = lines[1:]
        if len(body) != r:
            raise InputFormatError(f"declared {r} rows, found {len(body)}")
        return cls.from_strings(g, body)

    def dumps(self) -> str:
        return "\n".join([f"{self.genus} {self.rank}"] +
                         [str(F2Vec(self.genus, r)) for r in self.rows]) + "\n"


@dataclass(frozen=True)
class CriterionVerdict:
    sigma_injective: bool
    disjoint: bool
    torsion_ok: bool
    witness: ProjPtF2 | None
    rank: int

    @property
    def overall(self) -> bool:
        return self.sigma_injective and self.disjoint and self.torsion_ok

    def as_dict(self) -> dict:
        return {"sigma_injective": self.sigma_injective, "disjoint": self.disjoint,
                "torsion_ok": self.torsion_ok, "overall": self.overall,
                "witness": None if self.witness is None else str(self.witness),
                "selmer_rank": self.rank}


def _image_points(image) -> tuple[int, frozenset[int]]:
    if isinstance(image, RhoLogImage):
        return image.genus, image.bitset()
    pts = list(image)
    if not pts:
        raise ValueError("an explicit point list must be nonempty to fix the genus")
    return pts[0].genus, frozenset(p.bits for p in pts)


def criterion(image, sel: SelmerInput, torsion_ok: bool) -> CriterionVerdict:
    """The three conditions: sigma injective, P(sigma(Sel)) disjoint from the
    rho-log image, and the prime-to-2 torsion condition (passed in)."""
    g, pts = _image_points(image)
    if sel.genus != g:
        raise DimensionMismatch(f"Selmer genus {sel.genus} != image genus {g}")
    if sel.rank > MAX_SELMER_RANK:
        raise RankTooLarge(f"rank {sel.rank} > {MAX_SELMER_RANK}; refusing to enumerate")
    m = MatF2(g, sel.rows)
    injective = m.rank() == sel.rank
    hits = [v for v in m.row_space(MAX_SELMER_RANK) if v and v in pts]
    witness = ProjPtF2(F2Vec(g, min(hits))) if hits else None
    return CriterionVerdict(injective, not hits, torsion_ok, witness, sel.rank)


def parse_image(text: str) -> list[ProjPtF2]:
    pts = []
    for n, ln in enumerate(text.splitlines(), start=1):
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        try:
            pts.append(ProjPtF2.from_str(ln))
        except (InputFormatError, ValueError) as exc:
            raise InputFormatError(str(exc), n) from None
    if len({p.genus for p in pts}) > 1:
        raise InputFormatError("image points have inconsistent lengths")
    return pts


def certificate_report(image: RhoLogImage, verdict: CriterionVerdict | None = None) -> str:
    doc = image.as_dict()
    if verdict is not None:
        doc["criterion"] = verdict.as_dict()
    return json.dumps(doc, indent=2, sort_keys=True)
