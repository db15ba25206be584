"""Hyperelliptic curve models y^2 + y = h(x) and y^2 = f(x) of odd degree.

A model stores the non-leading coefficients c_1, ..., c_{2g+1} of the monic
polynomial x^{2g+1} + c_1 x^{2g} + ... + c_{2g+1}.  Coefficients may be
ints, Fractions, or Dyadic elements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, product
from typing import Iterator, Sequence

from .dyadic import Dyadic, valuation
from .errors import GenusTooSmall, InputFormatError, NotGood, NotInFamily, PrecisionExhausted
from .modp import F2_ELEMENTS, F4, F4_ELEMENTS

LONG = "long"
SHORT = "short"


@dataclass(frozen=True)
class CurveModel:
    genus: int
    kind: str
    coeffs: tuple

    def __post_init__(self):
        if self.genus < 2:
            raise GenusTooSmall(f"genus {self.genus} < 2 is not supported")
        if self.kind not in (LONG, SHORT):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if len(self.coeffs) != 2 * self.genus + 1:
            raise ValueError(
                f"genus {self.genus} needs {2 * self.genus + 1} coefficients, "
                f"got {len(self.coeffs)}")
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    @classmethod
    def long(cls, coeffs: Sequence, genus: int | None = None) -> CurveModel:
        g = (len(coeffs) - 1) // 2 if genus is None else genus
        return cls(g, LONG, tuple(coeffs))

    @classmethod
    def from_ascending(cls, poly: Sequence, kind: str = LONG) -> CurveModel:
        """Build from coefficients a_0, ..., a_{2g+1} of x^0, ..., x^{2g+1}."""
        n = len(poly) - 1
        if poly[-1] != 1:
            raise ValueError("polynomial must be monic")
        return cls((n - 1) // 2, kind, tuple(reversed(poly[:-1])))

    @property
    def degree(self) -> int:
        return 2 * self.genus + 1

    def ascending(self) -> list:
        """Coefficients of x^0, ..., x^{2g+1} (leading 1 included)."""
        return list(reversed(self.coeffs)) + [1]

    def coeff(self, k: int):
        """Coefficient of x^k."""
        return self.ascending()[k]

    def __call__(self, x):
        acc = 1
        for c in self.coeffs:
            acc = acc * x + c
        return acc

    def __str__(self) -> str:
        lhs = "y^2 + y" if self.kind == LONG else "y^2"
        terms = [f"x^{self.degree}"]
        for k in range(self.degree - 1, -1, -1):
            c = self.coeff(k)
            if isinstance(c, (int, Fraction)) and c == 0:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            terms.append(f"{c}*{mono}" if mono else f"{c}")
        return f"{lhs} = " + " + ".join(terms)


def _mod2(c) -> int:
    if isinstance(c, Dyadic):
        if c.min_valuation < 0:
            raise ValueError("coefficient is not 2-adically integral")
        return c.residue(1)
    if isinstance(c, Fraction):
        if c.denominator % 2 == 0:
            raise ValueError("coefficient is not 2-adically integral")
        return c.numerator & 1
    return int(c) & 1


def mod2_exponents(h: CurveModel) -> frozenset[int]:
    return frozenset(k for k, c in enumerate(h.ascending()) if _mod2(c))


@dataclass(frozen=True)
class GoodnessReport:
    S: frozenset
    S0: frozenset
    S1: frozenset
    S2: frozenset
    contains_0_and_top: bool
    s0_even: bool
    s12_odd: bool
    good: bool

    def as_dict(self) -> dict:
        return {
            "S": sorted(self.S), "S0": sorted(self.S0), "S1": sorted(self.S1),
            "S2": sorted(self.S2), "contains_0_and_top": self.contains_0_and_top,
            "s0_even": self.s0_even, "s12_odd": self.s12_odd, "good": self.good,
        }


def is_good(h: CurveModel) -> GoodnessReport:
    """Evaluate the goodness predicate on the mod-2 exponent set of h."""
    S = mod2_exponents(h)
    parts = [frozenset(k for k in S if k % 3 == r) for r in range(3)]
    top = {0, h.degree} <= S
    s0_even = len(parts[0]) % 2 == 0
    s12_odd = (len(parts[1]) + len(parts[2])) % 2 == 1
    return GoodnessReport(S, *parts, top, s0_even, s12_odd, top and s0_even and s12_odd)


def all_patterns(g: int) -> Iterator[tuple[int, ...]]:
    """Every mod-2 coefficient pattern (c_1, ..., c_{2g+1}) in {0,1}^{2g+1}."""
    return product((0, 1), repeat=2 * g + 1)


def good_patterns(g: int) -> list[tuple[int, ...]]:
    return [p for p in all_patterns(g) if is_good(CurveModel(g, LONG, p)).good]


def complete_square(h: CurveModel) -> CurveModel:
    """y^2 + y = h(x) becomes (y + 1/2)^2 = h(x) + 1/4."""
    if h.kind != LONG:
        raise ValueError("complete_square expects a long Weierstrass model")
    c = list(h.coeffs)
    c[-1] = c[-1] + Fraction(1, 4)
    return CurveModel(h.genus, SHORT, tuple(c))


def uncomplete_square(f: CurveModel) -> CurveModel:
    if f.kind != SHORT:
        raise ValueError("expected a short Weierstrass model")
    c = list(f.coeffs)
    c[-1] = c[-1] - Fraction(1, 4)
    c = [int(x) if isinstance(x, Fraction) and x.denominator == 1 else x for x in c]
    return CurveModel(f.genus, LONG, tuple(c))


def scale_to_family(h: CurveModel) -> CurveModel:
    """f(x) = 4^{2g+1} h(x/4) + 4^{2g}, an integral monic short model."""
    if h.kind != LONG:
        raise ValueError("scale_to_family expects a long model")
    g = h.genus
    if not all(isinstance(c, int) for c in h.coeffs):
        raise ValueError("scale_to_family needs integer coefficients")
    c = [4 ** i * ci for i, ci in enumerate(h.coeffs, start=1)]
    c[-1] += 4 ** (2 * g)
    return CurveModel(g, SHORT, tuple(c))


def unscale_from_family(f: CurveModel) -> CurveModel:
    """Inverse of scale_to_family; raises NotInFamily if f is not in its image."""
    g = f.genus
    c = list(f.coeffs)
    c[-1] -= 4 ** (2 * g)
    out = []
    for i, ci in enumerate(c, start=1):
        q = Fraction(ci, 4 ** i)
        if q.denominator != 1:
            raise NotInFamily(f"coefficient a_{i} = {f.coeffs[i - 1]} is not of the form 4^{i}*c")
        out.append(int(q))
    return CurveModel(g, LONG, tuple(out))


def height(f: CurveModel) -> float:
    """ht = max |a_i|^{1/i}; reporting only."""
    return max((abs(float(Fraction(c))) ** (1.0 / i)
                for i, c in enumerate(f.coeffs, start=1)), default=0.0)


def translate(h: CurveModel, a) -> CurveModel:
    """The model with polynomial h(x + a)."""
    p = h.ascending()
    n = len(p) - 1
    for i in range(n):
        for j in range(n - 1, i - 1, -1):
            p[j] = p[j] + a * p[j + 1]
    return CurveModel.from_ascending(p, h.kind)


@dataclass(frozen=True)
class NewtonPolygon:
    vertices: tuple[tuple[int, int], ...]
    slopes: tuple[Fraction, ...]
    irreducible_by_polygon: bool
    interior_lattice_points: int

    def as_dict(self) -> dict:
        return {
            "vertices": [list(v) for v in self.vertices],
            "slopes": [str(s) for s in self.slopes],
            "interior_lattice_points": self.interior_lattice_points,
            "irreducible_by_polygon": self.irreducible_by_polygon,
        }


def newton_polygon(f) -> NewtonPolygon:
    """Lower convex hull of (k, v(a_k)) over the nonzero coefficients.

    ``f`` is a CurveModel or an ascending coefficient list.  The Eisenstein
    style test: a single segment spanning the full degree with no interior
    lattice point proves irreducibility over Q_2.
    """
    poly = f.ascending() if isinstance(f, CurveModel) else list(f)
    pts = []
    for k, c in enumerate(poly):
        if isinstance(c, Dyadic):
            if c.is_zero:
                raise PrecisionExhausted(f"valuation of coefficient of x^{k} is unknown")
            pts.append((k, c.valuation))
        elif c != 0:
            pts.append((k, valuation(Fraction(c))))
    hull: list[tuple[int, int]] = []
    for p in pts:
        # Pop while the last turn is not strictly counter-clockwise.
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    slopes = tuple(Fraction(b[1] - a[1], b[0] - a[0]) for a, b in zip(hull, hull[1:]))
    interior = sum(math.gcd(b[0] - a[0], abs(b[1] - a[1])) - 1
                   for a, b in zip(hull, hull[1:]))
    n = len(poly) - 1
    irreducible = (len(hull) == 2 and hull[0][0] == 0 and hull[1][0] == n
                   and interior == 0)
    return NewtonPolygon(tuple(hull), slopes, irreducible, interior)


# -- points over F_2 and F_4 ----------------------------------------------


@dataclass(frozen=True)
class Point:
    """A point of the special fiber; ``x is None`` encodes P_inf."""

    x: F4 | None
    y: F4 | None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def frobenius(self) -> Point:
        if self.is_infinity:
            return self
        return Point(self.x.frobenius(), self.y.frobenius())

    def involution(self) -> Point:
        if self.is_infinity:
            return self
        return Point(self.x, self.y + F4.ONE)

    def is_f2_rational(self) -> bool:
        return self.is_infinity or (self.x in F2_ELEMENTS and self.y in F2_ELEMENTS)

    def __str__(self) -> str:
        return "P_inf" if self.is_infinity else f"({self.x},{self.y})"

    def sort_key(self):
        return (-1, -1) if self.is_infinity else (int(self.x), int(self.y))


P_INF = Point(None, None)


def reduce_mod2(h: CurveModel) -> list[F4]:
    """Descending coefficient list of h mod 2 (leading 1 first)."""
    return [F4.ONE] + [F4(_mod2(c)) for c in h.coeffs]


def eval_mod2(h: CurveModel, x: F4) -> F4:
    acc = F4.ZERO
    for c in reduce_mod2(h):
        acc = acc * x + c
    return acc


def enumerate_points(h: CurveModel, field: str = "F2") -> list[Point]:
    """Points of y^2 + y = h(x) over F_2 or F_4 (mod-2 reduction), P_inf first."""
    if h.kind != LONG:
        raise ValueError("point enumeration uses the long model")
    xs = F2_ELEMENTS if field == "F2" else F4_ELEMENTS
    if field not in ("F2", "F4"):
        raise ValueError(f"unknown field {field!r}")
    pts = [P_INF]
    for x in xs:
        v = eval_mod2(h, x)
        for y in xs:
            if y * y + y == v:
                pts.append(Point(x, y))
    return sorted(pts, key=Point.sort_key)


TWO_INFINITY = "TwoInfinity"
PAIR_AT = "PairAt"
OTHER = "Other"


@dataclass(frozen=True)
class Sym2Class:
    kind: str
    points: tuple[Point, Point]
    is_hyperelliptic_fiber: bool
    x0: int | None = None

    def __str__(self) -> str:
        if self.kind == TWO_INFINITY:
            return "2P_inf"
        return f"{self.points[0]} + {self.points[1]}"


def _is_fiber(p: Point, q: Point) -> bool:
    if p.is_infinity or q.is_infinity:
        return p.is_infinity and q.is_infinity
    # Affine points are never fixed by (x, y) -> (x, y + 1) in characteristic 2.
    return q == p.involution()


def sym2_classes(h: CurveModel, strict: bool = True) -> list[Sym2Class]:
    """F_2-rational effective degree-2 divisors on the special fiber.

    These are pairs of F_2-points and Frobenius-conjugate pairs of
    F_4-points.  With ``strict`` the curve must be good and yield exactly the
    three hyperelliptic fibers above x = inf, 0, 1; otherwise NotGood.
    """
    if strict and not is_good(h).good:
        raise NotGood("sym2_classes requires a good h")
    f2 = enumerate_points(h, "F2")
    f4_only = [p for p in enumerate_points(h, "F4") if not p.is_f2_rational()]
    divisors = list(combinations_with_replacement(f2, 2))
    seen = set()
    for p in f4_only:
        if p not in seen:
            q = p.frobenius()
            seen.update((p, q))
            divisors.append(tuple(sorted((p, q), key=Point.sort_key)))
    out = []
    for p, q in divisors:
        fiber = _is_fiber(p, q)
        if p.is_infinity and q.is_infinity:
            kind, x0 = TWO_INFINITY, None
        elif fiber and p.x in F2_ELEMENTS:
            kind, x0 = PAIR_AT, int(p.x)
        else:
            kind, x0 = OTHER, None
        out.append(Sym2Class(kind, (p, q), fiber, x0))
    if strict and (len(out) != 3 or not all(c.is_hyperelliptic_fiber for c in out)):
        raise NotGood(f"expected 3 hyperelliptic fibers, found {len(out)} classes")
    return out


def torsion_condition_ok(h: CurveModel) -> bool:
    """The prime-to-2 torsion condition via the hyperelliptic-fiber argument.

    Valid only for good h (good reduction makes reduction injective on
    prime-to-2 torsion); every F_2-class of degree-2 divisors must be a fiber
    of the x-map, hence trivial in the Jacobian of the special fiber.
    """
    if not is_good(h).good:
        return False
    return all(c.is_hyperelliptic_fiber for c in sym2_classes(h, strict=False))


# -- text input --------------------------------------------------------------


def parse_coeffs(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.replace(" ", "").split(",") if tok != ""]
    except ValueError as exc:
        raise InputFormatError(f"bad coefficient list {text!r}") from exc


def parse_curve_line(line: str, lineno: int | None = None, kind: str = LONG) -> CurveModel:
    """Parse ``g; c_1, ..., c_{2g+1}`` into a model."""
    if ";" not in line:
        raise InputFormatError("expected 'g; c_1, ..., c_{2g+1}'", lineno)
    gtext, ctext = line.split(";", 1)
    try:
        g = int(gtext)
    except ValueError:
        raise InputFormatError(f"bad genus {gtext.strip()!r}", lineno) from None
    try:
        coeffs = parse_coeffs(ctext)
    except InputFormatError as exc:
        raise InputFormatError(str(exc), lineno) from None
    if len(coeffs) != 2 * g + 1:
        raise InputFormatError(
            f"genus {g} needs {2 * g + 1} coefficients, got {len(coeffs)}", lineno)
    try:
        return CurveModel(g, kind, tuple(coeffs))
    except (GenusTooSmall, ValueError) as exc:
        raise InputFormatError(str(exc), lineno) from None
