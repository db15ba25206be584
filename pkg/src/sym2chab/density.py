"""Exact densities as dyadic rationals m/2^k.

The goodness measure is computed by a parity DP over exponents, the family
density rescales it by the volume of the coefficient box (c_i lies in 4^i Z_2),
and the lower bound on the proportion of curves covered by the criterion
multiplies by 1 - 6 * 2^{1-g}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

from .curves import LONG, CurveModel, all_patterns, is_good
from .dyadic import v2
from .errors import GenusTooSmall


@total_ordering
@dataclass(frozen=True)
class DyadicRational:
    """numerator / 2**exponent in lowest terms (odd numerator, or zero with exponent 0)."""

    numerator: int
    exponent: int = 0

    def __post_init__(self):
        n, k = self.numerator, self.exponent
        if n == 0:
            k = 0
        else:
            s = min(v2(n), k) if k > 0 else 0
            n >>= s
            k -= s
            if k < 0:
                n <<= -k
                k = 0
        object.__setattr__(self, "numerator", n)
        object.__setattr__(self, "exponent", k)

    @classmethod
    def of(cls, x) -> DyadicRational:
        if isinstance(x, DyadicRational):
            return x
        x = Fraction(x)
        d = x.denominator
        if d & (d - 1):
            raise ValueError(f"{x} is not a dyadic rational")
        return cls(x.numerator, d.bit_length() - 1)

    @classmethod
    def pow2(cls, e: int) -> DyadicRational:
        """2**e for any integer e."""
        return cls(1 << e, 0) if e >= 0 else cls(1, -e)

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)

    def _common(self, other: DyadicRational) -> tuple[int, int, int]:
        k = max(self.exponent, other.exponent)
        return (self.numerator << (k - self.exponent),
                other.numerator << (k - other.exponent), k)

    def __add__(self, other):
        try:
            other = DyadicRational.of(other)
        except (TypeError, ValueError):
            return NotImplemented
        a, b, k = self._common(other)
        return DyadicRational(a + b, k)

    __radd__ = __add__

    def __neg__(self):
        return DyadicRational(-self.numerator, self.exponent)

    def __sub__(self, other):
        return self + (-DyadicRational.of(other))

    def __rsub__(self, other):
        return DyadicRational.of(other) - self

    def __mul__(self, other):
        try:
            other = DyadicRational.of(other)
        except (TypeError, ValueError):
            return NotImplemented
        return DyadicRational(self.numerator * other.numerator, self.exponent + other.exponent)

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            other = DyadicRational.of(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.numerator == other.numerator and self.exponent == other.exponent

    def __hash__(self):
        return hash((self.numerator, self.exponent))

    def __lt__(self, other):
        other = DyadicRational.of(other)
        a, b, _ = self._common(other)
        return a < b

    def __float__(self) -> float:
        return float(self.to_fraction())

    def sign(self) -> int:
        return (self.numerator > 0) - (self.numerator < 0)

    def log2_form(self) -> str:
        """Exponent notation: 2^e, or m*2^e when the numerator is not +-1."""
        n, k = self.numerator, self.exponent
        if n == 0:
            return "0"
        if abs(n) == 1:
            return ("-" if n < 0 else "") + f"2^{-k}"
        return f"{n}*2^{-k}"

    def __str__(self) -> str:
        if self.exponent == 0:
            return str(self.numerator)
        sign = "-" if self.numerator < 0 else ""
        return f"{sign}{abs(self.numerator)}/2^{self.exponent}"


def _check_genus(g: int) -> None:
    if g < 2:
        raise GenusTooSmall(f"genus must be at least 2, got {g}")


def goodness_fraction(g: int) -> DyadicRational:
    """Fraction of patterns (c_1..c_{2g+1}) in F_2^{2g+1} giving a good h.

    Walks exponents 0..2g+1 keeping counts indexed by the parities of
    #S_0 and #(S_1 u S_2); exponent 2g+1 (leading) and 0 (constant) must lie in S.
    """
    _check_genus(g)
    d = 2 * g + 1
    counts = {(0, 0): 1}
    for k in range(d + 1):
        forced = k in (0, d)
        nxt: dict[tuple[int, int], int] = {}
        for (p0, p12), n in counts.items():
            for bit in ((1,) if forced else (0, 1)):
                key = (p0 ^ (bit and k % 3 == 0), p12 ^ (bit and k % 3 != 0))
                nxt[key] = nxt.get(key, 0) + n
        counts = nxt
    good = counts.get((0, 1), 0)
    return DyadicRational(good, d)


def goodness_fraction_bruteforce(g: int) -> DyadicRational:
    """The same fraction by testing all 2^{2g+1} patterns."""
    _check_genus(g)
    good = sum(is_good(CurveModel(g, LONG, p)).good for p in all_patterns(g))
    return DyadicRational(good, 2 * g + 1)


def scaling_exponent(g: int) -> int:
    """Exponent e with det(c_i -> 4^i c_i) = 4^e, summed term by term."""
    _check_genus(g)
    return sum(range(1, 2 * g + 2))


def family_density(g: int) -> DyadicRational:
    """Density of the scaled family: goodness fraction times 4^{-e}."""
    e = scaling_exponent(g)
    return goodness_fraction(g) * DyadicRational.pow2(-2 * e)


def family_density_closed_form(g: int) -> DyadicRational:
    return DyadicRational.pow2(-(4 * g * g + 6 * g + 5))


def delta_target(g: int) -> DyadicRational:
    return DyadicRational.pow2(-(4 * g * g + 6 * g + 7))


@dataclass(frozen=True)
class DeltaBound:
    genus: int
    factor: DyadicRational
    value: DyadicRational
    target: DyadicRational
    comparison: str  # "equality", "strict" or "fails"
    vacuous: bool

    @property
    def meets_target(self) -> bool:
        return self.comparison != "fails"

    def as_dict(self) -> dict:
        return {
            "genus": self.genus, "factor": str(self.factor),
            "value": str(self.value), "value_exp": self.value.log2_form(),
            "target": self.target.log2_form(), "comparison": self.comparison,
            "vacuous": self.vacuous,
        }


def delta_lower_bound(g: int) -> DeltaBound:
    """(1 - 6 * 2^{1-g}) * family_density(g), compared with 2^{-4g^2-6g-7}."""
    _check_genus(g)
    factor = 1 - 6 * DyadicRational.pow2(1 - g)
    value = factor * family_density(g)
    target = delta_target(g)
    if value == target:
        cmp = "equality"
    elif value > target:
        cmp = "strict"
    else:
        cmp = "fails"
    return DeltaBound(g, factor, value, target, cmp, value.sign() <= 0)


def density_report(g: int) -> dict:
    e = scaling_exponent(g)
    fam = family_density(g)
    delta = delta_lower_bound(g)
    return {
        "genus": g,
        "goodness_fraction": str(goodness_fraction(g)),
        "scaling_exponent": e,
        "scaling_exponent_check": e == 2 * g * g + 3 * g + 1,
        "family_density": str(fam),
        "family_density_exp": fam.log2_form(),
        "family_density_matches_closed_form": fam == family_density_closed_form(g),
        "delta_lower_bound": str(delta.value),
        "delta_lower_bound_exp": delta.value.log2_form(),
        "delta_target_exp": delta.target.log2_form(),
        "comparison": delta.comparison,
        "vacuous": delta.vacuous,
    }
