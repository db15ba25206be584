"""Exact 2-adic arithmetic at fixed absolute precision.

``Dyadic`` models elements of Q_2 as ``2**valuation * unit`` known modulo
``2**absprec``; ``QuadDyadic`` models the unramified quadratic extension
Q_4 = Q_2(w) with w**2 + w + 1 = 0.  Exact Python integers and fractions are
coerced on the fly with enough digits that they never limit a result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Union

from .errors import DivisionByZeroToPrecision, Indistinguishable, PrecisionExhausted

INF = math.inf
DEFAULT_PRECISION = 32

Exact = Union[int, Fraction]


def v2(n: int) -> int:
    """2-adic valuation of a nonzero integer."""
    return (n & -n).bit_length() - 1


def valuation(x) -> int | float:
    """Valuation of an int, Fraction, Dyadic or QuadDyadic.

    For p-adic elements known only to finite precision, returns the best
    proven lower bound when the element is indistinguishable from zero.
    """
    if isinstance(x, (Dyadic, QuadDyadic)):
        return x.min_valuation
    if isinstance(x, Fraction):
        if x == 0:
            return INF
        return v2(x.numerator) - v2(x.denominator)
    if isinstance(x, int):
        return INF if x == 0 else v2(x)
    raise TypeError(f"no 2-adic valuation for {type(x).__name__}")


@dataclass(frozen=True, eq=False)
class Dyadic:
    """An element of Q_2 known modulo ``2**absprec``.

    ``valuation`` is ``INF`` exactly when the element is indistinguishable
    from zero; otherwise ``unit`` is odd and reduced modulo ``2**relprec``.
    """

    valuation: int | float
    unit: int
    absprec: int

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def make(cls, m: int, e: int, absprec: int) -> Dyadic:
        """Normalize ``m * 2**e`` modulo ``2**absprec``."""
        if m == 0:
            return cls(INF, 0, absprec)
        k = v2(m)
        v = e + k
        if v >= absprec:
            return cls(INF, 0, absprec)
        return cls(v, (m >> k) % (1 << (absprec - v)), absprec)

    @classmethod
    def zero(cls, absprec: int = DEFAULT_PRECISION) -> Dyadic:
        return cls(INF, 0, absprec)

    @classmethod
    def from_rational(cls, x: Exact, absprec: int = DEFAULT_PRECISION) -> Dyadic:
        x = Fraction(x)
        if x == 0:
            return cls.zero(absprec)
        p, q = x.numerator, x.denominator
        kp, kq = v2(p), v2(q)
        v = kp - kq
        if v >= absprec:
            return cls.zero(absprec)
        mod = 1 << (absprec - v)
        return cls(v, (p >> kp) * pow(q >> kq, -1, mod) % mod, absprec)

    # -- basic properties -------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.valuation == INF

    @property
    def relprec(self) -> int:
        return 0 if self.is_zero else self.absprec - self.valuation

    @property
    def min_valuation(self) -> int:
        return self.absprec if self.is_zero else self.valuation

    def residue(self, k: int) -> int:
        """The integer in [0, 2**k) congruent to self; needs valuation >= 0."""
        if k > self.absprec:
            raise PrecisionExhausted(f"need {k} digits, only {self.absprec} known")
        if self.is_zero:
            return 0
        if self.valuation < 0:
            raise ValueError("element is not 2-adically integral")
        return (self.unit << self.valuation) % (1 << k)

    def to_fraction(self) -> Fraction:
        """The canonical rational representative (digits beyond absprec = 0)."""
        if self.is_zero:
            return Fraction(0)
        return Fraction(self.unit) * Fraction(2) ** self.valuation

    def truncate(self, absprec: int) -> Dyadic:
        if absprec >= self.absprec:
            return self
        if self.is_zero:
            return Dyadic.zero(absprec)
        return Dyadic.make(self.unit, self.valuation, absprec)

    # -- arithmetic -------------------------------------------------------

    def __neg__(self) -> Dyadic:
        if self.is_zero:
            return self
        return Dyadic.make(-self.unit, self.valuation, self.absprec)

    def __add__(self, other) -> Dyadic:
        other = _coerce(other, self)
        if other is NotImplemented:
            return NotImplemented
        absprec = min(self.absprec, other.absprec)
        if self.is_zero:
            return other.truncate(absprec) if not other.is_zero else Dyadic.zero(absprec)
        if other.is_zero:
            return self.truncate(absprec)
        e = min(self.valuation, other.valuation)
        m = (self.unit << (self.valuation - e)) + (other.unit << (other.valuation - e))
        return Dyadic.make(m, e, absprec)

    __radd__ = __add__

    def __sub__(self, other) -> Dyadic:
        other = _coerce(other, self)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> Dyadic:
        other = _coerce(other, self)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> Dyadic:
        other = _coerce(other, self)
        if other is NotImplemented:
            return NotImplemented
        vx, vy = self.min_valuation, other.min_valuation
        absprec = min(self.absprec + vy, other.absprec + vx)
        if self.is_zero or other.is_zero:
            return Dyadic.zero(absprec)
        return Dyadic.make(self.unit * other.unit, vx + vy, absprec)

    __rmul__ = __mul__

    def __truediv__(self, other) -> Dyadic:
        other = _coerce(other, self)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero:
            raise DivisionByZeroToPrecision(
                f"divisor is 0 modulo 2^{other.absprec}")
        if self.is_zero:
            return Dyadic.zero(self.absprec - other.valuation)
        rel = min(self.relprec, other.relprec)
        mod = 1 << rel
        v = self.valuation - other.valuation
        unit = self.unit * pow(other.unit, -1, mod) % mod
        return Dyadic(v, unit, v + rel)

    def __rtruediv__(self, other) -> Dyadic:
        other = _coerce(other, self)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, n: int) -> Dyadic:
        if n < 0:
            return 1 / (self ** -n)
        result = _coerce(1, self)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison -------------------------------------------------------

    def __eq__(self, other) -> bool:
        other = _coerce(other, self)
        if other is NotImplemented:
            return NotImplemented
        d = self - other
        if not d.is_zero:
            return False
        raise Indistinguishable(
            f"elements agree modulo 2^{d.absprec}; equality is not provable")

    def agrees(self, other, digits: int) -> bool:
        """True iff self - other is proven divisible by ``2**digits``."""
        d = self - other
        if not d.is_zero:
            return d.valuation >= digits
        if d.absprec < digits:
            raise PrecisionExhausted(
                f"difference known only modulo 2^{d.absprec} < 2^{digits}")
        return True

    def __repr__(self) -> str:
        if self.is_zero:
            return f"Dyadic(O(2^{self.absprec}))"
        return f"Dyadic(2^{self.valuation}*{self.unit} + O(2^{self.absprec}))"


def _coerce(x, like: Dyadic):
    if isinstance(x, Dyadic):
        return x
    if isinstance(x, bool) or not isinstance(x, (int, Fraction)):
        return NotImplemented
    if x == 0:
        return Dyadic.zero(like.absprec + max(like.relprec, 1))
    v = valuation(x)
    absprec = max(like.absprec, v + max(like.relprec, 1))
    return Dyadic.from_rational(x, absprec)


def arith(x, y, op: str):
    """Dispatch ``op`` in {add, sub, mul, div} on Dyadic or QuadDyadic."""
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown operation {op!r}")


@dataclass(frozen=True, eq=False)
class QuadDyadic:
    """The element a + b*w of Q_4, where w**2 + w + 1 = 0."""

    a: Dyadic
    b: Dyadic

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def of(cls, a, b=0, absprec: int = DEFAULT_PRECISION) -> QuadDyadic:
        if not isinstance(a, Dyadic):
            a = Dyadic.from_rational(a, absprec)
        if not isinstance(b, Dyadic):
            b = Dyadic.from_rational(b, absprec)
        return cls(a, b)

    @classmethod
    def w(cls, absprec: int = DEFAULT_PRECISION) -> QuadDyadic:
        return cls.of(0, 1, absprec)

    @property
    def is_zero(self) -> bool:
        return self.a.is_zero and self.b.is_zero

    @property
    def min_valuation(self) -> int:
        # {1, w} reduces to an F_2-basis of F_4, so the valuation is the min.
        return min(self.a.min_valuation, self.b.min_valuation)

    @property
    def valuation(self) -> int | float:
        return INF if self.is_zero else self.min_valuation

    @property
    def absprec(self) -> int:
        return min(self.a.absprec, self.b.absprec)

    def conj(self) -> QuadDyadic:
        return QuadDyadic(self.a - self.b, -self.b)

    def norm(self) -> Dyadic:
        a, b = self.a, self.b
        return a * a - a * b + b * b

    def trace(self) -> Dyadic:
        return 2 * self.a - self.b

    def reduce_f4(self) -> int:
        """Residue in F_4 encoded as bits (a mod 2) | (b mod 2) << 1."""
        if self.min_valuation < 0:
            raise ValueError("element is not integral")
        return self.a.residue(1) | (self.b.residue(1) << 1)

    def __neg__(self) -> QuadDyadic:
        return QuadDyadic(-self.a, -self.b)

    def __add__(self, other) -> QuadDyadic:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QuadDyadic(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __sub__(self, other) -> QuadDyadic:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QuadDyadic(self.a - other.a, self.b - other.b)

    def __rsub__(self, other) -> QuadDyadic:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other) -> QuadDyadic:
        if isinstance(other, (int, Fraction, Dyadic)) and not isinstance(other, bool):
            return QuadDyadic(self.a * other, self.b * other)
        if not isinstance(other, QuadDyadic):
            return NotImplemented
        a, b, c, d = self.a, self.b, other.a, other.b
        bd = b * d
        return QuadDyadic(a * c - bd, a * d + b * c - bd)

    __rmul__ = __mul__

    def __truediv__(self, other) -> QuadDyadic:
        if isinstance(other, (int, Fraction, Dyadic)) and not isinstance(other, bool):
            return QuadDyadic(self.a / other, self.b / other)
        if not isinstance(other, QuadDyadic):
            return NotImplemented
        if other.is_zero:
            raise DivisionByZeroToPrecision("divisor is 0 to known precision")
        n = other.norm()
        return (self * other.conj()) / n

    def __rtruediv__(self, other) -> QuadDyadic:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, n: int) -> QuadDyadic:
        if n < 0:
            return 1 / (self ** -n)
        result = self._coerce(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        d = self - other
        if not d.is_zero:
            return False
        raise Indistinguishable("elements agree on every known digit")

    def agrees(self, other, digits: int) -> bool:
        other = self._coerce(other)
        d = self - other
        return d.a.agrees(0, digits) and d.b.agrees(0, digits)

    def _coerce(self, x):
        if isinstance(x, QuadDyadic):
            return x
        if isinstance(x, bool):
            return NotImplemented
        if isinstance(x, (int, Fraction)):
            x = _coerce(x, self.a)
        if isinstance(x, Dyadic):
            return QuadDyadic(x, _coerce(0, self.b))
        return NotImplemented

    def __repr__(self) -> str:
        return f"QuadDyadic({self.a!r} + {self.b!r}*w)"


@total_ordering
@dataclass(frozen=True)
class HalfVal:
    """A valuation bound that may be a half-integer; stores twice the value."""

    twice: int

    @classmethod
    def of(cls, x: int | Fraction) -> HalfVal:
        x = Fraction(x)
        if (2 * x).denominator != 1:
            raise ValueError(f"{x} is not a half-integer")
        return cls(int(2 * x))

    @property
    def numerator(self) -> int:
        return self.twice if self.twice % 2 else self.twice // 2

    @property
    def denominator(self) -> int:
        return 2 if self.twice % 2 else 1

    def as_fraction(self) -> Fraction:
        return Fraction(self.twice, 2)

    def __add__(self, other) -> HalfVal:
        if isinstance(other, HalfVal):
            return HalfVal(self.twice + other.twice)
        if isinstance(other, int):
            return HalfVal(self.twice + 2 * other)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other) -> HalfVal:
        if isinstance(other, HalfVal):
            return HalfVal(self.twice - other.twice)
        if isinstance(other, int):
            return HalfVal(self.twice - 2 * other)
        return NotImplemented

    def __rsub__(self, other) -> HalfVal:
        if isinstance(other, int):
            return HalfVal(2 * other - self.twice)
        return NotImplemented

    def __mul__(self, n: int) -> HalfVal:
        if isinstance(n, int):
            return HalfVal(self.twice * n)
        return NotImplemented

    __rmul__ = __mul__

    def __lt__(self, other) -> bool:
        if isinstance(other, HalfVal):
            return self.twice < other.twice
        if isinstance(other, (int, Fraction)):
            return Fraction(self.twice, 2) < other
        return NotImplemented

    def __eq__(self, other) -> bool:
        if isinstance(other, HalfVal):
            return self.twice == other.twice
        if isinstance(other, (int, Fraction)):
            return Fraction(self.twice, 2) == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(Fraction(self.twice, 2))

    def __float__(self) -> float:
        return self.twice / 2

    def __str__(self) -> str:
        return str(self.twice // 2) if self.twice % 2 == 0 else f"{self.twice}/2"


def hensel_artin_schreier(c, N: int = DEFAULT_PRECISION) -> QuadDyadic:
    """Root of gamma**2 + gamma = c in Z_2[w], correct modulo ``2**N``.

    The root reduces to w when c is odd and to 0 when c is even; Newton's
    iteration converges because the derivative 2*gamma + 1 is a unit.
    """
    if not isinstance(c, Dyadic):
        c = Dyadic.from_rational(c, N)
    if c.absprec < N:
        raise PrecisionExhausted(f"c known modulo 2^{c.absprec}, need 2^{N}")
    if c.min_valuation < 0:
        raise ValueError("c must lie in Z_2")
    c = c.truncate(N)
    gamma = QuadDyadic.w(N) if c.residue(1) else QuadDyadic.of(0, 0, N)
    for _ in range(N.bit_length() + 4):
        r = gamma * gamma + gamma - c
        if r.min_valuation >= N:
            return gamma
        gamma = gamma - r / (2 * gamma + 1)
    raise PrecisionExhausted(f"Hensel lift did not reach 2^{N}")
