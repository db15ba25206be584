"""Arithmetic over F_2 and F_4, bit-packed F_2 vectors/matrices, P^{g-1}(F_2).

F_2 vectors are Python ints used as bitsets: coordinate k (0-based) lives in
bit k.  The text form lists coordinates left to right, so ``"1010"`` is the
vector with coordinates 1 and 3 (1-based) set.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from itertools import product
from typing import Iterable, Iterator

from .errors import InputFormatError, RankTooLarge, ZeroVector


class F4(IntEnum):
    """F_4 = F_2[a]/(a^2 + a + 1); the value is the bit pattern (c0 | c1 << 1)."""

    ZERO = 0
    ONE = 1
    A = 2  # alpha
    A1 = 3  # alpha + 1

    def __add__(self, other):
        if isinstance(other, F4):
            return F4(int(self) ^ int(other))
        return NotImplemented

    __sub__ = __add__

    def __mul__(self, other):
        if isinstance(other, F4):
            return _F4_MUL[self][other]
        return NotImplemented

    def __pow__(self, n: int):
        r = F4.ONE
        for _ in range(n):
            r = r * self
        return r

    def frobenius(self) -> F4:
        return self * self

    def __str__(self) -> str:
        return ("0", "1", "a", "a+1")[self]


_F4_MUL = (
    (F4.ZERO, F4.ZERO, F4.ZERO, F4.ZERO),
    (F4.ZERO, F4.ONE, F4.A, F4.A1),
    (F4.ZERO, F4.A, F4.A1, F4.ONE),
    (F4.ZERO, F4.A1, F4.ONE, F4.A),
)

F2_ELEMENTS = (F4.ZERO, F4.ONE)
F4_ELEMENTS = tuple(F4)


def _clmul_reduce(x: int, y: int) -> int:
    # Carry-less product of two 2-bit polynomials, reduced by a^2 = a + 1.
    p = 0
    for k in range(2):
        if (y >> k) & 1:
            p ^= x << k
    if p & 0b100:
        p ^= 0b111
    return p


def f4_table_check() -> dict:
    """Verify the F_4 tables against polynomial arithmetic mod a^2 + a + 1."""
    bad = []
    for x, y in product(F4, repeat=2):
        if int(x * y) != _clmul_reduce(int(x), int(y)):
            bad.append(("mul", str(x), str(y)))
        if int(x + y) != int(x) ^ int(y):
            bad.append(("add", str(x), str(y)))
    frob_ok = all((x * x) == _clmul_reduce(int(x), int(x)) for x in F4)
    frob_nontrivial = F4.A.frobenius() == F4.A1
    return {
        "products_checked": 16,
        "sums_checked": 16,
        "mismatches": bad,
        "frobenius_is_automorphism": frob_ok and all(
            (x * y).frobenius() == x.frobenius() * y.frobenius()
            for x, y in product(F4, repeat=2)),
        "frobenius_nontrivial": frob_nontrivial,
        "ok": not bad and frob_ok and frob_nontrivial,
    }


@dataclass(frozen=True, order=True)
class F2Vec:
    length: int
    bits: int

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("length must be positive")
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError(f"bits {self.bits:#x} exceed length {self.length}")

    @classmethod
    def from_str(cls, s: str) -> F2Vec:
        s = s.strip()
        if not s or any(ch not in "01" for ch in s):
            raise InputFormatError(f"not a bit string: {s!r}")
        return cls(len(s), sum(1 << k for k, ch in enumerate(s) if ch == "1"))

    @classmethod
    def from_coords(cls, coords: Iterable[int]) -> F2Vec:
        coords = list(coords)
        return cls(len(coords), sum((c & 1) << k for k, c in enumerate(coords)))

    @classmethod
    def unit(cls, length: int, k: int) -> F2Vec:
        """The k-th standard basis vector, 1-based."""
        return cls(length, 1 << (k - 1))

    def coords(self) -> tuple[int, ...]:
        return tuple((self.bits >> k) & 1 for k in range(self.length))

    def is_zero(self) -> bool:
        return self.bits == 0

    def __add__(self, other: F2Vec) -> F2Vec:
        if self.length != other.length:
            raise ValueError("length mismatch")
        return F2Vec(self.length, self.bits ^ other.bits)

    def __str__(self) -> str:
        return "".join(str(c) for c in self.coords())


@dataclass(frozen=True, order=True)
class ProjPtF2:
    """A point of P^{g-1}(F_2); the only unit is 1, so coordinates are unique."""

    coords: F2Vec

    def __post_init__(self):
        if self.coords.is_zero():
            raise ZeroVector("the zero vector has no projective class")

    @classmethod
    def from_str(cls, s: str) -> ProjPtF2:
        s = s.strip()
        if s.startswith("(") and s.endswith(")"):
            s = "".join(s[1:-1].split(":"))
        return cls(F2Vec.from_str(s))

    @property
    def genus(self) -> int:
        return self.coords.length

    @property
    def bits(self) -> int:
        return self.coords.bits

    def __str__(self) -> str:
        return "(" + ":".join(str(c) for c in self.coords.coords()) + ")"


def projectivize(v: F2Vec) -> ProjPtF2:
    if v.is_zero():
        raise ZeroVector("cannot projectivize the zero vector")
    return ProjPtF2(v)


def projective_points(g: int) -> list[ProjPtF2]:
    """All 2**g - 1 points of P^{g-1}(F_2), ordered by bitset value."""
    return [ProjPtF2(F2Vec(g, b)) for b in range(1, 1 << g)]


def gf2_rank(rows: Iterable[int]) -> int:
    """Rank over GF(2) of int bitset rows (xor-basis elimination)."""
    basis: list[int] = []
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
    return len(basis)


def _echelon(rows: Iterable[int]) -> list[int]:
    basis: list[int] = []
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
    return basis


@dataclass(frozen=True)
class MatF2:
    """An r x g matrix over F_2 stored as g-bit row bitsets."""

    ncols: int
    rows: tuple[int, ...]

    def __post_init__(self):
        for r in self.rows:
            if r < 0 or r >> self.ncols:
                raise ValueError(f"row {r:#x} wider than {self.ncols} columns")

    @classmethod
    def from_lists(cls, entries: list[list[int]], ncols: int | None = None) -> MatF2:
        if ncols is None:
            ncols = len(entries[0]) if entries else 0
        return cls(ncols, tuple(F2Vec.from_coords(row).bits for row in entries))

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def entry(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def to_lists(self) -> list[list[int]]:
        return [[self.entry(i, j) for j in range(self.ncols)] for i in range(self.nrows)]

    def rank(self) -> int:
        return gf2_rank(self.rows)

    def apply(self, v: int) -> int:
        """Matrix-vector product M v for a column vector given as a bitset."""
        out = 0
        for i, r in enumerate(self.rows):
            out |= (bin(r & v).count("1") & 1) << i
        return out

    def __matmul__(self, other: MatF2) -> MatF2:
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        cols = [sum(other.entry(i, j) << i for i in range(other.nrows))
                for j in range(other.ncols)]
        rows = []
        for r in self.rows:
            rows.append(sum((bin(r & c).count("1") & 1) << j for j, c in enumerate(cols)))
        return MatF2(other.ncols, tuple(rows))

    def is_invertible(self) -> bool:
        return self.nrows == self.ncols and self.rank() == self.ncols

    def row_space(self, max_rank: int = 20) -> Iterator[int]:
        """Every vector of the row space, including 0, as bitsets."""
        basis = _echelon(self.rows)
        if len(basis) > max_rank:
            raise RankTooLarge(f"row space of rank {len(basis)} exceeds {max_rank}")
        yield 0
        v = 0
        # Gray code: step k flips the basis vector indexed by its lowest set bit.
        for k in range(1, 1 << len(basis)):
            v ^= basis[v2_low(k)]
            yield v

    def __str__(self) -> str:
        return "\n".join(str(F2Vec(self.ncols, r)) for r in self.rows)


def v2_low(k: int) -> int:
    return (k & -k).bit_length() - 1


def rank_and_injectivity(m: MatF2) -> tuple[int, bool]:
    """Rank of ``m`` and whether its rows are linearly independent."""
    rank = m.rank()
    return rank, rank == m.nrows


def identity(g: int) -> MatF2:
    return MatF2(g, tuple(1 << k for k in range(g)))
