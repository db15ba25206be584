"""Truncated power series and the local expansions used on residue disks.

Coefficient rings: int/Fraction (exact, used in the chart at infinity where
everything is defined over Z) and Dyadic/QuadDyadic (used on the disks above
x = 0, 1 where the base point involves a Hensel-lifted root).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence

from .curves import LONG, CurveModel, translate
from .dyadic import INF, Dyadic, QuadDyadic, v2, valuation
from .errors import DivisionByZeroToPrecision, NonConvergence, SingularComparison
from .modp import MatF2


def default_truncation(g: int) -> int:
    return max(2 * g + 6, 16)


def _exact_zero(c) -> bool:
    return isinstance(c, (int, Fraction)) and c == 0


@dataclass(frozen=True)
class TruncSeries:
    """sum coeffs[i] * var**i, exact modulo var**(T+1)."""

    coeffs: tuple
    var: str = "t"

    @classmethod
    def of(cls, coeffs: Sequence, var: str = "t") -> TruncSeries:
        return cls(tuple(coeffs), var)

    @classmethod
    def monomial(cls, k: int, T: int, var: str = "t", c=1) -> TruncSeries:
        return cls(tuple(c if i == k else 0 for i in range(T + 1)), var)

    @property
    def T(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, i: int):
        return self.coeffs[i]

    def __len__(self) -> int:
        return len(self.coeffs)

    def truncate(self, T: int) -> TruncSeries:
        return TruncSeries(self.coeffs[: T + 1], self.var)

    def _lift(self, other):
        if isinstance(other, TruncSeries):
            return other
        return TruncSeries((other,) + (0,) * self.T, self.var)

    def __add__(self, other) -> TruncSeries:
        other = self._lift(other)
        n = min(len(self), len(other))
        return TruncSeries(tuple(self[i] + other[i] for i in range(n)), self.var)

    __radd__ = __add__

    def __neg__(self) -> TruncSeries:
        return TruncSeries(tuple(-c for c in self.coeffs), self.var)

    def __sub__(self, other) -> TruncSeries:
        return self + (-self._lift(other))

    def __rsub__(self, other) -> TruncSeries:
        return self._lift(other) - self

    def scale(self, c) -> TruncSeries:
        return TruncSeries(tuple(c * a for a in self.coeffs), self.var)

    def __mul__(self, other) -> TruncSeries:
        if not isinstance(other, TruncSeries):
            return self.scale(other)
        n = min(len(self), len(other))
        out = [0] * n
        a = [(i, c) for i, c in enumerate(self.coeffs[:n]) if not _exact_zero(c)]
        b = [(j, c) for j, c in enumerate(other.coeffs[:n]) if not _exact_zero(c)]
        for i, x in a:
            for j, y in b:
                if i + j >= n:
                    break
                out[i + j] = out[i + j] + x * y
        return TruncSeries(tuple(out), self.var)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> TruncSeries:
        result = self._lift(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, k: int) -> TruncSeries:
        """Multiply by var**k, keeping the truncation order."""
        return TruncSeries(((0,) * k + self.coeffs)[: len(self)], self.var)

    def divide_by_var(self) -> TruncSeries:
        """Exact division by var; the order drops by one."""
        if not _exact_zero(self[0]) and valuation(self[0]) != INF:
            raise ValueError("series is not divisible by its variable")
        return TruncSeries(self.coeffs[1:], self.var)

    def inverse(self) -> TruncSeries:
        c0 = self[0]
        if _exact_zero(c0):
            raise ZeroDivisionError("constant term is zero")
        inv0 = Fraction(1) / c0 if isinstance(c0, (int, Fraction)) else 1 / c0
        out = [inv0]
        for k in range(1, len(self)):
            acc = 0
            for i in range(1, k + 1):
                if not _exact_zero(self[i]):
                    acc = acc + self[i] * out[k - i]
            out.append(-acc * inv0)
        return TruncSeries(tuple(_tidy(c) for c in out), self.var)

    def __truediv__(self, other) -> TruncSeries:
        if isinstance(other, TruncSeries):
            return self * other.inverse()
        if isinstance(other, (int, Fraction)):
            return TruncSeries(tuple(_tidy(Fraction(c) / other) if isinstance(c, (int, Fraction))
                                     else c / other for c in self.coeffs), self.var)
        return TruncSeries(tuple(c / other for c in self.coeffs), self.var)

    def derivative(self) -> TruncSeries:
        return TruncSeries(tuple(i * self[i] for i in range(1, len(self))), self.var)

    def valuations(self) -> list:
        return [valuation(c) for c in self.coeffs]

    def is_zero(self) -> bool:
        """Every coefficient vanishes (to known precision for p-adic ones)."""
        return all(valuation(c) == INF or (not _exact_zero(c) and c.is_zero)
                   for c in self.coeffs)

    def dump(self) -> list[str]:
        """Debug listing 'index: valuation, unit' per coefficient."""
        lines = []
        for i, c in enumerate(self.coeffs):
            lines.append(f"{i}: {_describe(c)}")
        return lines

    def __str__(self) -> str:
        terms = [f"{c}*{self.var}^{i}" for i, c in enumerate(self.coeffs) if not _exact_zero(c)]
        return (" + ".join(terms) or "0") + f" + O({self.var}^{len(self)})"


def _tidy(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    return c


def _describe(c) -> str:
    if isinstance(c, (int, Fraction)):
        return "inf, 0" if c == 0 else f"{valuation(c)}, {c}"
    if isinstance(c, Dyadic):
        return f"O(2^{c.absprec})" if c.is_zero else f"{c.valuation}, {c.unit}"
    return f"{c.min_valuation}, ({_describe(c.a)} | {_describe(c.b)})"


# -- the chart at infinity ------------------------------------------------------


def _check_exact(h: CurveModel) -> None:
    if h.kind != LONG:
        raise ValueError("expected a long Weierstrass model y^2 + y = h(x)")
    if not all(isinstance(c, (int, Fraction)) for c in h.coeffs):
        raise TypeError("expansions at infinity need int or Fraction coefficients")


def _s_rhs(h: CurveModel, s: TruncSeries) -> TruncSeries:
    # t^2 + s^{g+1} t - (s^{2g+2} h(1/s) - s), from t^2 + s^{g+1}t = s^{2g+2}h(1/s).
    g = h.genus
    T = s.T
    out = TruncSeries.monomial(2, T)
    p = s
    for k, c in enumerate(h.coeffs, start=1):
        p = p * s  # s^{k+1}
        if c != 0:
            out = out - p.scale(c)
        if k == g:
            out = out + p.shift(1)
    return out


def st_curve_residual(h: CurveModel, s: TruncSeries) -> TruncSeries:
    """t^2 + s^{g+1} t - s^{2g+2} h(1/s) evaluated on the series s(t)."""
    _check_exact(h)
    return _s_rhs(h, s) - s


@lru_cache(maxsize=512)
def expand_s_of_t(h: CurveModel, T: int) -> TruncSeries:
    """s = 1/x as a power series in the uniformizer t = y/x^{g+1} at P_inf.

    Fixed-point iteration s <- t^2 + s^{g+1} t - (c_1 s^2 + ... + c_{2g+1} s^{2g+2});
    each pass fixes at least one more coefficient.
    """
    _check_exact(h)
    s = TruncSeries.monomial(2, T)
    for _ in range(T + 2):
        nxt = _s_rhs(h, s)
        if nxt.coeffs == s.coeffs:
            return s
        s = nxt
    raise NonConvergence(f"s(t) did not stabilize within {T + 2} iterations")


def _dF_ds(h: CurveModel, s: TruncSeries) -> TruncSeries:
    # d/ds (t^2 + s^{g+1} t - s^{2g+2} h(1/s)) = (g+1) s^g t - (1 + sum (k+1) c_k s^k)
    g = h.genus
    out = TruncSeries.monomial(0, s.T, c=-1)
    p = s._lift(1)
    for k, c in enumerate(h.coeffs, start=1):
        p = p * s  # s^k
        if c != 0:
            out = out - p.scale((k + 1) * c)
        if k == g:
            out = out + p.shift(1).scale(g + 1)
    return out


@dataclass(frozen=True)
class InfinityExpansion:
    s: TruncSeries
    normalizer: object  # constant term of dt / dF_ds before rescaling
    omegas: tuple[TruncSeries, ...]


@lru_cache(maxsize=512)
def infinity_expansion(h: CurveModel, T: int) -> InfinityExpansion:
    s = expand_s_of_t(h, T)
    raw = _dF_ds(h, s).inverse()
    u = raw[0]
    omega1 = raw / u
    omegas = [omega1]
    sp = omega1
    for _ in range(2, h.genus + 1):
        sp = sp * s
        omegas.append(sp)
    return InfinityExpansion(s, u, tuple(omegas))


def omega_at_infinity(h: CurveModel, j: int, T: int) -> TruncSeries:
    """Coefficient series of omega_j / dt, with omega_1 rescaled to start with 1."""
    if not 1 <= j <= h.genus:
        raise ValueError(f"j must lie in 1..{h.genus}")
    return infinity_expansion(h, T).omegas[j - 1]


# -- the disks above x = 0 and x = 1 ------------------------------------------


def expand_y_of_x(h: CurveModel, x0: int, gamma: QuadDyadic, T: int) -> TruncSeries:
    """y as a power series in the local coordinate x - x0 on the disk of (x0, gamma)."""
    H = translate(h, x0).ascending() if x0 else h.ascending()
    r = gamma * gamma + gamma - H[0]
    if not r.is_zero:
        raise ValueError("gamma^2 + gamma != h(x0) to working precision")
    d = 2 * gamma + 1
    ys = [gamma]
    for k in range(1, T + 1):
        acc = H[k] if k < len(H) else 0
        for i in range(1, k):
            acc = acc - ys[i] * ys[k - i]
        if isinstance(acc, int):
            acc = gamma._coerce(acc)
        ys.append(acc / d)
    return TruncSeries(tuple(ys), "x")


def eta_at_disk(h: CurveModel, j: int, x0: int, gamma: QuadDyadic, T: int,
                y: TruncSeries | None = None) -> TruncSeries:
    """eta_j / dx = (x0 + x)^{j-1} / (2 y(x) + 1) on the disk centered at x0."""
    if y is None:
        y = expand_y_of_x(h, x0, gamma, T)
    eta1 = (y.scale(2) + 1).inverse()
    if j == 1:
        return eta1
    poly = TruncSeries(tuple(comb(j - 1, k) * x0 ** (j - 1 - k) if k < j else 0
                             for k in range(T + 1)), "x")
    return poly * eta1


# -- formal integration and difference quotients -------------------------------


@dataclass(frozen=True)
class IntegralTerm:
    """a * u^{i+1} / (i+1), with v(i+1) carried separately."""

    i: int
    a: object
    vden: int


@dataclass(frozen=True)
class IntegralSeries:
    terms: tuple[IntegralTerm, ...]
    var: str = "t"

    def derivative(self) -> TruncSeries:
        return TruncSeries(tuple(t.a for t in self.terms), self.var)

    def evaluate(self, u):
        acc = 0
        for t in self.terms:
            if not _exact_zero(t.a):
                acc = acc + t.a * u ** (t.i + 1) / (t.i + 1)
        return acc


def integrate(f: TruncSeries) -> IntegralSeries:
    return IntegralSeries(
        tuple(IntegralTerm(i, a, v2(i + 1)) for i, a in enumerate(f.coeffs)), f.var)


def complete_symmetric(i: int, u1, u2):
    """u1^i + u1^{i-1} u2 + ... + u2^i."""
    return _complete_symmetric_upto(i, u1, u2)[i]


def _complete_symmetric_upto(n: int, u1, u2) -> list:
    # h_0 = 1 and h_i = u1 * h_{i-1} + u2^i.
    hs = [1]
    p2 = 1
    for _ in range(n):
        p2 = p2 * u2
        hs.append(u1 * hs[-1] + p2)
    return hs


@dataclass(frozen=True)
class DiffQuotientTerms:
    """sum a_i/(i+1) * (u1^i + ... + u2^i) = (F(u1) - F(u2)) / (u1 - u2)."""

    terms: tuple[IntegralTerm, ...]
    var: str = "t"

    def evaluate(self, u1, u2):
        hs = _complete_symmetric_upto(max((t.i for t in self.terms), default=0), u1, u2)
        acc = 0
        for t in self.terms:
            if not _exact_zero(t.a):
                num = t.a * hs[t.i]
                if isinstance(num, (int, Fraction)):
                    num = Fraction(num)
                acc = acc + num / (t.i + 1)
        return acc

    def as_bivariate(self) -> dict[tuple[int, int], Fraction]:
        """Exact coefficients {(p, q): c} of u1^p u2^q (exact rings only)."""
        out: dict[tuple[int, int], Fraction] = {}
        for t in self.terms:
            if _exact_zero(t.a):
                continue
            c = Fraction(t.a) / (t.i + 1)
            for k in range(t.i + 1):
                out[(k, t.i - k)] = out.get((k, t.i - k), 0) + c
        return {k: v for k, v in out.items() if v != 0}


def diff_quotient(F: IntegralSeries) -> DiffQuotientTerms:
    return DiffQuotientTerms(F.terms, F.var)


# -- change of basis between eta_j = x^{j-1} dx/(2y+1) and omega_j ---------------


def eta_at_infinity(h: CurveModel, T: int) -> list[TruncSeries]:
    """eta_j / dt in the (s, t) chart, exact over Q, known modulo t^{T-1}.

    With x = 1/s, y = t/s^{g+1}: eta_j = -s^{g-j} ds / (2t + s^{g+1}).  Both
    s'(t) and 2t + s^{g+1} are divisible by t; the quotient is formed over Q
    without assuming integrality, which is then observed rather than imposed.
    """
    g = h.genus
    s = expand_s_of_t(h, T)
    num = s.derivative().divide_by_var()
    den = (TruncSeries.monomial(1, T, c=2) + s ** (g + 1)).divide_by_var().truncate(num.T)
    ratio = num * den.inverse()
    s_short = s.truncate(ratio.T)
    out = []
    for j in range(1, g + 1):
        out.append(-(s_short ** (g - j)) * ratio)
    return out


def _frac_inverse(m: list[list[Fraction]]) -> tuple[list[list[Fraction]], Fraction]:
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise SingularComparison("comparison matrix is singular")
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        p = a[col][col]
        det *= p
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a], det


def _frac_mod2(x: Fraction) -> int:
    if x.denominator % 2 == 0:
        raise SingularComparison(f"entry {x} is not 2-integral")
    return x.numerator & 1


@dataclass(frozen=True)
class BasisChange:
    """omega-coordinates = A @ eta-coordinates."""

    A: tuple[tuple[Fraction, ...], ...]
    eta_in_omega: tuple[tuple[Fraction, ...], ...]
    det: Fraction
    A_mod2: MatF2
    checked_order: int

    @property
    def det_odd(self) -> bool:
        return self.det.denominator % 2 == 1 and self.det.numerator % 2 == 1

    def as_dict(self) -> dict:
        return {
            "A": [[str(x) for x in row] for row in self.A],
            "A_mod2": [[self.A_mod2.entry(i, j) for j in range(self.A_mod2.ncols)]
                       for i in range(self.A_mod2.nrows)],
            "det": str(self.det),
            "det_odd": self.det_odd,
        }


@lru_cache(maxsize=512)
def basis_change_matrix(h: CurveModel, T: int) -> BasisChange:
    """Solve eta_j = sum_i M_ji omega_i by triangular comparison; A = M^{-1}."""
    g = h.genus
    if T < 2 * g + 2:
        raise ValueError(f"truncation {T} < 2g+2 = {2 * g + 2}")
    omegas = infinity_expansion(h, T).omegas
    etas = eta_at_infinity(h, T)
    order = etas[0].T
    M = []
    for j, eta in enumerate(etas, start=1):
        R = eta
        row = []
        for i, om in enumerate(omegas, start=1):
            d = 2 * i - 2
            lead = om[d]
            if lead != 1 or any(om[k] != 0 for k in range(d)):
                raise SingularComparison(f"omega_{i} does not start with t^{d}")
            c = Fraction(R[d])
            row.append(c)
            if c:
                R = R - om.truncate(order).scale(c)
        if any(R[k] != 0 for k in range(order + 1)):
            raise SingularComparison(f"eta_{j} is not in the span of the omegas")
        M.append(row)
    A, det_a = _frac_inverse(M)
    A_mod2 = MatF2(g, tuple(sum(_frac_mod2(A[i][j]) << j for j in range(g))
                            for i in range(g)))
    return BasisChange(tuple(tuple(r) for r in A), tuple(tuple(r) for r in M),
                       det_a, A_mod2, order)
