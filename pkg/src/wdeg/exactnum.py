"""Exact scalars, univariate polynomials over Q, Sturm sequences, exact rank
and rational reconstruction.

Scalars are :class:`fractions.Fraction` throughout; nothing in this module
touches floating point except :func:`to_fraction`, which converts binary
floats and mpmath numbers *exactly*.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

import mpmath

__all__ = [
    "QPoly",
    "to_fraction",
    "poly_gcd",
    "is_squarefree",
    "squarefree_part",
    "sturm_sequence",
    "sign_variations",
    "real_root_count",
    "count_roots_in",
    "isolate_real_roots",
    "affine_rank",
    "rational_reconstruct",
    "simplest_rational",
]


def to_fraction(x) -> Fraction:
    """Exact conversion of int / Fraction / str / float / mpmath.mpf."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip().replace("−", "-"))
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, mpmath.mpf):
        if not mpmath.isfinite(x):
            raise ValueError("cannot convert non-finite value %r" % (x,))
        sign, man, exp, _ = x._mpf_
        man = -int(man) if sign else int(man)
        return Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2**-exp)
    raise TypeError("cannot convert %r to Fraction" % (type(x),))


class QPoly:
    """Dense univariate polynomial with rational coefficients.

    ``coeffs[k]`` is the coefficient of ``z**k``.  The zero polynomial has an
    empty coefficient tuple and degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = [to_fraction(a) for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(c)

    # construction helpers
    @classmethod
    def from_roots(cls, roots: Iterable) -> "QPoly":
        out = cls([1])
        for r in roots:
            out = out * cls([-to_fraction(r), 1])
        return out

    @classmethod
    def monomial(cls, k: int, c=1) -> "QPoly":
        return cls([0] * k + [c])

    # basic properties
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Fraction:
        if not self.coeffs:
            return Fraction(0)
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return not self.coeffs

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, k: int) -> Fraction:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = QPoly([other])
        return isinstance(other, QPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return "QPoly(%s)" % self.to_str()

    def to_str(self, var: str = "z") -> str:
        """Human readable form, e.g. ``2*z^3 + z^2 - 3*z - 7``."""
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if k == 0:
                body = str(a)
            else:
                mono = var if k == 1 else "%s^%d" % (var, k)
                body = mono if a == 1 else "%s*%s" % (a, mono)
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += " %s %s" % (sign, body)
        return out

    __str__ = to_str

    # arithmetic
    def __neg__(self):
        return QPoly([-a for a in self.coeffs])

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return QPoly([self[k] + other[k] for k in range(n)])

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if not self.coeffs or not other.coeffs:
            return QPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return QPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = QPoly([1])
        for _ in range(n):
            out = out * self
        return out

    def __divmod__(self, other):
        other = _as_poly(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lc = other.lc
        if len(rem) - 1 < dq:
            return QPoly(), QPoly(rem)
        quo = [Fraction(0)] * (len(rem) - dq)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k]
            if c == 0:
                continue
            c = c / lc
            quo[k - dq] = c
            for j, b in enumerate(other.coeffs):
                rem[k - dq + j] -= c * b
        return QPoly(quo), QPoly(rem[:dq])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other) -> "QPoly":
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError("division is not exact")
        return q

    def derivative(self) -> "QPoly":
        return QPoly([k * a for k, a in enumerate(self.coeffs)][1:])

    def monic(self) -> "QPoly":
        if not self.coeffs:
            return self
        lc = self.lc
        return QPoly([a / lc for a in self.coeffs])

    def __call__(self, x):
        acc = 0
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def content(self) -> Fraction:
        """Positive rational c with self/c primitive in Z[z]."""
        if not self.coeffs:
            return Fraction(0)
        num = reduce(math.gcd, (a.numerator for a in self.coeffs), 0)
        den = reduce(lambda x, y: x * y // math.gcd(x, y),
                     (a.denominator for a in self.coeffs))
        return Fraction(num, den)

    def primitive(self) -> list[int]:
        """Primitive integer coefficients with positive leading coefficient."""
        if not self.coeffs:
            return []
        c = self.content()
        if self.lc < 0:
            c = -c
        return [int(a / c) for a in self.coeffs]

    def to_json(self) -> list[str]:
        return [frac_str(a) for a in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> "QPoly":
        return cls([Fraction(s) for s in data])


def _as_poly(x) -> QPoly:
    return x if isinstance(x, QPoly) else QPoly([x])


def frac_str(a: Fraction) -> str:
    return "%d/%d" % (a.numerator, a.denominator) if a.denominator != 1 else str(a.numerator)


# ---------------------------------------------------------------------------
# gcd / squarefree
# ---------------------------------------------------------------------------

def poly_gcd(a: QPoly, b: QPoly) -> QPoly:
    """Monic gcd of two rational polynomials."""
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd of zero polynomials")
    while not b.is_zero():
        a, b = b, (a % b)
        if not b.is_zero():
            # keep coefficient size in check
            b = b.monic()
    return a.monic()


def is_squarefree(p: QPoly) -> bool:
    if p.degree < 1:
        raise ValueError("degree must be >= 1")
    return poly_gcd(p, p.derivative()).degree == 0


def squarefree_part(p: QPoly) -> QPoly:
    """Monic p / gcd(p, p')."""
    if p.degree < 1:
        return p.monic()
    return (p // poly_gcd(p, p.derivative())).monic()


# ---------------------------------------------------------------------------
# Sturm sequences
# ---------------------------------------------------------------------------

def _normalize_positive(p: QPoly) -> QPoly:
    # divide by the positive content: keeps signs, shrinks coefficients
    c = p.content()
    return QPoly([a / c for a in p.coeffs]) if c else p


def sturm_sequence(p: QPoly) -> list[QPoly]:
    """Sturm chain p, p', -rem(...), ... with primitive-part normalisation."""
    if p.degree < 1:
        raise ValueError("degree must be >= 1")
    seq = [_normalize_positive(p), _normalize_positive(p.derivative())]
    while seq[-1].degree > 0:
        r = -(seq[-2] % seq[-1])
        if r.is_zero():
            break
        seq.append(_normalize_positive(r))
    return seq


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def sign_variations(seq: Sequence[QPoly], x) -> int:
    """Sign changes of the chain at x; x may be +-math.inf."""
    if x == math.inf or x == -math.inf:
        signs = []
        for s in seq:
            sg = _sign(s.lc)
            if x < 0 and s.degree % 2:
                sg = -sg
            signs.append(sg)
    else:
        signs = [_sign(s(x)) for s in seq]
    signs = [s for s in signs if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _require_squarefree(p: QPoly) -> None:
    if not is_squarefree(p):
        raise ValueError("roots must be simple (polynomial is not squarefree)")


def real_root_count(p: QPoly) -> int:
    """Number of distinct real roots of a squarefree p."""
    _require_squarefree(p)
    seq = sturm_sequence(p)
    return sign_variations(seq, -math.inf) - sign_variations(seq, math.inf)


def count_roots_in(seq: Sequence[QPoly], a, b) -> int:
    """Roots in the half-open interval (a, b] for the chain ``seq``."""
    return sign_variations(seq, a) - sign_variations(seq, b)


def cauchy_bound(p: QPoly) -> Fraction:
    lc = abs(p.lc)
    return 1 + max((abs(c) / lc for c in p.coeffs[:-1]), default=Fraction(0))


def isolate_real_roots(p: QPoly) -> list[tuple[Fraction, Fraction]]:
    """Disjoint half-open intervals (lo, hi], one real root each, ascending.

    Degenerate intervals ``(r, r)`` mark exact rational roots hit during
    bisection.  The left end of a non-degenerate interval is never a root.
    """
    _require_squarefree(p)
    seq = sturm_sequence(p)
    B = cauchy_bound(p)
    B = Fraction(2 ** math.ceil(math.log2(B)) if B > 1 else 1)
    out: list[tuple[Fraction, Fraction]] = []
    stack = [(-B, B)]
    while stack:
        a, b = stack.pop()
        n = count_roots_in(seq, a, b)
        if n == 0:
            continue
        if n == 1:
            if p(b) == 0:
                out.append((b, b))
                continue
            # counts are over (a, b]; a root at a belongs to another
            # interval, so split until the left end is clear of it
            if p(a) != 0:
                out.append((a, b))
                continue
        m = (a + b) / 2
        stack.append((m, b))
        stack.append((a, m))
    out.sort()
    return out


# ---------------------------------------------------------------------------
# exact rank
# ---------------------------------------------------------------------------

def _flatten(x) -> list[Fraction]:
    if hasattr(x, "tolist"):
        x = x.tolist()
    if isinstance(x, (list, tuple)):
        out = []
        for y in x:
            out.extend(_flatten(y))
        return out
    return [to_fraction(x)]


def bareiss_rank(rows: list[list[int]]) -> int:
    """Rank of an integer matrix by fraction-free elimination."""
    m = [list(r) for r in rows]
    if not m:
        return 0
    nrows, ncols = len(m), len(m[0])
    rank = 0
    prev = 1
    for col in range(ncols):
        piv = next((r for r in range(rank, nrows) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(rank + 1, nrows):
            for c in range(col + 1, ncols):
                m[r][c] = (m[rank][col] * m[r][c] - m[r][col] * m[rank][c]) // prev
            m[r][col] = 0
        prev = m[rank][col]
        rank += 1
        if rank == nrows:
            break
    return rank


def affine_rank(points: Sequence) -> int:
    """Dimension of the affine hull of ``points`` (each any nested array)."""
    if len(points) == 0:
        raise ValueError("affine_rank of an empty point set")
    flat = [_flatten(p) for p in points]
    n = len(flat[0])
    if any(len(f) != n for f in flat):
        raise ValueError("points must have equal shapes")
    rows = []
    for f in flat[1:]:
        diff = [a - b for a, b in zip(f, flat[0])]
        den = reduce(lambda x, y: x * y // math.gcd(x, y), (d.denominator for d in diff), 1)
        rows.append([int(d * den) for d in diff])
    return bareiss_rank(rows)


# ---------------------------------------------------------------------------
# rational reconstruction
# ---------------------------------------------------------------------------

def simplest_rational(lo: Fraction, hi: Fraction) -> Fraction:
    """Rational of least denominator in [lo, hi] (Stern-Brocot descent).

    Among several integers in the interval the one of least absolute value is
    returned.
    """
    if lo > hi:
        raise ValueError("empty interval: lo > hi")
    if lo <= 0 <= hi:
        return Fraction(0)
    if hi < 0:
        return -simplest_rational(-hi, -lo)
    # continued-fraction descent; convergent matrix [[h1, h0], [k1, k0]]
    h1, h0, k1, k0 = 1, 0, 0, 1
    while True:
        fl = lo.numerator // lo.denominator
        if fl == lo:
            y = fl
            break
        if fl + 1 <= hi:
            y = fl + 1
            break
        h1, h0 = fl * h1 + h0, h1
        k1, k0 = fl * k1 + k0, k1
        lo, hi = 1 / (hi - fl), 1 / (lo - fl)
    return Fraction(y * h1 + h0, y * k1 + k0)


def _farey_neighbours(r: Fraction, bound: int) -> tuple[Fraction, Fraction]:
    a, b = r.numerator, r.denominator
    # right: b*c - a*e = 1 ; left: a*e - b*c = 1 ; largest e <= bound
    if b == 1:
        return Fraction(a * bound - 1, bound), Fraction(a * bound + 1, bound)
    inv = pow(a, -1, b)
    e_r = (-inv) % b
    e_r += ((bound - e_r) // b) * b
    right = Fraction((1 + a * e_r) // b, e_r)
    e_l = inv % b
    e_l += ((bound - e_l) // b) * b
    left = Fraction((a * e_l - 1) // b, e_l)
    return left, right


def rational_reconstruct(lo, hi, bound: int | None = None) -> Fraction | None:
    """Certified rational in [lo, hi].

    Without ``bound`` the least-denominator rational is returned.  With a
    denominator bound H the answer must be the only rational of denominator
    <= H inside the interval; otherwise ``None``.  Width < 1/(2 H^2) settles
    uniqueness immediately, else the Farey neighbours of the candidate in F_H
    are checked.
    """
    lo, hi = to_fraction(lo), to_fraction(hi)
    if lo > hi:
        raise ValueError("lo > hi")
    r = simplest_rational(lo, hi)
    if bound is None:
        return r
    if r.denominator > bound:
        return None
    if hi - lo < Fraction(1, 2 * bound * bound):
        return r
    left, right = _farey_neighbours(r, bound)
    if left >= lo or right <= hi:
        return None
    return r
