"""Certified root isolation for squarefree rational polynomials.

Real roots come from exact Sturm bisection.  Non-real roots are approximated
by Aberth-Ehrlich iteration and then certified with the inclusion disk
``|z - m| <= d |p(m) / p'(m)|`` evaluated in exact Gaussian-rational
arithmetic.  Disjoint disks in the open upper half plane, one per conjugate
pair, each hold exactly one root because Sturm already fixed the number of
real roots.

Root order (frozen): real roots ascending, then conjugate pairs by ascending
real part, ties by ascending |imaginary part|, the member with positive
imaginary part first.
"""
from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np
from mpmath import iv

from .exactnum import QPoly, is_squarefree, isolate_real_roots, to_fraction

__all__ = ["ComplexBall", "RootSystem", "isolate_roots", "refine", "canonical_involution",
           "CertificationError", "ivprec", "iv_bounds", "iv_exact"]

DEFAULT_PRECISION = 128
MAX_PRECISION = 1 << 16


@contextmanager
def ivprec(bits: int):
    """Temporarily set the working precision of mpmath's interval context."""
    old = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = old


def _raw_fraction(raw) -> Fraction:
    sign, man, exp, _ = raw
    if not man and exp:
        raise ValueError("non-finite interval endpoint")
    man = -int(man) if sign else int(man)
    return Fraction(man << exp) if exp >= 0 else Fraction(man, 1 << -exp)


def iv_bounds(x) -> tuple[Fraction, Fraction]:
    """Exact endpoints of an mpmath real interval."""
    a, b = x._mpi_
    return _raw_fraction(a), _raw_fraction(b)


class CertificationError(RuntimeError):
    pass


@dataclass(frozen=True)
class ComplexBall:
    """Closed disk ``|z - (re + i im)| <= radius``; radius 0 means exact.

    For real roots ``im`` is exactly 0 and the enclosure is the real segment
    ``[re - radius, re + radius]``.
    """

    re: Fraction
    im: Fraction
    radius: Fraction
    precision_bits: int
    real: bool = False

    @property
    def midpoint(self) -> complex:
        return complex(float(self.re), float(self.im))

    def conjugate(self) -> "ComplexBall":
        return ComplexBall(self.re, -self.im, self.radius, self.precision_bits, self.real)

    def contains_ball(self, other: "ComplexBall") -> bool:
        dist2 = (self.re - other.re) ** 2 + (self.im - other.im) ** 2
        slack = self.radius - other.radius
        return slack >= 0 and dist2 <= slack * slack

    def to_iv(self):
        """Rectangular complex interval containing the ball (current iv.prec)."""
        r = iv_exact(self.radius)
        re = iv_exact(self.re) + iv.mpf([-1, 1]) * r
        if self.real:
            im = iv.mpf(0)
        else:
            im = iv_exact(self.im) + iv.mpf([-1, 1]) * r
        return iv.mpc(re, im)


def _mpf(x: Fraction):
    """Exact mpf for a dyadic fraction (precision sized to the mantissa)."""
    n, d = x.numerator, x.denominator
    if d & (d - 1):
        raise ValueError("not a dyadic rational: %r" % (x,))
    with mpmath.workprec(max(53, abs(n).bit_length() + 2)):
        return mpmath.mpf((n, -(d.bit_length() - 1)))


def iv_exact(x: Fraction):
    """Tightest outward-rounded interval around a rational at iv.prec."""
    x = to_fraction(x)
    if x.denominator & (x.denominator - 1) == 0:
        return iv.mpf(_mpf(x))
    return iv.mpf(x.numerator) / x.denominator


@dataclass(frozen=True)
class RootSystem:
    poly: QPoly
    roots: tuple[ComplexBall, ...]
    conj_involution: tuple[int, ...]
    n_real: int
    n_pairs: int
    precision_bits: int

    @property
    def degree(self) -> int:
        return len(self.roots)

    @property
    def signature(self) -> tuple[int, int]:
        return (self.n_real, self.n_pairs)

    def iv_roots(self, prec: int | None = None):
        with ivprec(prec or self.precision_bits + 32):
            return [b.to_iv() for b in self.roots]

    def midpoints(self) -> np.ndarray:
        return np.array([b.midpoint for b in self.roots], dtype=complex)


def canonical_involution(n_real: int, n_pairs: int) -> tuple[int, ...]:
    """Fixes 0..n_real-1 and swaps (n_real+2t, n_real+2t+1)."""
    img = list(range(n_real + 2 * n_pairs))
    for t in range(n_pairs):
        a = n_real + 2 * t
        img[a], img[a + 1] = a + 1, a
    return tuple(img)


# ---------------------------------------------------------------------------
# exact evaluation helpers
# ---------------------------------------------------------------------------

def _dyadic(x, bits: int) -> Fraction:
    """Round an mpf to a dyadic rational with ``bits`` fractional bits."""
    f = to_fraction(x) * (1 << bits)
    return Fraction(round(f), 1 << bits)


def _int_coeffs(p: QPoly) -> list[int]:
    return p.primitive()


def _sign_at(c: list[int], x: Fraction) -> int:
    # sign of sum c_j n^j den^(deg-j), a positive multiple of p(n/den)
    n, den = x.numerator, x.denominator
    acc = 0
    pw = 1
    for j in range(len(c) - 1, -1, -1):
        acc = acc * n + c[j] * pw
        pw *= den
    return (acc > 0) - (acc < 0)


def _gauss_eval(c: list[int], X: int, Y: int, k: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """p(m) 2^(k d) and p'(m) 2^(k (d-1)) as Gaussian integers, m = (X + iY)/2^k."""
    d = len(c) - 1
    s = 1 << k
    pr, pi_ = 0, 0
    for j in range(d, -1, -1):
        pr, pi_ = pr * X - pi_ * Y + c[j] * s ** (d - j), pr * Y + pi_ * X
    dr, di = 0, 0
    for j in range(d, 0, -1):
        dr, di = dr * X - di * Y + j * c[j] * s ** (d - j), dr * Y + di * X
    return (pr, pi_), (dr, di)


def _isqrt_up(num: int, den: int, bits: int) -> Fraction:
    """Upper bound for sqrt(num/den) with ``bits`` fractional bits."""
    scaled = -((-num << (2 * bits)) // den)
    r = math.isqrt(scaled)
    if r * r < scaled:
        r += 1
    return Fraction(r, 1 << bits)


def _inclusion_radius(c: list[int], re: Fraction, im: Fraction, bits: int) -> Fraction | None:
    """Rigorous d |p(m)/p'(m)| rounded up; None if p'(m) == 0."""
    k = max(re.denominator.bit_length(), im.denominator.bit_length()) - 1
    s = 1 << k
    X, Y = int(re * s), int(im * s)
    d = len(c) - 1
    (pr, pi_), (dr, di) = _gauss_eval(c, X, Y, k)
    num = pr * pr + pi_ * pi_
    den = dr * dr + di * di
    if den == 0:
        return None
    if num == 0:
        return Fraction(0)
    # r^2 = d^2 num / (den 4^k)
    return _isqrt_up(d * d * num, den << (2 * k), bits)


# ---------------------------------------------------------------------------
# approximation
# ---------------------------------------------------------------------------

def _aberth(coeffs: list, z: list, prec: int, maxiter: int = 500) -> list:
    """Simultaneous Aberth-Ehrlich iteration; coeffs low -> high (mpf)."""
    n = len(z)
    tol = mpmath.mpf(2) ** (-prec)
    dcoeffs = [k * a for k, a in enumerate(coeffs)][1:]
    for _ in range(maxiter):
        worst = mpmath.mpf(0)
        for i in range(n):
            zi = z[i]
            pv = mpmath.polyval(coeffs[::-1], zi)
            dv = mpmath.polyval(dcoeffs[::-1], zi)
            if pv == 0:
                continue
            if dv == 0:
                z[i] = zi + tol * (1 + 1j)
                worst = mpmath.mpf(1)
                continue
            ratio = pv / dv
            s = mpmath.fsum(1 / (zi - z[j]) for j in range(n) if j != i)
            w = ratio / (1 - ratio * s)
            z[i] = zi - w
            scale = max(abs(zi), 1)
            worst = max(worst, abs(w) / scale)
        if worst < tol:
            break
    return z


def _initial_guesses(p: QPoly) -> list:
    c = [float(a) for a in p.coeffs]
    try:
        with np.errstate(all="ignore"):
            r = np.roots(c[::-1])
        if np.all(np.isfinite(r)) and len(r) == p.degree:
            # nudge off exact coincidences so Aberth sums stay finite
            out = []
            for k, x in enumerate(r):
                out.append(mpmath.mpc(x.real, x.imag) + mpmath.mpc(0, 1e-12 * (k + 1)))
            return out
    except (np.linalg.LinAlgError, ValueError, OverflowError):
        pass
    rad = float(max(abs(a) for a in p.coeffs[:-1]) / abs(p.lc)) + 1
    n = p.degree
    return [mpmath.mpc(rad * math.cos(2 * math.pi * k / n + 0.4), rad * math.sin(2 * math.pi * k / n + 0.4))
            for k in range(n)]


def _newton_polish(p: QPoly, z, prec: int, steps: int = 60):
    coeffs = [mpmath.mpf(a.numerator) / a.denominator for a in p.coeffs][::-1]
    dco = [k * a for k, a in enumerate(p.coeffs)][1:][::-1]
    dco = [mpmath.mpf(a.numerator) / a.denominator for a in dco]
    tol = mpmath.mpf(2) ** (-prec)
    for _ in range(steps):
        dv = mpmath.polyval(dco, z)
        if dv == 0:
            break
        step = mpmath.polyval(coeffs, z) / dv
        z = z - step
        if abs(step) <= tol * max(1, abs(z)):
            break
    return z


# ---------------------------------------------------------------------------
# real roots
# ---------------------------------------------------------------------------

def _real_ball(p: QPoly, c: list[int], lo: Fraction, hi: Fraction, bits: int) -> tuple[ComplexBall, Fraction, Fraction]:
    """Shrink an isolating interval (lo, hi] to half-width <= 2^-bits."""
    if lo == hi:
        return ComplexBall(lo, Fraction(0), Fraction(0), bits, True), lo, hi
    target = Fraction(1, 1 << bits)
    # Newton guess first, validated by an exact sign change
    with mpmath.workprec(bits + 40):
        x0 = _newton_polish(p, (_mpf(lo) + _mpf(hi)) / 2, bits + 20)
        if isinstance(x0, mpmath.mpc):
            x0 = x0.real
    if lo < to_fraction(x0) <= hi:
        m = _dyadic(x0, bits + 8)
        if p(m) == 0:
            return ComplexBall(m, Fraction(0), Fraction(0), bits, True), m, m
        a, b = m - target, m + target
        if lo <= a and b <= hi:
            sa, sb = _sign_at(c, a), _sign_at(c, b)
            if sa * sb < 0:
                return ComplexBall(m, Fraction(0), target, bits, True), a, b
    # bisection fallback; the root lies in (lo, hi] and p(hi) != 0
    s_hi = _sign_at(c, hi)
    while (hi - lo) / 2 > target:
        mid = (lo + hi) / 2
        sm = _sign_at(c, mid)
        if sm == 0:
            return ComplexBall(mid, Fraction(0), Fraction(0), bits, True), mid, mid
        if sm == s_hi:
            hi = mid
        else:
            lo = mid
    return ComplexBall((lo + hi) / 2, Fraction(0), (hi - lo) / 2, bits, True), lo, hi


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------

def _certify_upper(p: QPoly, c: list[int], approx: list, bits: int) -> list[ComplexBall] | None:
    balls = []
    for z in approx:
        re = _dyadic(z.real, bits + 8)
        im = _dyadic(z.imag, bits + 8)
        r = _inclusion_radius(c, re, im, bits + 8)
        if r is None or not (0 <= r < im):
            return None
        balls.append(ComplexBall(re, im, r, bits))
    for i in range(len(balls)):
        for j in range(i + 1, len(balls)):
            a, b = balls[i], balls[j]
            dist2 = (a.re - b.re) ** 2 + (a.im - b.im) ** 2
            if dist2 <= (a.radius + b.radius) ** 2:
                return None
    return balls


def _order_pairs(balls: list[ComplexBall]) -> list[ComplexBall] | None:
    """Sort upper-half balls; None if the order is not yet decidable."""
    def key(b):
        return (b.re, b.im)

    balls = sorted(balls, key=key)
    for a, b in zip(balls, balls[1:]):
        if abs(a.re - b.re) <= a.radius + b.radius:
            # real parts not separated: need the imaginary parts to be
            if abs(a.im - b.im) <= a.radius + b.radius:
                return None
    return balls


def _approx_upper(p: QPoly, n_pairs: int, bits: int) -> list:
    with mpmath.workprec(bits + 40):
        coeffs = [mpmath.mpf(a.numerator) / a.denominator for a in p.coeffs]
        z = _aberth(coeffs, _initial_guesses(p), bits + 20)
        z = sorted(z, key=lambda w: -abs(w.imag))[: 2 * n_pairs]
        upper = [w if w.imag > 0 else mpmath.conj(w) for w in z]
        # conjugate approximations collapse onto one another; keep one of each
        upper.sort(key=lambda w: (float(w.real), float(w.imag)))
        picked: list = []
        for w in upper:
            if all(abs(w - u) > mpmath.mpf(2) ** (-(bits // 2)) * max(1, abs(w)) for u in picked):
                picked.append(w)
        picked = [_newton_polish(p, w, bits + 20) for w in picked]
    return picked


def isolate_roots(p: QPoly, precision_bits: int = DEFAULT_PRECISION,
                  max_precision: int = MAX_PRECISION) -> RootSystem:
    """Certified, ordered roots of a squarefree rational polynomial."""
    if p.degree < 1:
        raise ValueError("degree must be >= 1")
    if not is_squarefree(p):
        raise ValueError("roots must be simple")
    c = _int_coeffs(p)
    d = p.degree
    intervals = isolate_real_roots(p)
    n_real = len(intervals)
    n_pairs = (d - n_real) // 2
    bits = precision_bits
    while True:
        reals = [_real_ball(p, c, lo, hi, bits)[0] for lo, hi in intervals]
        pairs: list[ComplexBall] = []
        ok = True
        if n_pairs:
            approx = _approx_upper(p, n_pairs, bits)
            upper = None
            if len(approx) == n_pairs:
                upper = _certify_upper(p, c, approx, bits)
            if upper is not None:
                upper = _order_pairs(upper)
            if upper is None:
                ok = False
            else:
                for b in upper:
                    pairs.extend([b, b.conjugate()])
        if ok:
            roots = tuple(reals + pairs)
            return RootSystem(p, roots, canonical_involution(n_real, n_pairs),
                              n_real, n_pairs, bits)
        bits *= 2
        if bits > max_precision:
            raise CertificationError("root certification failed below %d bits" % max_precision)


def refine(rs: RootSystem, precision_bits: int) -> RootSystem:
    """Same order and involution, tighter balls nested in the old ones."""
    if precision_bits <= rs.precision_bits:
        return rs
    p = rs.poly
    c = _int_coeffs(p)
    bits = precision_bits
    new: list[ComplexBall] = []
    for b in rs.roots[: rs.n_real]:
        if b.radius == 0:
            new.append(ComplexBall(b.re, b.im, b.radius, bits, True))
            continue
        nb, _, _ = _real_ball(p, c, b.re - b.radius, b.re + b.radius, bits)
        new.append(nb)
    for t in range(rs.n_pairs):
        old = rs.roots[rs.n_real + 2 * t]
        cur = bits
        while True:
            with mpmath.workprec(cur + 40):
                z = _newton_polish(p, mpmath.mpc(_mpf(old.re), _mpf(old.im)), cur + 20)
            re, im = _dyadic(z.real, cur + 8), _dyadic(z.imag, cur + 8)
            r = _inclusion_radius(c, re, im, cur + 8)
            nb = ComplexBall(re, im, r if r is not None else old.radius, bits)
            if r is not None and old.contains_ball(nb):
                break
            cur *= 2
            if cur > MAX_PRECISION:
                raise CertificationError("refinement failed to nest inside previous ball")
        new.extend([nb, nb.conjugate()])
    return RootSystem(p, tuple(new), rs.conj_involution, rs.n_real, rs.n_pairs, bits)
