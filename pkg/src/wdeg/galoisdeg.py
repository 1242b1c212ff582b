"""Algebraic degree of the optimal cost.

For a vertex M (doubled D) the cost form is

    f_M = 1/(2d) * sum_ij D_ij (x_i - y_j)(x_phi(i) - y_psi(j)).

Its orbit under Sym(d) x Sym(d) has (d!)^2 / |Aut| elements; specialising
prod (t - g.f_M) at the roots gives a rational polynomial h with the optimal
cost as a root.  The minimal polynomial is then cut out of h.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from mpmath import iv

from . import accel
from .exactnum import QPoly, frac_str, rational_reconstruct, squarefree_part, to_fraction
from .invbirkhoff import Involution, InvariantVertex
from .rootcert import (CertificationError, RootSystem, isolate_roots, iv_bounds, ivprec,
                       refine)

__all__ = [
    "CostForm", "MinPolyReport", "OrbitError", "ReconstructionError", "PrecisionBudgetError",
    "orbit_fingerprints", "orbit_representatives", "orbit_values", "specialize_hM",
    "compute_hM", "denominator_certificate", "distinct_degree_sumset", "irreducibility_sumset",
    "minimal_factor", "wdeg_bound", "min_poly_report", "ORBIT_LIMIT",
]

ORBIT_LIMIT = 6
STATUSES = ("certified-irreducible", "factor-extracted", "bound-only")


class OrbitError(RuntimeError):
    """Fingerprint multiplicities disagree with the automorphism count."""


class PrecisionBudgetError(RuntimeError):
    """The precision cap was reached before a result could be certified."""


class ReconstructionError(ValueError):
    pass


@dataclass(frozen=True)
class CostForm:
    doubled: tuple[tuple[int, ...], ...]
    phi: Involution
    psi: Involution

    @classmethod
    def from_vertex(cls, vertex: InvariantVertex, iota) -> "CostForm":
        return cls(vertex.doubled, iota.phi, iota.psi)

    @property
    def d(self) -> int:
        return len(self.doubled)

    def tables(self):
        """Integer coefficient tables (x-x, y-y, x-y) of 2d * f_M.

        The x-x and y-y tables are symmetrised, so each is a canonical
        representation of its quadratic part.
        """
        d = self.d
        Sx = np.zeros((d, d), dtype=np.int64)
        Sy = np.zeros((d, d), dtype=np.int64)
        C = np.zeros((d, d), dtype=np.int64)
        for i in range(d):
            for j in range(d):
                w = self.doubled[i][j]
                if not w:
                    continue
                Sx[i, self.phi[i]] += w
                Sy[j, self.psi[j]] += w
                C[i, self.psi[j]] -= w
                C[self.phi[i], j] -= w
        return Sx + Sx.T, Sy + Sy.T, C

    def evaluate(self, alpha, beta):
        """f_M at the given (interval or float) roots."""
        d = self.d
        acc = 0
        for i in range(d):
            for j in range(d):
                w = self.doubled[i][j]
                if w:
                    acc += w * (alpha[i] - beta[j]) * (alpha[self.phi[i]] - beta[self.psi[j]])
        return acc / (2 * d)


@dataclass
class MinPolyReport:
    h_specialized: QPoly
    minimal_factor: QPoly
    wdeg: int
    status: str
    wdeg_bound: int
    precision_bits: int = 0
    denominator_bound: int = 0
    primes: list = field(default_factory=list)
    surviving_degrees: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "h_specialized": self.h_specialized.to_json(),
            "h_degree": self.h_specialized.degree,
            "minimal_factor": {"monic": self.minimal_factor.to_json(),
                               "primitive": [str(c) for c in self.minimal_factor.primitive()]},
            "wdeg": self.wdeg, "status": self.status, "wdeg_bound": self.wdeg_bound,
            "precision_bits": self.precision_bits,
            "denominator_bound": str(self.denominator_bound),
            "primes": self.primes, "surviving_degrees": self.surviving_degrees,
        }


# ---------------------------------------------------------------------------
# orbit

def orbit_fingerprints(form: CostForm):
    """Distinct fingerprints: (first row index, multiplicity) in first-seen order."""
    d = form.d
    if d > ORBIT_LIMIT:
        raise ValueError("orbit sweep over (d!)^2 group elements is limited to d <= %d" % ORBIT_LIMIT)
    perms = accel.permutations(d)
    inv = accel.inverse_perms(perms)
    Sx, Sy, C = form.tables()
    rows = np.ascontiguousarray(accel.fingerprints(inv, inv, Sx, Sy, C))
    # rows as opaque byte strings: far faster to sort than np.unique(axis=0)
    keys = rows.view(np.dtype((np.void, rows.shape[1] * rows.itemsize))).ravel()
    _, first, counts = np.unique(keys, return_index=True, return_counts=True)
    order = np.argsort(first)
    return first[order], counts[order]


def orbit_representatives(form: CostForm, aut: int | None = None) -> list[tuple[np.ndarray, np.ndarray]]:
    """One (g1, g2) per coset of the stabiliser, checked against ``aut``."""
    d = form.d
    first, counts = orbit_fingerprints(form)
    n = math.factorial(d)
    if aut is not None:
        if np.any(counts != aut):
            raise OrbitError("fingerprint multiplicities %s differ from |Aut| = %d"
                             % (sorted(set(counts.tolist())), aut))
        if len(first) * aut != n * n:
            raise OrbitError("orbit size %d times |Aut| %d != (d!)^2" % (len(first), aut))
    perms = accel.permutations(d)
    return [(perms[k // n], perms[k % n]) for k in first.tolist()]


def orbit_values(form: CostForm, pr: RootSystem, qr: RootSystem, precision_bits: int | None = None,
                 reps=None) -> list:
    """Interval values of g.f_M at the roots, one per coset."""
    if reps is None:
        reps = orbit_representatives(form)
    prec = (precision_bits or min(pr.precision_bits, qr.precision_bits)) + 32
    with ivprec(prec):
        alpha = pr.iv_roots(prec)
        beta = qr.iv_roots(prec)
        out = []
        for g1, g2 in reps:
            a = [alpha[k] for k in g1]
            b = [beta[k] for k in g2]
            out.append(form.evaluate(a, b))
    return out


# ---------------------------------------------------------------------------
# product expansion

def _mul(a: list, b: list) -> list:
    out = [iv.mpc(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def _expand(values: list) -> list:
    """Coefficients (low -> high) of prod (t - v) by a balanced product tree."""
    polys = [[-v, iv.mpc(1)] for v in values]
    if not polys:
        return [iv.mpc(1)]
    while len(polys) > 1:
        nxt = [_mul(polys[k], polys[k + 1]) for k in range(0, len(polys) - 1, 2)]
        if len(polys) % 2:
            nxt.append(polys[-1])
        polys = nxt
    return polys[0]


def denominator_certificate(p: QPoly, q: QPoly, n: int) -> list[int]:
    """N_k with N_k * [t^(n-k)] h an integer, k = 0..n.

    [t^(n-k)] h is (2d)^-k times an integer symmetric form of degree <= 2k in
    each root; rewritten in elementary symmetric functions its denominator
    divides lc(p)^(2k) lc(q)^(2k) for the primitive integer forms.
    """
    d = p.degree
    lp = abs(p.primitive()[-1])
    lq = abs(q.primitive()[-1])
    return [(2 * d) ** k * lp ** (2 * k) * lq ** (2 * k) for k in range(n + 1)]


def _lattice_value(lo: Fraction, hi: Fraction, N: int) -> Fraction | None:
    """The unique multiple of 1/N in [lo, hi], if there is exactly one."""
    a = math.ceil(lo * N)
    b = math.floor(hi * N)
    return Fraction(a, N) if a == b else None


def specialize_hM(values: list, denominator_bound: int | None = None,
                  certificate: list[int] | None = None) -> QPoly:
    """Monic rational polynomial prod (t - v), certified coefficient-wise.

    Must be called under the working precision the values were made at.
    Each coefficient is reconstructed as the only rational of denominator
    <= ``denominator_bound`` in its enclosure; with a ``certificate`` it must
    also be the only multiple of 1/N_k there.
    """
    n = len(values)
    if denominator_bound is None:
        denominator_bound = 1 << max(1, iv.prec // 3)
    coeffs = _expand(values)
    out = [Fraction(0)] * (n + 1)
    out[n] = Fraction(1)
    for e in range(n):
        c = coeffs[e]
        ilo, ihi = iv_bounds(c.imag)
        if ilo > 0 or ihi < 0:
            raise OrbitError("coefficient of t^%d has imaginary part bounded away from 0" % e)
        lo, hi = iv_bounds(c.real)
        r = rational_reconstruct(lo, hi, denominator_bound)
        if r is None:
            raise ReconstructionError("coefficient of t^%d not pinned down (width %.3g)"
                                      % (e, float(hi - lo)))
        if certificate is not None:
            s = _lattice_value(lo, hi, certificate[n - e])
            if s != r:
                raise ReconstructionError("coefficient of t^%d fails the denominator check" % e)
        out[e] = r
    return QPoly(out)


def compute_hM(form: CostForm, pr: RootSystem, qr: RootSystem, max_precision: int = 4096,
               denominator_bound: int | None = None, aut: int | None = None):
    """h specialised at the roots, escalating precision until certified.

    Returns (h, values, precision_bits, denominator_bound, pr, qr) where the
    root systems are the refined ones actually used.
    """
    reps = orbit_representatives(form, aut)
    certificate = denominator_certificate(pr.poly, qr.poly, len(reps))
    bits = min(pr.precision_bits, qr.precision_bits)
    while True:
        H = denominator_bound or (1 << max(1, bits // 3))
        values = orbit_values(form, pr, qr, bits, reps)
        with ivprec(bits + 32):
            try:
                h = specialize_hM(values, H, certificate)
                return h, values, bits, H, pr, qr
            except ReconstructionError:
                pass
        if bits * 2 > max_precision:
            raise PrecisionBudgetError(
                "orbit product not certified at %d bits; raise --max-precision" % bits)
        bits *= 2
        pr, qr = refine(pr, bits), refine(qr, bits)


# ---------------------------------------------------------------------------
# arithmetic over GF(p)

def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for f in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % f == 0:
            return n == f
    # deterministic Miller-Rabin for n < 3.3e24
    dd, s = n - 1, 0
    while dd % 2 == 0:
        dd //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, dd, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], b: list[int], p: int) -> list[int]:
    a = _trim([x % p for x in a])
    inv = pow(b[-1], -1, p)
    db = len(b) - 1
    while len(a) - 1 >= db and a:
        c = a[-1] * inv % p
        shift = len(a) - 1 - db
        for k in range(db + 1):
            a[shift + k] = (a[shift + k] - c * b[k]) % p
        _trim(a)
    return a


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim([x % p for x in a]), _trim([x % p for x in b])
    while b:
        a, b = b, _pmod(a, b, p)
    if not a:
        return a
    inv = pow(a[-1], -1, p)
    return [x * inv % p for x in a]


def _pdiv(a: list[int], b: list[int], p: int) -> list[int]:
    a = _trim([x % p for x in a])
    inv = pow(b[-1], -1, p)
    db = len(b) - 1
    q = [0] * max(1, len(a) - db)
    while len(a) - 1 >= db and a:
        c = a[-1] * inv % p
        shift = len(a) - 1 - db
        q[shift] = c
        for k in range(db + 1):
            a[shift + k] = (a[shift + k] - c * b[k]) % p
        _trim(a)
    return _trim(q)


def _powmod_x(h: np.ndarray, e: int, f: np.ndarray, p: int) -> np.ndarray:
    n = f.shape[0] - 1
    result = np.zeros(n, dtype=np.int64)
    result[0] = 1
    base = h
    while e:
        if e & 1:
            result = accel.polmulmod(result, base, f, p)
        e >>= 1
        if e:
            base = accel.polmulmod(base, base, f, p)
    return result


def distinct_degree_sumset(coeffs: list[int], p: int) -> set[int] | None:
    """Degrees reachable as sums of irreducible factor degrees mod p.

    ``coeffs`` are integers low -> high.  Returns None when p divides the
    leading coefficient or f is not squarefree mod p.
    """
    lc = coeffs[-1] % p
    if lc == 0:
        return None
    inv = pow(lc, -1, p)
    f = [c * inv % p for c in coeffs]
    n = len(f) - 1
    df = [(k * f[k]) % p for k in range(1, n + 1)]
    if len(_pgcd(f, df, p)) != 1:
        return None
    farr = np.array(f, dtype=np.int64)
    x = np.zeros(n, dtype=np.int64)
    if n == 1:
        return {0, 1}
    x[1] = 1
    h = x.copy()
    rest = list(f)
    degrees = []
    i = 1
    while len(rest) - 1 >= 2 * i:
        h = _powmod_x(h, p, farr, p)
        diff = h.tolist()
        diff[1] = (diff[1] - 1) % p
        g = _pgcd(rest, diff, p)
        if len(g) > 1:
            degrees += [i] * ((len(g) - 1) // i)
            rest = _pdiv(rest, g, p)
        i += 1
    if len(rest) > 1:
        degrees.append(len(rest) - 1)
    sums = {0}
    for dg in degrees:
        sums |= {s + dg for s in sums}
    return sums


def irreducibility_sumset(coeffs: list[int], n_primes: int = 8, seed: int = 0):
    """Intersect factor-degree sumsets over random primes in [2^16, 2^17]."""
    rng = random.Random(seed)
    n = len(coeffs) - 1
    alive = set(range(n + 1))
    used = []
    tries = 0
    while len(used) < n_primes and tries < 50 * n_primes:
        tries += 1
        p = rng.randrange(1 << 16, 1 << 17) | 1
        while not _is_prime(p):
            p += 2
        if p in used:
            continue
        s = distinct_degree_sumset(coeffs, p)
        if s is None:
            continue
        used.append(p)
        alive &= s
    return alive, used


# ---------------------------------------------------------------------------
# minimal factor

def _int_form(f: QPoly) -> list[int]:
    return [int(c) for c in f.primitive()]


def _subsets(rs: RootSystem, size: int):
    reals = list(range(rs.n_real))
    pairs = [(rs.n_real + 2 * t, rs.n_real + 2 * t + 1) for t in range(rs.n_pairs)]
    for c in range(min(size // 2, len(pairs)) + 1):
        r = size - 2 * c
        if r > len(reals):
            continue
        for rc in itertools.combinations(reals, r):
            for pc in itertools.combinations(pairs, c):
                yield rc + tuple(x for pr_ in pc for x in pr_)


def _subset_upper(n: int, size: int) -> int:
    return math.comb(n, size)


def _subset_count(rs: RootSystem, size: int) -> int:
    return sum(math.comb(rs.n_real, size - 2 * c) * math.comb(rs.n_pairs, c)
               for c in range(size // 2 + 1) if size - 2 * c <= rs.n_real)


_FIX = 96  # fixed-point bits for the trace filter


def _trace_table(rs: RootSystem):
    lo, hi = [], []
    scale = 1 << _FIX
    for b in rs.roots:
        lo.append(math.floor((b.re - b.radius) * scale))
        hi.append(math.ceil((b.re + b.radius) * scale))
    return lo, hi


def _try_subset(f: QPoly, L: int, rs: RootSystem, subset, tables) -> QPoly | None:
    """Monic factor with exactly these roots, or None (rigorous rejection)."""
    lo_t, hi_t = tables
    slo = sum(lo_t[k] for k in subset) * L
    shi = sum(hi_t[k] for k in subset) * L
    scale = 1 << _FIX
    if -(-slo // scale) > shi // scale:
        return None
    prec = rs.precision_bits + 32
    with ivprec(prec):
        roots = rs.iv_roots(prec)
        coeffs = _expand([roots[k] for k in subset])
        cand = []
        for c in coeffs:
            lo, hi = iv_bounds(c.real)
            a, b = math.ceil(lo * L), math.floor(hi * L)
            if a > b:
                return None
            if a != b:
                # enclosure too wide to decide: use the nearest integer and
                # let exact division arbitrate
                a = round((lo + hi) / 2 * L)
            cand.append(Fraction(a, L))
    g = QPoly(cand)
    if g.degree < 1 or not (f % g).is_zero():
        return None
    return g


def _root_index(rs: RootSystem, w2) -> int:
    lo, hi = w2
    hits = [k for k in range(rs.n_real)
            if rs.roots[k].re - rs.roots[k].radius <= hi and lo <= rs.roots[k].re + rs.roots[k].radius]
    if not hits:
        raise ValueError("the cost enclosure contains no root of h")
    if len(hits) > 1:
        return -1
    return hits[0]


def _locate(f: QPoly, w2, precision_bits: int):
    bits = precision_bits
    while True:
        rs = isolate_roots(f, bits)
        k = _root_index(rs, w2)
        if k >= 0:
            return rs, k
        if bits > 4 * precision_bits + 4096:
            raise ValueError("several roots of h lie in the cost enclosure; refine the enclosure")
        bits *= 2


def minimal_factor(h: QPoly, w2, max_factor_degree: int = 6, budget: int = 10 ** 6,
                   n_primes: int = 8, seed: int = 0, precision_bits: int = 128):
    """(factor, status, info) for the factor of h vanishing on ``w2``.

    ``w2`` is a (lo, hi) rational enclosure of the root of interest.  Factor
    degrees are first restricted by distinct-degree factorisation modulo
    random primes.  Each surviving degree up to ``max_factor_degree`` is then
    searched exhaustively over conjugation-closed root subsets: a subset
    passes only if L times its elementary symmetric functions can be
    integers (L the leading coefficient of the primitive form), and every
    pass is confirmed by exact division.  Degrees searched to exhaustion are
    excluded, so an empty search proves irreducibility.
    """
    if h.degree < 1:
        raise ValueError("h must have degree >= 1")
    w2 = (to_fraction(w2[0]), to_fraction(w2[1]))
    f = squarefree_part(h).monic()
    proper = f.degree < h.degree
    info = {"primes": [], "surviving_degrees": []}
    spent = 0
    while True:
        n = f.degree
        if n == 1:
            if not (w2[0] <= -f[0] <= w2[1]):
                raise ValueError("the cost enclosure contains no root of h")
            return f, ("factor-extracted" if proper else "certified-irreducible"), info
        coeffs = _int_form(f)
        alive, primes = irreducibility_sumset(coeffs, n_primes, seed)
        if not info["primes"]:
            info["primes"] = primes
            info["surviving_degrees"] = sorted(alive)
        sizes = [s for s in sorted(alive) if 1 <= s <= n // 2]
        if not sizes:
            # f is irreducible and h vanishes at w2 by construction
            return f, ("factor-extracted" if proper else "certified-irreducible"), info
        if sizes[0] > max_factor_degree or _subset_upper(n, sizes[0]) > 100 * budget:
            # nothing searchable: skip the (expensive) root isolation
            return (f if proper else h.monic()), "bound-only", info
        rs, target = _locate(f, w2, precision_bits)
        L = coeffs[-1]
        tables = _trace_table(rs)
        found = None
        for s in sizes:
            if s > max_factor_degree:
                return h.monic() if not proper else f, "bound-only", info
            cnt = _subset_count(rs, s)
            if spent + cnt > budget:
                return h.monic() if not proper else f, "bound-only", info
            spent += cnt
            for sub in _subsets(rs, s):
                g = _try_subset(f, L, rs, sub, tables)
                if g is not None:
                    found = (g, target in sub)
                    break
            if found:
                break
        if found is None:
            return f, ("factor-extracted" if proper else "certified-irreducible"), info
        g, has_target = found
        proper = True
        if has_target:
            # smallest degree with a factor, all smaller ones excluded: g is irreducible
            return g, "factor-extracted", info
        f = f.exact_div(g).monic()


def wdeg_bound(vertex: InvariantVertex, d: int | None = None) -> int:
    d = vertex.d if d is None else d
    n = math.factorial(d) ** 2
    a = vertex.aut_order
    if n % a:
        raise OrbitError("|Aut| = %d does not divide (d!)^2 = %d" % (a, n))
    return n // a


def min_poly_report(vertex: InvariantVertex, iota, pr: RootSystem, qr: RootSystem, w2,
                    max_precision: int = 4096, denominator_bound: int | None = None,
                    max_factor_degree: int = 6, budget: int = 10 ** 6) -> MinPolyReport:
    form = CostForm.from_vertex(vertex, iota)
    h, values, bits, H, pr, qr = compute_hM(form, pr, qr, max_precision, denominator_bound,
                                            vertex.aut_order)
    bound = wdeg_bound(vertex)
    if h.degree != bound:
        raise OrbitError("deg h = %d but the orbit bound is %d" % (h.degree, bound))
    g, status, info = minimal_factor(h, w2, max_factor_degree, budget, precision_bits=bits)
    return MinPolyReport(h, g, g.degree if status != "bound-only" else bound, status, bound,
                         bits, H, info["primes"], info["surviving_degrees"])
