from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from wdeg.exactnum import (QPoly, affine_rank, bareiss_rank, is_squarefree, isolate_real_roots,
                           poly_gcd, rational_reconstruct, real_root_count, simplest_rational,
                           squarefree_part, to_fraction)
from wdeg.rootcert import isolate_roots

Z = QPoly([0, 1])


def P(*c):
    return QPoly(c)


# -- gcd ---------------------------------------------------------------------

def test_gcd_shared_linear_factor():
    assert poly_gcd(Z ** 2 - 1, Z - 1) == Z - 1


def test_gcd_cube_minus_one_with_derivative():
    assert poly_gcd(Z ** 3 - 1, 3 * Z ** 2) == QPoly([1])


def test_gcd_repeated_root():
    assert poly_gcd((Z - 1) ** 2, Z - 1) == Z - 1


def test_gcd_of_zeros_rejected():
    with pytest.raises(ValueError, match="gcd of zero polynomials"):
        poly_gcd(QPoly(), QPoly())


small_polys = st.lists(st.integers(-6, 6), min_size=1, max_size=6).map(QPoly).filter(lambda p: not p.is_zero())


@given(small_polys, small_polys)
def test_gcd_divides_both(a, b):
    g = poly_gcd(a, b)
    assert (a % g).is_zero() and (b % g).is_zero()
    assert g.lc == 1


# -- squarefree / real roots --------------------------------------------------

def test_squarefree_examples():
    assert is_squarefree(P(-7, -3, 1, 2))
    assert not is_squarefree((Z - 1) ** 2)
    assert is_squarefree(Z ** 3 - 1)


def test_squarefree_needs_positive_degree():
    with pytest.raises(ValueError, match="degree must be"):
        is_squarefree(QPoly([3]))


def test_real_root_counts(frozen):
    assert real_root_count(P(-7, -3, 1, 2)) == 1
    assert real_root_count(P(3, 4, -5, 1)) == 3 == frozen["sturm_z3_5z2_4z_3"]
    assert real_root_count(Z ** 2 + 1) == 0


def test_real_root_count_rejects_repeated_roots():
    with pytest.raises(ValueError):
        real_root_count((Z - 2) ** 2 * (Z + 1))


def test_squarefree_part():
    assert squarefree_part((Z - 1) ** 3 * (Z + 2)).monic() == ((Z - 1) * (Z + 2))


@given(st.lists(st.integers(-9, 9), min_size=2, max_size=9))
def test_real_count_plus_pairs_is_degree(c):
    p = QPoly(c)
    if p.degree < 1 or not is_squarefree(p):
        return
    rs = isolate_roots(p)
    assert real_root_count(p) + 2 * rs.n_pairs == p.degree
    assert rs.n_real == real_root_count(p)


@given(st.lists(st.integers(-20, 20), min_size=1, max_size=6, unique=True))
def test_isolated_intervals_contain_planted_roots(roots):
    p = QPoly.from_roots(roots)
    iv = isolate_real_roots(p)
    assert len(iv) == len(roots)
    for (lo, hi), r in zip(iv, sorted(roots)):
        assert lo <= r <= hi


# -- affine rank ---------------------------------------------------------------

def test_affine_rank_square():
    h = Fraction(1, 2)
    square = [
        [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        [[1, 0, 0], [0, 0, 1], [0, 1, 0]],
        [[0, h, h], [h, h, 0], [h, 0, h]],
        [[0, h, h], [h, 0, h], [h, h, 0]],
    ]
    assert affine_rank(square) == 2


def test_affine_rank_single_point():
    assert affine_rank([[[1, 2], [3, 4]]]) == 0


def test_affine_rank_errors():
    with pytest.raises(ValueError):
        affine_rank([])
    with pytest.raises(ValueError):
        affine_rank([[1, 2], [1, 2, 3]])


def _naive_rank(rows):
    m = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][c] != 0:
                f = m[r][c] / m[rank][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


@given(st.integers(1, 5).flatmap(lambda n: st.lists(
    st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=4), min_size=n, max_size=n),
    min_size=1, max_size=6)))
def test_affine_rank_matches_naive_elimination(pts):
    diffs = [[a - b for a, b in zip(p, pts[0])] for p in pts[1:]]
    expect = _naive_rank(diffs) if diffs else 0
    assert affine_rank(pts) == expect


def test_bareiss_rank_small():
    assert bareiss_rank([[1, 2], [2, 4]]) == 1
    assert bareiss_rank([[0, 0], [0, 0]]) == 0
    assert bareiss_rank([[1, 0], [0, 1], [1, 1]]) == 2


# -- rational reconstruction ---------------------------------------------------

def test_reconstruct_coefficient():
    assert rational_reconstruct(Fraction("-1.38889"), Fraction("-1.38888"), 100) == Fraction(-25, 18)


def test_reconstruct_half():
    assert rational_reconstruct(Fraction("0.4999"), Fraction("0.5001")) == Fraction(1, 2)


def test_reconstruct_ambiguous_pi_interval(frozen):
    lo, hi = Fraction("3.14159265358"), Fraction("3.14159265359")
    # the oracle enumerates every denominator up to 10^6
    assert len(frozen["pi_interval_rationals"]) == 4
    assert rational_reconstruct(lo, hi, 10 ** 6) is None
    # without a bound the least-denominator candidate comes back
    best = rational_reconstruct(lo, hi)
    assert str(best) == min(frozen["pi_interval_rationals"], key=lambda s: int(s.split("/")[1]))


def test_reconstruct_rejects_reversed():
    with pytest.raises(ValueError):
        rational_reconstruct(Fraction(1), Fraction(0))


@given(st.integers(-10 ** 6, 10 ** 6), st.integers(1, 10 ** 6), st.floats(0.01, 0.99))
def test_reconstruct_planted(u, v, where):
    r = Fraction(u, v)
    # two distinct fractions with denominators <= H differ by >= 1/H^2
    w = Fraction(1, 2 * 10 ** 12)
    off = Fraction(where).limit_denominator(1000) * w
    assert rational_reconstruct(r - off, r - off + w, 10 ** 6) == r


@given(st.fractions(), st.fractions())
def test_simplest_rational_in_interval(a, b):
    lo, hi = min(a, b), max(a, b)
    r = simplest_rational(lo, hi)
    assert lo <= r <= hi
    # nothing with a smaller denominator fits
    for den in range(1, min(r.denominator, 50)):
        import math
        assert math.ceil(lo * den) > math.floor(hi * den)


def test_to_fraction_kinds():
    import mpmath
    assert to_fraction("−3/4") == Fraction(-3, 4)
    assert to_fraction(0.5) == Fraction(1, 2)
    assert to_fraction(mpmath.mpf(-0.5)) == Fraction(-1, 2)


def test_poly_json_roundtrip():
    p = P(Fraction(-7, 3), 0, 5)
    assert QPoly.from_json(p.to_json()) == p


def test_isolation_when_a_bisection_point_is_a_root():
    # 20 is both a root and the left end of a bisection interval holding 23
    p = QPoly.from_roots([11, 20, 23]) * QPoly([1, -1, 1])
    iv = isolate_real_roots(p)
    assert [lo <= r <= hi for (lo, hi), r in zip(iv, [11, 20, 23])] == [True] * 3
    assert len({lo for lo, _ in iv}) == 3


@given(st.lists(st.integers(-40, 40), min_size=1, max_size=7, unique=True))
def test_isolating_intervals_are_disjoint(roots):
    p = QPoly.from_roots(roots)
    iv = isolate_real_roots(p)
    for (a, b), (c, d) in zip(iv, iv[1:]):
        assert b <= c
    for r in roots:
        owners = [(a, b) for a, b in iv if (a < r <= b) or a == b == r]
        assert len(owners) == 1
    assert all(a == b or p(a) != 0 for a, b in iv)
