import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wdeg.exactnum import QPoly, is_squarefree
from wdeg.invbirkhoff import IotaAction, Involution, enumerate_vertices
from wdeg.rootcert import isolate_roots
from wdeg.transport import (brute_force_assignment, cost_matrix, minimize_over_vertices,
                            solve_pair, vertex_cost)

Z = QPoly([0, 1])


def _encloses(iv, x):
    return iv[0] <= x <= iv[1]


def _random_pair(rng, d):
    while True:
        p = QPoly([rng.randint(-9, 9) for _ in range(d)] + [rng.randint(1, 4)])
        q = QPoly([rng.randint(-9, 9) for _ in range(d)] + [rng.randint(1, 4)])
        if is_squarefree(p) and is_squarefree(q):
            return p, q


def test_cost_entries_exact_values():
    cm = cost_matrix(isolate_roots(Z ** 2 - 1), isolate_roots(Z ** 2 - Fraction(1, 4)))
    # p roots -1, 1; q roots -1/2, 1/2
    want = [[Fraction(1, 4), Fraction(9, 4)], [Fraction(9, 4), Fraction(1, 4)]]
    for i in range(2):
        for j in range(2):
            assert _encloses(cm.bounds(i, j), want[i][j])


def test_cost_matrix_size_mismatch():
    with pytest.raises(ValueError):
        cost_matrix(isolate_roots(Z ** 2 - 1), isolate_roots(Z - 1))


def test_identical_polynomials_cost_zero():
    p = QPoly([-7, -3, 1, 2])
    pr, qr, iota, vs, sol = solve_pair(p, p)
    assert _encloses(sol.value, 0) and sol.unique
    assert sol.optimal_vertex.doubled == ((2, 0, 0), (0, 2, 0), (0, 0, 2))
    cm = cost_matrix(pr, qr)
    assert all(_encloses(cm.bounds(i, i), 0) for i in range(3))


def test_mixed_cubic_pair_value():
    pr, qr, iota, vs, sol = solve_pair(QPoly([-7, -3, 1, 2]), QPoly([4, -5, -1, 3]))
    assert abs(float(sol.midpoint) - 2.02001392) < 1e-8
    # optimum sits on the T3 (six-cycle) side of the square
    assert sol.optimal_vertex.graph.census.c3 == ((1, 1),)
    perm, val = brute_force_assignment(cost_matrix(pr, qr))
    assert max(val[0], sol.value[0]) <= min(val[1], sol.value[1])


def test_brute_force_d1():
    cm = cost_matrix(isolate_roots(Z - 3), isolate_roots(Z + Fraction(1, 2)))
    perm, val = brute_force_assignment(cm)
    assert perm == (0,) and _encloses(val, Fraction(49, 4))


def test_brute_force_limit():
    p = QPoly.from_roots(range(9))
    cm = cost_matrix(isolate_roots(p), isolate_roots(p))
    with pytest.raises(ValueError):
        brute_force_assignment(cm)


def test_nongeneric_example_value(frozen):
    lo, hi = (Fraction(x) for x in frozen["nongeneric_cubic_root"])
    assert frozen["nongeneric_cubic_roots_below_4"] == 0
    pr, qr, iota, vs, sol = solve_pair(Z ** 3 - 1, QPoly([3, 4, -5, 1]))
    perm, val = brute_force_assignment(cost_matrix(pr, qr))
    for enc in (val, sol.value):
        assert enc[0] <= hi and lo <= enc[1]


def test_unequal_degrees():
    with pytest.raises(ValueError, match="equal degree"):
        solve_pair(Z ** 2 - 2, Z - 1)


def test_empty_vertex_list():
    cm = cost_matrix(isolate_roots(Z - 1), isolate_roots(Z - 2))
    with pytest.raises(ValueError):
        minimize_over_vertices(cm, [])


def test_exact_tie_is_declared_and_lexicographic():
    # |a - i|^2 = a^2 + 1 for real a, so every vertex costs (2 + 2)/3
    pr, qr = isolate_roots(Z ** 3 - Z), isolate_roots(Z ** 3 + Z)
    iota = IotaAction(Involution(pr.conj_involution), Involution(qr.conj_involution))
    vs = enumerate_vertices(iota)
    assert len(vs) == 3
    sol = minimize_over_vertices(cost_matrix(pr, qr), vs, max_precision=256)
    assert not sol.unique and sol.runner_up_gap == 0
    assert sol.optimal_vertex == min(vs, key=lambda v: v.key())
    assert _encloses(sol.value, Fraction(4, 3))


def test_cost_conjugation_invariance():
    rng = random.Random(3)
    for _ in range(30):
        d = rng.randint(2, 5)
        p, q = _random_pair(rng, d)
        pr, qr = isolate_roots(p), isolate_roots(q)
        iota = IotaAction(Involution(pr.conj_involution), Involution(qr.conj_involution))
        cm = cost_matrix(pr, qr)
        s, t = np.random.default_rng(rng.randint(0, 10 ** 6)).permutation(d), np.arange(d)
        D = np.zeros((d, d), dtype=int)
        D[np.arange(d), s] += 1
        D[np.arange(d), t] += 1
        a = vertex_cost(cm, D.tolist())
        b = vertex_cost(cm, iota.apply(D).tolist())
        assert max(a[0], b[0]) <= min(a[1], b[1])


def test_refinement_is_monotone():
    rng = random.Random(5)
    for _ in range(10):
        p, q = _random_pair(rng, rng.randint(2, 4))
        cm = cost_matrix(isolate_roots(p, 64), isolate_roots(q, 64))
        prev = cm
        for bits in (128, 256, 512):
            nxt = prev.refined(bits)
            for i in range(cm.d):
                for j in range(cm.d):
                    a, b = prev.bounds(i, j), nxt.bounds(i, j)
                    assert b[1] - b[0] <= a[1] - a[0]
                    assert max(a[0], b[0]) <= min(a[1], b[1])
            prev = nxt


@settings(max_examples=40)
@given(st.integers(1, 4), st.integers(0, 10 ** 6))
def test_vertex_optimum_equals_permutation_optimum(d, seed):
    p, q = _random_pair(random.Random(seed), d)
    pr, qr, iota, vs, sol = solve_pair(p, q)
    perm, val = brute_force_assignment(cost_matrix(pr, qr))
    assert max(val[0], sol.value[0]) <= min(val[1], sol.value[1])
