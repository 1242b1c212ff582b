import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wdeg.exactnum import affine_rank
from wdeg.invbirkhoff import (Census, IotaAction, Involution, NotAVertexError, aut_order,
                              aut_order_brute, classify_graph, dim_formula, enumerate_vertices,
                              iota_image, polytope_json, signatures)

IO11 = IotaAction.from_signatures((1, 1), (1, 1))


def _key(d, p, q):
    return "%d|%d,%d|%d,%d" % (d, p[0], p[1], q[0], q[1])


def _all_cases(dmax=4):
    for d in range(1, dmax + 1):
        for p in signatures(d):
            for q in signatures(d):
                yield d, p, q


# -- involutions -----------------------------------------------------------------

def test_canonical_involution():
    assert Involution.from_signature(2, 2).images == (0, 1, 3, 2, 5, 4)
    assert Involution.from_signature(2, 2).signature == (2, 2)


def test_involution_rejects_non_involution():
    with pytest.raises(ValueError):
        Involution((1, 2, 0))


def test_iota_apply_definition():
    M = np.arange(9).reshape(3, 3)
    out = IO11.apply(M)
    for i in range(3):
        for j in range(3):
            assert out[i, j] == M[IO11.phi[i], IO11.psi[j]]


# -- iota images ----------------------------------------------------------------

def test_iota_image_identity_is_fixed():
    assert iota_image([0, 1, 2], IO11).tolist() == [[2, 0, 0], [0, 2, 0], [0, 0, 2]]


def test_iota_image_swap_gives_midpoint():
    assert iota_image([1, 0, 2], IO11).tolist() == [[0, 1, 1], [1, 1, 0], [1, 0, 1]]


def test_iota_image_rejects_non_permutation():
    with pytest.raises(ValueError):
        iota_image([0, 0, 1], IO11)


# -- cycle classification ----------------------------------------------------

def test_classify_single_type3_cycle():
    g = classify_graph([[0, 1, 1], [1, 1, 0], [1, 0, 1]], IO11)
    assert g.census == Census(c3=((1, 1),))
    assert [c.kind for c in g.cycles] == ["T3"]


def test_classify_fixed_edge_and_conjugate_pair():
    g = classify_graph([[2, 0, 0], [0, 2, 0], [0, 0, 2]], IO11)
    assert (g.census.c1, g.census.c2) == (1, 1)


def test_classify_rejects_invariant_non_vertex():
    # midpoint of the identity and a 3-cycle, with every point real: one
    # 6-cycle carrying three fixed points on each side
    io = IotaAction.from_signatures((3, 0), (3, 0))
    D = np.eye(3, dtype=int) + np.eye(3, dtype=int)[[1, 2, 0]]
    with pytest.raises(NotAVertexError):
        classify_graph(D, io)


def test_classify_rejects_bad_sums_and_non_invariant():
    io = IotaAction.from_signatures((3, 0), (3, 0))
    with pytest.raises(ValueError, match="sums"):
        classify_graph([[1, 0, 0], [0, 2, 0], [0, 0, 2]], io)
    with pytest.raises(ValueError, match="invariant"):
        classify_graph([[2, 0, 0], [0, 0, 2], [0, 2, 0]], IotaAction.from_signatures((1, 1), (3, 0)))


def test_classify_four_cycle_types():
    io = IotaAction.from_signatures((2, 0), (0, 1))
    g = classify_graph([[1, 1], [1, 1]], io)
    assert g.census.c4L == ((1, 1),)
    g2 = classify_graph([[1, 1], [1, 1]], io.transposed())
    assert g2.census.c4R == ((1, 1),)


# -- enumeration ---------------------------------------------------------------

def test_enumerate_square():
    vs = enumerate_vertices(IO11)
    assert len(vs) == 4
    assert affine_rank([v.matrix() for v in vs]) == 2 == dim_formula((1, 1), (1, 1))


def test_enumerate_thirteen():
    vs = enumerate_vertices(IotaAction.from_signatures((2, 1), (2, 1)))
    assert len(vs) == 13
    assert sorted(v.aut_order for v in vs) == [2] * 8 + [4] * 4 + [16]


def test_enumerate_rejects_large_d():
    io = IotaAction.from_signatures((9, 0), (9, 0))
    with pytest.raises(ValueError):
        enumerate_vertices(io)


def test_enumeration_vs_oracle(frozen):
    for d, p, q in _all_cases():
        vs = enumerate_vertices(IotaAction.from_signatures(p, q))
        k = _key(d, p, q)
        assert len(vs) == frozen["vertex_counts"][k], k
        assert sorted(v.aut_order for v in vs) == frozen["stabiliser_orders"][k], k
        sizes = sorted(math.factorial(d) ** 2 // v.aut_order for v in vs)
        assert sizes == frozen["orbit_sizes"][k], k


def test_dimension_equals_affine_rank():
    for d, p, q in _all_cases():
        vs = enumerate_vertices(IotaAction.from_signatures(p, q))
        assert affine_rank([v.matrix() for v in vs]) == dim_formula(p, q)


def test_vertices_satisfy_invariants():
    for d, p, q in _all_cases():
        io = IotaAction.from_signatures(p, q)
        for v in enumerate_vertices(io):
            D = v.array()
            assert (D.sum(0) == 2).all() and (D.sum(1) == 2).all()
            assert np.array_equal(io.apply(D), D)


# -- formulas ----------------------------------------------------------------------

@pytest.mark.parametrize("p,q,dim", [((3, 0), (3, 0), 4), ((1, 1), (1, 1), 2), ((4, 0), (4, 0), 9),
                                     ((2, 1), (2, 1), 5), ((0, 2), (0, 2), 5), ((1, 0), (1, 0), 0)])
def test_dim_formula_values(p, q, dim):
    assert dim_formula(p, q) == dim


def test_dim_formula_rejects_mismatch():
    with pytest.raises(ValueError):
        dim_formula((2, 0), (1, 1, 0))
    with pytest.raises(ValueError):
        dim_formula((3, 0), (0, 1))


def test_aut_order_examples():
    assert aut_order(Census(c1=4)) == 24
    assert aut_order(Census(c2=2)) == 8
    assert aut_order(Census(c3=((1, 2),))) == 8
    assert aut_order(Census(c4L=((1, 1),), c4R=((1, 1),))) == 16
    assert aut_order(Census(c1=1, c2=1)) == 2


def test_aut_order_matches_brute_force():
    for d, p, q in _all_cases():
        io = IotaAction.from_signatures(p, q)
        for v in enumerate_vertices(io):
            assert v.aut_order == aut_order_brute(v, io)


@given(st.sampled_from([(d, p, q) for d, p, q in _all_cases()]))
def test_transpose_symmetry(case):
    d, p, q = case
    a = enumerate_vertices(IotaAction.from_signatures(p, q))
    b = enumerate_vertices(IotaAction.from_signatures(q, p))
    at = sorted(tuple(map(tuple, v.array().T.tolist())) for v in a)
    assert at == sorted(v.doubled for v in b)
    assert sorted(v.aut_order for v in a) == sorted(v.aut_order for v in b)


@given(st.integers(1, 5).flatmap(lambda d: st.tuples(st.just(d), st.permutations(range(d)),
                                                     st.sampled_from(signatures(d)),
                                                     st.sampled_from(signatures(d)))))
def test_every_iota_image_is_a_vertex_or_midpoint(args):
    d, sigma, p, q = args
    io = IotaAction.from_signatures(p, q)
    D = iota_image(sigma, io)
    assert np.array_equal(io.apply(D), D)
    try:
        g = classify_graph(D, io)
    except NotAVertexError:
        return
    assert g.census is not None


def test_polytope_json_shape():
    js = polytope_json(IotaAction.from_signatures((2, 1), (0, 2)))
    assert js["d"] == 4 and js["dim"] == 4 == js["affine_rank"]
    assert js["vertex_count"] == len(js["vertices"]) == 12
    v = js["vertices"][0]
    assert set(v) == {"doubled", "census", "aut_order"}
