"""Plant a vertex as the unique optimum of a polynomial pair.

Each cycle of the vertex graph is drawn on the Eisenstein lattice Z[w],
w = exp(i pi/3), so that every edge has length exactly 1; cycle number k is
shifted by 2dk along the real axis, which keeps distinct cycles far apart.
Since distinct lattice points are at distance >= 1, the planted vertex has
cost 1 and every other transport plan costs more.

Walk order inside a cycle (positions alternate between the two sides, the
first position on the side holding the fixed point(s)):

    type 3, m = 2j+1 rows:  0, w, w+1, ..., w+2j-1, 2j, conj(w+2j-1), ..., conj(w)
    type 4, m = 2j rows:    0, w, w+1, ..., w+2j-2, 2j-1, conj(w+2j-2), ..., conj(w)

Positions s and (length - s) are conjugate, matching the action of the
involution on the cycle.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exactnum import QPoly, frac_str
from .invbirkhoff import (IotaAction, InvariantVertex, _make_vertex, classify_graph)

__all__ = ["EisensteinPoint", "RealizationInstance", "realize_vertex", "eisenstein_expand",
           "sq_dist"]


@dataclass(frozen=True, order=True)
class EisensteinPoint:
    """a + b*w with w = exp(i pi / 3)."""
    a: int
    b: int

    def conjugate(self) -> "EisensteinPoint":
        # conj(w) = 1 - w
        return EisensteinPoint(self.a + self.b, -self.b)

    def __add__(self, other):
        if isinstance(other, int):
            return EisensteinPoint(self.a + other, self.b)
        return EisensteinPoint(self.a + other.a, self.b + other.b)

    @property
    def is_real(self) -> bool:
        return self.b == 0

    @property
    def real(self) -> Fraction:
        return self.a + Fraction(self.b, 2)

    def norm(self) -> int:
        """|a + b w|^2 = a^2 + ab + b^2."""
        return self.a * self.a + self.a * self.b + self.b * self.b

    def __complex__(self):
        return complex(self.a + self.b / 2, self.b * 3 ** 0.5 / 2)

    def to_json(self):
        return [self.a, self.b]


W = EisensteinPoint(0, 1)
WBAR = W.conjugate()


def sq_dist(u: EisensteinPoint, v: EisensteinPoint) -> int:
    return EisensteinPoint(u.a - v.a, u.b - v.b).norm()


def eisenstein_expand(points) -> QPoly:
    """Monic rational polynomial with exactly these roots."""
    pts = list(points)
    reals = [x for x in pts if x.is_real]
    upper = sorted(x for x in pts if x.b > 0)
    lower = sorted(x.conjugate() for x in pts if x.b < 0)
    if upper != lower:
        raise ValueError("point multiset is not closed under conjugation")
    out = QPoly([1])
    for x in reals:
        out = out * QPoly([-x.a, 1])
    for x in upper:
        # (z - x)(z - conj x) = z^2 - (2a + b) z + (a^2 + ab + b^2)
        out = out * QPoly([x.norm(), -(2 * x.a + x.b), 1])
    return out


@dataclass(frozen=True)
class RealizationInstance:
    p: QPoly
    q: QPoly
    planted_vertex: InvariantVertex        # in the labelling of the construction
    root_assignment: dict                  # ("L", i) / ("R", j) -> EisensteinPoint
    iota: IotaAction
    relabelled_vertex: InvariantVertex     # the same vertex in sorted-root order

    def exact_cost(self) -> Fraction:
        """(1/d) sum M_ij |alpha_i - beta_j|^2 of the planted vertex, exactly."""
        d = self.iota.d
        D = self.planted_vertex.doubled
        tot = sum(D[i][j] * sq_dist(self.root_assignment[("L", i)], self.root_assignment[("R", j)])
                  for i in range(d) for j in range(d))
        return Fraction(tot, 2 * d)

    def exact_cost_str(self) -> str:
        return frac_str(self.exact_cost())

    def to_json(self) -> dict:
        return {
            "p": self.p.to_json(),
            "q": self.q.to_json(),
            "planted_doubled": [list(r) for r in self.relabelled_vertex.doubled],
            "construction_doubled": [list(r) for r in self.planted_vertex.doubled],
            "roots": {"p": [self.root_assignment[("L", i)].to_json() for i in range(self.iota.d)],
                      "q": [self.root_assignment[("R", j)].to_json() for j in range(self.iota.d)]},
        }


def _cycle_walk(edges, start_side: str, start: int):
    """Node sequence of a simple cycle given by its edge list."""
    adj: dict = {}
    for i, j in edges:
        adj.setdefault(("L", i), []).append(("R", j))
        adj.setdefault(("R", j), []).append(("L", i))
    seq = [(start_side, start)]
    prev = None
    cur = seq[0]
    while True:
        nbrs = adj[cur]
        nxt = nbrs[0] if nbrs[0] != prev else nbrs[1]
        if nxt == seq[0]:
            break
        seq.append(nxt)
        prev, cur = cur, nxt
    return seq


def _path_values(m: int, kind: str) -> list[EisensteinPoint]:
    if kind == "T3":
        j = (m - 1) // 2
        mid = [W + s for s in range(2 * j)]
        top = EisensteinPoint(2 * j, 0)
    else:
        j = m // 2
        mid = [W + s for s in range(2 * j - 1)]
        top = EisensteinPoint(2 * j - 1, 0)
    return [EisensteinPoint(0, 0)] + mid + [top] + [x.conjugate() for x in reversed(mid)]


def realize_vertex(vertex: InvariantVertex, iota: IotaAction) -> RealizationInstance:
    d = iota.d
    D = vertex.array()
    graph = classify_graph(D, iota)
    phi, psi = iota.phi, iota.psi
    assign: dict = {}
    k = 0
    for cyc in graph.cycles:
        k += 1
        base = 2 * d * k
        if cyc.kind == "T1":
            i, j = cyc.edges[0]
            assign[("L", i)] = EisensteinPoint(base, 0)
            assign[("R", j)] = EisensteinPoint(base + 1, 0)
        elif cyc.kind == "T2pair":
            (i, j), (i2, j2) = cyc.edges
            assign[("L", i)] = W + base
            assign[("R", j)] = W + (base + 1)
            assign[("L", i2)] = WBAR + base
            assign[("R", j2)] = WBAR + (base + 1)
        else:
            rows = sorted({i for i, _ in cyc.edges})
            cols = sorted({j for _, j in cyc.edges})
            if cyc.kind in ("T3", "T4L"):
                side, start = "L", next(i for i in rows if phi.is_fixed(i))
            else:
                side, start = "R", next(j for j in cols if psi.is_fixed(j))
            seq = _cycle_walk(cyc.edges, side, start)
            kind = "T3" if cyc.kind == "T3" else "T4"
            vals = _path_values(len(rows), kind)
            if len(vals) != len(seq):
                raise AssertionError("cycle length mismatch")
            for node, v in zip(seq, vals):
                assign[node] = v + base
    p_pts = [assign[("L", i)] for i in range(d)]
    q_pts = [assign[("R", j)] for j in range(d)]
    _check(D, iota, graph, p_pts, q_pts)
    p = eisenstein_expand(p_pts)
    q = eisenstein_expand(q_pts)
    relabelled = _relabel(D, iota, p_pts, q_pts)
    return RealizationInstance(p, q, vertex, assign, iota, relabelled)


def _check(D, iota: IotaAction, graph, p_pts, q_pts) -> None:
    """Exact invariants: conjugation, unit edges, separation, distinctness."""
    d = iota.d
    for i in range(d):
        if p_pts[iota.phi[i]] != p_pts[i].conjugate():
            raise AssertionError("root %d of p breaks the conjugation pattern" % i)
        if q_pts[iota.psi[i]] != q_pts[i].conjugate():
            raise AssertionError("root %d of q breaks the conjugation pattern" % i)
    if len(set(p_pts)) != d or len(set(q_pts)) != d:
        raise AssertionError("repeated root")
    for i in range(d):
        for j in range(d):
            if D[i, j] and sq_dist(p_pts[i], q_pts[j]) != 1:
                raise AssertionError("edge (%d,%d) does not have length 1" % (i, j))
    # separation: points of different cycles are at squared distance >= d^2
    comp = _cycle_labels(graph)
    pts = [("L", i, p_pts[i]) for i in range(d)] + [("R", j, q_pts[j]) for j in range(d)]
    for a in range(len(pts)):
        for b in range(a + 1, len(pts)):
            sa, ia, u = pts[a]
            sb, ib, v = pts[b]
            if comp[(sa, ia)] != comp[(sb, ib)] and sq_dist(u, v) < d * d:
                raise AssertionError("cycles closer than d")


def _cycle_labels(graph) -> dict:
    label: dict = {}
    for c, cyc in enumerate(graph.cycles):
        for i, j in cyc.edges:
            label[("L", i)] = c
            label[("R", j)] = c
    return label


def _sort_key(x: EisensteinPoint):
    # real roots ascending, then pairs by real part, |imag|, upper first
    if x.is_real:
        return (0, Fraction(x.a), 0, 0)
    return (1, x.real, abs(x.b), 0 if x.b > 0 else 1)


def _relabel(D, iota: IotaAction, p_pts, q_pts) -> InvariantVertex:
    """The vertex with rows/columns permuted into sorted-root order."""
    rp = sorted(range(len(p_pts)), key=lambda i: _sort_key(p_pts[i]))
    rq = sorted(range(len(q_pts)), key=lambda j: _sort_key(q_pts[j]))
    D2 = D[np.ix_(rp, rq)]
    canon = IotaAction.from_signatures(iota.phi.signature, iota.psi.signature)
    return _make_vertex(D2, canon)
