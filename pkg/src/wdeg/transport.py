"""Certified transport costs between root measures.

The cost of a doubly stochastic M is (1/d) sum M_ij |alpha_i - beta_j|^2; a
vertex is stored doubled, so its cost is (1/(2d)) sum D_ij c_ij.  The 1/d
appears exactly once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from mpmath import iv

from . import accel
from .exactnum import QPoly, frac_str
from .invbirkhoff import IotaAction, Involution, InvariantVertex, enumerate_vertices
from .rootcert import (DEFAULT_PRECISION, RootSystem, isolate_roots, iv_bounds, ivprec,
                       refine)

__all__ = ["CostMatrix", "TransportSolution", "cost_matrix", "vertex_cost",
           "minimize_over_vertices", "brute_force_assignment", "solve_pair",
           "DEFAULT_MAX_PRECISION", "Interval"]

DEFAULT_MAX_PRECISION = 4096
BRUTE_FORCE_LIMIT = 8

Interval = tuple  # (Fraction lo, Fraction hi)


@dataclass(frozen=True)
class CostMatrix:
    """Interval enclosures of |alpha_i - beta_j|^2 together with their roots."""
    entries: tuple                # d x d tuple of mpmath real intervals
    precision_bits: int
    pr: RootSystem
    qr: RootSystem

    @property
    def d(self) -> int:
        return len(self.entries)

    @property
    def working_prec(self) -> int:
        return self.precision_bits + 32

    def bounds(self, i: int, j: int) -> Interval:
        return iv_bounds(self.entries[i][j])

    def midpoints(self) -> np.ndarray:
        return np.array([[float(x.mid) for x in row] for row in self.entries])

    def refined(self, precision_bits: int) -> "CostMatrix":
        return cost_matrix(refine(self.pr, precision_bits), refine(self.qr, precision_bits))


@dataclass(frozen=True)
class TransportSolution:
    optimal_vertex: InvariantVertex
    value: Interval               # certified enclosure of W_2^2
    unique: bool
    runner_up_gap: Fraction       # certified lower bound, 0 on a declared tie
    precision_bits: int

    @property
    def midpoint(self) -> Fraction:
        return (self.value[0] + self.value[1]) / 2

    @property
    def width(self) -> Fraction:
        return self.value[1] - self.value[0]

    def to_json(self) -> dict:
        return {"optimal_vertex": self.optimal_vertex.to_json(),
                "value": [frac_str(self.value[0]), frac_str(self.value[1])],
                "unique": self.unique, "runner_up_gap": frac_str(self.runner_up_gap),
                "precision_bits": self.precision_bits}


def cost_matrix(pr: RootSystem, qr: RootSystem) -> CostMatrix:
    if pr.degree != qr.degree:
        raise ValueError("root systems have different sizes (%d vs %d)" % (pr.degree, qr.degree))
    bits = min(pr.precision_bits, qr.precision_bits)
    with ivprec(bits + 32):
        a = pr.iv_roots(bits + 32)
        b = qr.iv_roots(bits + 32)
        rows = []
        for x in a:
            row = []
            for y in b:
                diff = x - y
                row.append(diff.real ** 2 + diff.imag ** 2)
            rows.append(tuple(row))
    return CostMatrix(tuple(rows), bits, pr, qr)


def _vertex_cost_iv(cm: CostMatrix, D) -> object:
    d = cm.d
    acc = iv.mpf(0)
    for i in range(d):
        for j in range(d):
            if D[i][j]:
                acc += D[i][j] * cm.entries[i][j]
    return acc / (2 * d)


def vertex_cost(cm: CostMatrix, vertex) -> Interval:
    """Enclosure of cost(M) for a vertex given doubled."""
    D = vertex.doubled if isinstance(vertex, InvariantVertex) else vertex
    with ivprec(cm.working_prec):
        return iv_bounds(_vertex_cost_iv(cm, D))


def _decide(values: list[Interval]) -> tuple[int, Fraction] | None:
    """Index of the certified unique minimum and its gap, or None."""
    best = min(range(len(values)), key=lambda k: (values[k][1], k))
    if len(values) == 1:
        return best, Fraction(0)
    gap = min(values[k][0] for k in range(len(values)) if k != best) - values[best][1]
    if gap > 0:
        return best, gap
    return None


def minimize_over_vertices(cm: CostMatrix, vertices: list[InvariantVertex],
                           max_precision: int = DEFAULT_MAX_PRECISION) -> TransportSolution:
    """Certified minimum of the cost over the given vertex list.

    Overlapping enclosures trigger root refinement (precision doubles) up to
    ``max_precision``; past that the lexicographically least candidate among
    those whose enclosure meets the best one is returned with unique=False.
    """
    if not vertices:
        raise ValueError("empty vertex list")
    while True:
        values = [vertex_cost(cm, v) for v in vertices]
        decided = _decide(values)
        if decided is not None:
            k, gap = decided
            return TransportSolution(vertices[k], values[k], True, gap, cm.precision_bits)
        if cm.precision_bits * 2 > max_precision:
            break
        cm = cm.refined(cm.precision_bits * 2)
    top = min(v[1] for v in values)
    cands = [k for k in range(len(vertices)) if values[k][0] <= top]
    k = min(cands, key=lambda c: vertices[c].key())
    lo = min(values[c][0] for c in cands)
    return TransportSolution(vertices[k], (lo, top), False, Fraction(0), cm.precision_bits)


def brute_force_assignment(cm: CostMatrix) -> tuple[tuple[int, ...], Interval]:
    """Exhaustive minimum of (1/d) sum |alpha_i - beta_s(i)|^2 over Sym(d).

    A float pass screens the d! sums; every permutation within a generous
    margin of the float minimum is then evaluated in interval arithmetic.
    The margin exceeds the float rounding error plus the enclosure widths,
    so the optimum is always among the certified candidates.
    """
    d = cm.d
    if d > BRUTE_FORCE_LIMIT:
        raise ValueError("brute force over d! permutations is limited to d <= %d" % BRUTE_FORCE_LIMIT)
    perms = accel.permutations(d)
    mid = cm.midpoints()
    sums = accel.assignment_sums(mid, perms)
    width = max(float(cm.bounds(i, j)[1] - cm.bounds(i, j)[0]) for i in range(d) for j in range(d))
    scale = float(np.abs(mid).sum()) + 1.0
    margin = 2 * d * width + 1e-9 * scale
    cand = np.nonzero(sums <= sums.min() + margin)[0]
    scored = []
    with ivprec(cm.working_prec):
        for idx in cand:
            s = perms[idx]
            acc = iv.mpf(0)
            for i in range(d):
                acc += cm.entries[i][s[i]]
            lo, hi = iv_bounds(acc / d)
            scored.append((hi, tuple(int(x) for x in s), lo))
    hi, perm, _ = min(scored)
    # the minimum lies below the least upper bound and above every lower bound
    lo = min(t[2] for t in scored)
    return perm, (lo, hi)


def solve_pair(p: QPoly, q: QPoly, precision_bits: int = DEFAULT_PRECISION,
               max_precision: int = DEFAULT_MAX_PRECISION):
    """Roots, involutions, vertex list and certified optimum for (p, q)."""
    if p.degree != q.degree:
        raise ValueError("polynomials must have equal degree (got %d and %d)" % (p.degree, q.degree))
    pr = isolate_roots(p, precision_bits)
    qr = isolate_roots(q, precision_bits)
    iota = IotaAction(Involution(pr.conj_involution), Involution(qr.conj_involution))
    vertices = enumerate_vertices(iota)
    sol = minimize_over_vertices(cost_matrix(pr, qr), vertices, max_precision)
    return pr, qr, iota, vertices, sol
