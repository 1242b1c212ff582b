"""The conjugation-invariant Birkhoff polytope.

Vertices are stored doubled (entries in {0, 1, 2}), so everything here is
integer arithmetic.  The bipartite multigraph of a doubled matrix has left
nodes = rows and right nodes = columns; it is 2-regular, hence a disjoint
union of even cycles, which are classified into the four admissible types:

    T1      double edge between two fixed points
    T2pair  two double edges swapped by iota
    T3      cycle of length 2(2k+1), one fixed point on each side
    T4L/R   cycle of length 4k, two fixed points on the left/right side
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import accel
from .exactnum import affine_rank

__all__ = [
    "Involution", "IotaAction", "Cycle", "Census", "CycleDecomposition",
    "InvariantVertex", "NotAVertexError", "iota_image", "classify_graph",
    "enumerate_vertices", "dim_formula", "aut_order", "aut_order_brute",
    "signatures", "polytope_json", "ENUMERATION_LIMIT",
]

ENUMERATION_LIMIT = 8
BRUTE_FORCE_LIMIT = 6


class NotAVertexError(ValueError):
    """The matrix lies in the invariant polytope but is not a vertex."""


@dataclass(frozen=True)
class Involution:
    images: tuple[int, ...]

    def __post_init__(self):
        img = tuple(int(x) for x in self.images)
        object.__setattr__(self, "images", img)
        n = len(img)
        if sorted(img) != list(range(n)) or any(img[img[i]] != i for i in range(n)):
            raise ValueError("not an involution: %r" % (img,))

    @classmethod
    def from_signature(cls, n_real: int, n_pairs: int) -> "Involution":
        img = list(range(n_real + 2 * n_pairs))
        for t in range(n_pairs):
            a = n_real + 2 * t
            img[a], img[a + 1] = a + 1, a
        return cls(tuple(img))

    def __len__(self):
        return len(self.images)

    def __getitem__(self, i):
        return self.images[i]

    def is_fixed(self, i: int) -> bool:
        return self.images[i] == i

    @property
    def signature(self) -> tuple[int, int]:
        fixed = sum(1 for i, j in enumerate(self.images) if i == j)
        return fixed, (len(self.images) - fixed) // 2

    def array(self) -> np.ndarray:
        return np.array(self.images, dtype=np.int64)


@dataclass(frozen=True)
class IotaAction:
    phi: Involution
    psi: Involution

    def __post_init__(self):
        if len(self.phi) != len(self.psi):
            raise ValueError("phi and psi act on different sizes")

    @classmethod
    def from_signatures(cls, p_sig, q_sig) -> "IotaAction":
        return cls(Involution.from_signature(*p_sig), Involution.from_signature(*q_sig))

    @property
    def d(self) -> int:
        return len(self.phi)

    def apply(self, M) -> np.ndarray:
        """(iota M)_{ij} = M_{phi(i) psi(j)}."""
        M = np.asarray(M)
        return M[np.ix_(self.phi.array(), self.psi.array())]

    def transposed(self) -> "IotaAction":
        return IotaAction(self.psi, self.phi)


@dataclass(frozen=True)
class Cycle:
    kind: str                     # T1, T2pair, T3, T4L, T4R
    k: int
    edges: tuple[tuple[int, int], ...]

    @property
    def length(self) -> int:
        # number of graph nodes on the cycle (a T2pair counts both 2-cycles)
        return 2 * len(self.edges) if self.kind not in ("T1", "T2pair") else 2 * len(self.edges)


@dataclass(frozen=True)
class Census:
    c1: int = 0
    c2: int = 0
    c3: tuple[tuple[int, int], ...] = ()      # (k, count) pairs, sorted
    c4L: tuple[tuple[int, int], ...] = ()
    c4R: tuple[tuple[int, int], ...] = ()

    def to_json(self) -> dict:
        return {
            "c1": self.c1, "c2": self.c2,
            "c3": {str(k): n for k, n in self.c3},
            "c4L": {str(k): n for k, n in self.c4L},
            "c4R": {str(k): n for k, n in self.c4R},
        }


@dataclass(frozen=True)
class CycleDecomposition:
    cycles: tuple[Cycle, ...]
    census: Census


@dataclass(frozen=True)
class InvariantVertex:
    doubled: tuple[tuple[int, ...], ...]
    graph: CycleDecomposition = field(compare=False)
    aut_order: int = field(compare=False)

    @property
    def d(self) -> int:
        return len(self.doubled)

    def array(self) -> np.ndarray:
        return np.array(self.doubled, dtype=np.int64)

    def matrix(self) -> list[list[Fraction]]:
        return [[Fraction(x, 2) for x in row] for row in self.doubled]

    def key(self) -> tuple[int, ...]:
        return tuple(x for row in self.doubled for x in row)

    def to_json(self) -> dict:
        return {"doubled": [list(r) for r in self.doubled],
                "census": self.graph.census.to_json(),
                "aut_order": self.aut_order}


# ---------------------------------------------------------------------------

def iota_image(sigma, iota: IotaAction) -> np.ndarray:
    """Doubled matrix P_sigma + iota(P_sigma)."""
    sigma = np.asarray(sigma, dtype=np.int64).reshape(1, -1)
    if sorted(sigma[0].tolist()) != list(range(iota.d)):
        raise ValueError("sigma is not a permutation of %d elements" % iota.d)
    return accel.iota_images(sigma, iota.phi.array(), iota.psi.array())[0].astype(np.int64)


def _walk_cycles(D: np.ndarray) -> list[list[tuple[int, int]]]:
    """Edge lists of the cycles of the 2-regular bipartite multigraph."""
    d = D.shape[0]
    seen_rows = [False] * d
    cycles = []
    for start in range(d):
        if seen_rows[start]:
            continue
        cols = [j for j in range(d) if D[start, j]]
        if D[start, cols[0]] == 2:
            seen_rows[start] = True
            cycles.append([(start, cols[0])])
            continue
        edges = []
        i, j = start, cols[0]
        while True:
            seen_rows[i] = True
            edges.append((i, j))
            # leave column j through its other row
            nxt = [r for r in range(d) if D[r, j] and r != i]
            i2 = nxt[0]
            edges.append((i2, j))
            seen_rows[i2] = True
            if i2 == start:
                break
            j = next(c for c in range(d) if D[i2, c] and c != j)
            i = i2
        cycles.append(edges)
    return cycles


def classify_graph(doubled, iota: IotaAction) -> CycleDecomposition:
    """Cycle decomposition with type census; raises NotAVertexError."""
    D = np.asarray(doubled, dtype=np.int64)
    d = iota.d
    if D.shape != (d, d):
        raise ValueError("matrix shape %r does not match d=%d" % (D.shape, d))
    if D.min() < 0 or np.any(D.sum(axis=0) != 2) or np.any(D.sum(axis=1) != 2):
        raise ValueError("row and column sums of the doubled matrix must equal 2")
    if not np.array_equal(iota.apply(D), D):
        raise ValueError("matrix is not iota-invariant")
    phi, psi = iota.phi, iota.psi
    raw = _walk_cycles(D)
    cycles: list[Cycle] = []
    c3: dict[int, int] = {}
    c4L: dict[int, int] = {}
    c4R: dict[int, int] = {}
    c1 = 0
    pending_t2: dict[tuple[int, int], tuple[int, int]] = {}
    t2_pairs = []
    for edges in raw:
        if len(edges) == 1:
            i, j = edges[0]
            fi, fj = phi.is_fixed(i), psi.is_fixed(j)
            if fi and fj:
                c1 += 1
                cycles.append(Cycle("T1", 1, ((i, j),)))
            elif not fi and not fj:
                partner = (phi[i], psi[j])
                if partner in pending_t2:
                    pending_t2.pop(partner)
                    e = tuple(sorted([(i, j), partner]))
                    t2_pairs.append(Cycle("T2pair", 1, e))
                else:
                    pending_t2[(i, j)] = partner
            else:
                raise NotAVertexError("double edge (%d,%d) joins a fixed and a non-fixed point" % (i, j))
            continue
        rows = sorted({i for i, _ in edges})
        cols = sorted({j for _, j in edges})
        m = len(rows)
        fl = sum(1 for i in rows if phi.is_fixed(i))
        fr = sum(1 for j in cols if psi.is_fixed(j))
        if fl == 1 and fr == 1 and m % 2 == 1:
            k = (m - 1) // 2
            c3[k] = c3.get(k, 0) + 1
            cycles.append(Cycle("T3", k, tuple(edges)))
        elif fl == 2 and fr == 0 and m % 2 == 0:
            k = m // 2
            c4L[k] = c4L.get(k, 0) + 1
            cycles.append(Cycle("T4L", k, tuple(edges)))
        elif fr == 2 and fl == 0 and m % 2 == 0:
            k = m // 2
            c4R[k] = c4R.get(k, 0) + 1
            cycles.append(Cycle("T4R", k, tuple(edges)))
        else:
            raise NotAVertexError(
                "cycle of length %d through rows %s has %d/%d fixed points (left/right)"
                % (2 * m, rows, fl, fr))
    if pending_t2:
        raise NotAVertexError("unpaired double edge(s) %s" % sorted(pending_t2))
    cycles.extend(t2_pairs)
    census = Census(c1, len(t2_pairs), tuple(sorted(c3.items())),
                    tuple(sorted(c4L.items())), tuple(sorted(c4R.items())))
    return CycleDecomposition(tuple(cycles), census)


def aut_order(census: Census | CycleDecomposition) -> int:
    """|Aut_iota(Gamma)| from the cycle-type census."""
    if isinstance(census, CycleDecomposition):
        census = census.census
    exp2 = census.c2
    out = math.factorial(census.c1) * math.factorial(census.c2)
    for _, n in census.c3:
        exp2 += n
        out *= math.factorial(n)
    for _, n in census.c4L + census.c4R:
        exp2 += 2 * n
        out *= math.factorial(n)
    return out << exp2


def aut_order_brute(vertex, iota: IotaAction) -> int:
    """Count (g1, g2) commuting with iota and preserving the edge multiset."""
    d = iota.d
    if d > BRUTE_FORCE_LIMIT:
        raise ValueError("brute-force automorphism count limited to d <= %d" % BRUTE_FORCE_LIMIT)
    D = vertex.array() if isinstance(vertex, InvariantVertex) else np.asarray(vertex, dtype=np.int64)
    perms = accel.permutations(d)
    g1 = perms[accel.commuting(perms, iota.phi.array())]
    g2 = perms[accel.commuting(perms, iota.psi.array())]
    return accel.aut_count(g1, g2, D)


def _make_vertex(D: np.ndarray, iota: IotaAction) -> InvariantVertex:
    graph = classify_graph(D, iota)
    return InvariantVertex(tuple(tuple(int(x) for x in row) for row in D), graph, aut_order(graph))


def enumerate_vertices(iota: IotaAction, limit: int = ENUMERATION_LIMIT) -> list[InvariantVertex]:
    """All vertices, sorted by the row-major doubled matrix."""
    d = iota.d
    if d > limit:
        raise ValueError("vertex enumeration sweeps d! permutations; d=%d exceeds the limit %d "
                         "(raise `limit` explicitly if you accept the cost)" % (d, limit))
    perms = accel.permutations(d)
    images = accel.iota_images(perms, iota.phi.array(), iota.psi.array())
    flat = np.unique(images.reshape(len(perms), d * d), axis=0)
    out = []
    for row in flat:
        D = row.reshape(d, d).astype(np.int64)
        try:
            v = _make_vertex(D, iota)
        except NotAVertexError:
            continue
        # the graph is a function of the doubled matrix: re-derive and compare
        assert classify_graph(D, iota) == v.graph
        out.append(v)
    out.sort(key=InvariantVertex.key)
    return out


def _check_sig(sig, name="signature") -> tuple[int, int]:
    r, c = (int(x) for x in sig)
    if r < 0 or c < 0:
        raise ValueError("%s must be non-negative" % name)
    return r, c


def dim_formula(p_sig, q_sig) -> int:
    pr, pc = _check_sig(p_sig)
    qr, qc = _check_sig(q_sig)
    if pr + 2 * pc != qr + 2 * qc:
        raise ValueError("signatures %r and %r have different degrees" % (p_sig, q_sig))
    return (pr + pc) * (qr + qc) - (pr + pc + qr + qc - 1) + pc * qc


def signatures(d: int) -> list[tuple[int, int]]:
    """(n_real, n_pairs) for degree d, most real roots first."""
    return [(d - 2 * t, t) for t in range(d // 2 + 1)]


def polytope_json(iota: IotaAction, vertices: list[InvariantVertex] | None = None) -> dict:
    if vertices is None:
        vertices = enumerate_vertices(iota)
    dim = dim_formula(iota.phi.signature, iota.psi.signature)
    rank = affine_rank([v.doubled for v in vertices])
    return {
        "d": iota.d,
        "phi": list(iota.phi.images),
        "psi": list(iota.psi.images),
        "dim": dim,
        "affine_rank": rank,
        "vertex_count": len(vertices),
        "vertices": [v.to_json() for v in vertices],
    }
