"""Hot combinatorial kernels, each with a numba and a pure-numpy version.

The backend is picked once from ``WDEG_BACKEND`` (``numba`` or ``numpy``);
numba is the default when it imports.  Both versions return identical
arrays, which the test-suite checks.  ``WDEG_THREADS`` caps numba's thread
pool.
"""
from __future__ import annotations

import itertools
import os
from functools import lru_cache

import numpy as np

# tbb on this class of machines is often too old; workqueue is always there
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

try:
    import numba
    from numba import njit, prange
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

_requested = os.environ.get("WDEG_BACKEND", "numba" if HAVE_NUMBA else "numpy").lower()
if _requested not in ("numba", "numpy"):
    raise ValueError("WDEG_BACKEND must be 'numba' or 'numpy', got %r" % _requested)
BACKEND = _requested if HAVE_NUMBA else "numpy"

if HAVE_NUMBA and os.environ.get("WDEG_THREADS"):
    numba.set_num_threads(max(1, min(int(os.environ["WDEG_THREADS"]), numba.config.NUMBA_NUM_THREADS)))


def set_backend(name: str) -> None:
    global BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(name)
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    BACKEND = name


@lru_cache(maxsize=None)
def permutations(d: int) -> np.ndarray:
    """All permutations of range(d) in lexicographic order, shape (d!, d)."""
    if d == 0:
        return np.zeros((1, 0), dtype=np.int64)
    out = np.array(list(itertools.permutations(range(d))), dtype=np.int64)
    out.setflags(write=False)
    return out


def inverse_perms(perms: np.ndarray) -> np.ndarray:
    inv = np.empty_like(perms)
    rows = np.arange(perms.shape[0])[:, None]
    inv[rows, perms] = np.arange(perms.shape[1])[None, :]
    return inv


# ---------------------------------------------------------------------------
# numpy versions
# ---------------------------------------------------------------------------

def _iota_images_np(perms, phi, psi):
    d = perms.shape[1]
    first = perms
    second = psi[perms[:, phi]]
    ar = np.arange(d)
    return ((first[:, :, None] == ar).astype(np.int8)
            + (second[:, :, None] == ar).astype(np.int8))


def _commuting_np(perms, inv):
    return np.all(perms[:, inv] == inv[perms], axis=1)


def _aut_count_np(perms1, perms2, D):
    total = 0
    for g1 in perms1:
        rows = D[g1]                      # rows[i, :] = D[g1(i), :]
        moved = rows[:, perms2]           # (d, n2, d): D[g1 i, g2 j]
        ok = np.all(moved.transpose(1, 0, 2) == D[None], axis=(1, 2))
        total += int(ok.sum())
    return total


def _fingerprints_np(inv1, inv2, Sx, Sy, C):
    n1, d = inv1.shape
    n2 = inv2.shape[0]
    fx = Sx[inv1[:, :, None], inv1[:, None, :]].reshape(n1, d * d)
    fy = Sy[inv2[:, :, None], inv2[:, None, :]].reshape(n2, d * d)
    fc = C[inv1[:, None, :, None], inv2[None, :, None, :]].reshape(n1 * n2, d * d)
    out = np.empty((n1 * n2, 3 * d * d), dtype=np.int8)
    out[:, : d * d] = np.repeat(fx, n2, axis=0)
    out[:, d * d: 2 * d * d] = np.tile(fy, (n1, 1))
    out[:, 2 * d * d:] = fc
    return out


def _assignment_sums_np(cost, perms):
    d = perms.shape[1]
    return cost[np.arange(d)[None, :], perms].sum(axis=1)


def _polmulmod_np(a, b, f, p):
    prod = np.convolve(a, b) % p
    n = f.shape[0] - 1
    # f is monic; reduce from the top
    for k in range(prod.shape[0] - 1, n - 1, -1):
        c = prod[k]
        if c:
            prod[k - n: k + 1] = (prod[k - n: k + 1] - c * f) % p
    out = np.zeros(n, dtype=np.int64)
    m = min(n, prod.shape[0])
    out[:m] = prod[:m]
    return out


# ---------------------------------------------------------------------------
# numba versions
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _iota_images_nb(perms, phi, psi):
        n, d = perms.shape
        out = np.zeros((n, d, d), dtype=np.int8)
        for k in range(n):
            for i in range(d):
                out[k, i, perms[k, i]] += 1
                out[k, i, psi[perms[k, phi[i]]]] += 1
        return out

    @njit(cache=True)
    def _commuting_nb(perms, inv):
        n, d = perms.shape
        out = np.ones(n, dtype=np.bool_)
        for k in range(n):
            for i in range(d):
                if perms[k, inv[i]] != inv[perms[k, i]]:
                    out[k] = False
                    break
        return out

    @njit(cache=True, parallel=True)
    def _aut_count_nb(perms1, perms2, D):
        n1, d = perms1.shape
        n2 = perms2.shape[0]
        counts = np.zeros(n1, dtype=np.int64)
        for a in prange(n1):
            c = 0
            for b in range(n2):
                ok = True
                for i in range(d):
                    gi = perms1[a, i]
                    for j in range(d):
                        if D[gi, perms2[b, j]] != D[i, j]:
                            ok = False
                            break
                    if not ok:
                        break
                if ok:
                    c += 1
            counts[a] = c
        return counts.sum()

    @njit(cache=True, parallel=True)
    def _fingerprints_nb(inv1, inv2, Sx, Sy, C):
        n1, d = inv1.shape
        n2 = inv2.shape[0]
        dd = d * d
        out = np.empty((n1 * n2, 3 * dd), dtype=np.int8)
        for a in prange(n1):
            for b in range(n2):
                row = a * n2 + b
                for i in range(d):
                    for j in range(d):
                        out[row, i * d + j] = Sx[inv1[a, i], inv1[a, j]]
                        out[row, dd + i * d + j] = Sy[inv2[b, i], inv2[b, j]]
                        out[row, 2 * dd + i * d + j] = C[inv1[a, i], inv2[b, j]]
        return out

    @njit(cache=True)
    def _assignment_sums_nb(cost, perms):
        n, d = perms.shape
        out = np.empty(n, dtype=np.float64)
        for k in range(n):
            s = 0.0
            for i in range(d):
                s += cost[i, perms[k, i]]
            out[k] = s
        return out

    @njit(cache=True)
    def _polmulmod_nb(a, b, f, p):
        la, lb = a.shape[0], b.shape[0]
        prod = np.zeros(la + lb - 1, dtype=np.int64)
        for i in range(la):
            ai = a[i]
            if ai == 0:
                continue
            for j in range(lb):
                prod[i + j] = (prod[i + j] + ai * b[j]) % p
        n = f.shape[0] - 1
        for k in range(prod.shape[0] - 1, n - 1, -1):
            c = prod[k]
            if c:
                for j in range(n + 1):
                    prod[k - n + j] = (prod[k - n + j] - c * f[j]) % p
        out = np.zeros(n, dtype=np.int64)
        m = min(n, prod.shape[0])
        for i in range(m):
            out[i] = prod[i]
        return out


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def _i64(x):
    return np.ascontiguousarray(x, dtype=np.int64)


def iota_images(perms, phi, psi) -> np.ndarray:
    """Doubled matrices P_s + iota(P_s) for every row s of ``perms``."""
    perms, phi, psi = _i64(perms), _i64(phi), _i64(psi)
    if BACKEND == "numba":
        return _iota_images_nb(perms, phi, psi)
    return _iota_images_np(perms, phi, psi)


def commuting(perms, inv) -> np.ndarray:
    """Mask of permutations commuting with the involution ``inv``."""
    perms, inv = _i64(perms), _i64(inv)
    if BACKEND == "numba":
        return _commuting_nb(perms, inv)
    return _commuting_np(perms, inv)


def aut_count(perms1, perms2, D) -> int:
    """Pairs (g1, g2) with D[g1 i, g2 j] == D[i, j] for all i, j."""
    perms1, perms2, D = _i64(perms1), _i64(perms2), _i64(D)
    if perms1.shape[0] == 0 or perms2.shape[0] == 0:
        return 0
    if BACKEND == "numba":
        return int(_aut_count_nb(perms1, perms2, D))
    return _aut_count_np(perms1, perms2, D)


def fingerprints(inv1, inv2, Sx, Sy, C) -> np.ndarray:
    """Coefficient tables of g.f for every g = (g1, g2); rows ordered g1-major.

    ``inv1``/``inv2`` hold the inverse permutations; integer tables must fit
    int8.
    """
    inv1, inv2 = _i64(inv1), _i64(inv2)
    Sx, Sy, C = _i64(Sx), _i64(Sy), _i64(C)
    if BACKEND == "numba":
        return _fingerprints_nb(inv1, inv2, Sx, Sy, C)
    return _fingerprints_np(inv1, inv2, Sx, Sy, C)


def assignment_sums(cost, perms) -> np.ndarray:
    """sum_i cost[i, s(i)] for every permutation row s (float64)."""
    cost = np.ascontiguousarray(cost, dtype=np.float64)
    perms = _i64(perms)
    if BACKEND == "numba":
        return _assignment_sums_nb(cost, perms)
    return _assignment_sums_np(cost, perms)


def polmulmod(a, b, f, p: int) -> np.ndarray:
    """(a*b) mod (f, p); f monic, coefficient arrays low -> high, p < 2^20."""
    a, b, f = _i64(a), _i64(b), _i64(f)
    if BACKEND == "numba":
        return _polmulmod_nb(a, b, f, np.int64(p))
    return _polmulmod_np(a, b, f, p)
