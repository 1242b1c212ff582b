"""Time the combinatorial kernels under the numba and numpy backends.

    python3 benchmarks/bench_kernels.py [-d 5] [--repeat 5]

The first numba call of each kernel may compile it (or load it from the
cache); that call is timed
separately and excluded from the steady-state figures.
"""
import argparse
import time

import numpy as np

from wdeg import accel
from wdeg.galoisdeg import CostForm
from wdeg.invbirkhoff import IotaAction, enumerate_vertices


def _cases(d: int):
    io = IotaAction.from_signatures((d - 2, 1), (d - 2, 1)) if d >= 3 else IotaAction.from_signatures((d, 0), (d, 0))
    perms = accel.permutations(d)
    inv = accel.inverse_perms(perms)
    v = enumerate_vertices(io)[-1]
    tables = CostForm.from_vertex(v, io).tables()
    g1 = perms[accel.commuting(perms, io.phi.array())]
    g2 = perms[accel.commuting(perms, io.psi.array())]
    rng = np.random.default_rng(0)
    cost = rng.normal(size=(d, d))
    p = 65537
    n = 144
    f = np.append(rng.integers(0, p, n), 1)
    a, b = rng.integers(0, p, n), rng.integers(0, p, n)
    return {
        "iota_images": lambda: accel.iota_images(perms, io.phi.array(), io.psi.array()),
        "commuting": lambda: accel.commuting(perms, io.phi.array()),
        "aut_count": lambda: accel.aut_count(g1, g2, v.array()),
        "fingerprints": lambda: accel.fingerprints(inv, inv, *tables),
        "assignment_sums": lambda: accel.assignment_sums(cost, perms),
        "polmulmod(n=144)": lambda: accel.polmulmod(a, b, f, p),
    }


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-d", type=int, default=5, help="degree (permutation sweeps use d!)")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    cases = _cases(args.d)
    saved = accel.BACKEND
    print("d = %d, best of %d runs" % (args.d, args.repeat))
    print("%-18s %12s %12s %15s %8s" % ("kernel", "numpy [ms]", "numba [ms]", "first call [ms]", "speedup"))
    try:
        for name, fn in cases.items():
            accel.set_backend("numba")
            t0 = time.perf_counter()
            fn()
            first = time.perf_counter() - t0
            nb = _time(fn, args.repeat)
            accel.set_backend("numpy")
            np_t = _time(fn, args.repeat)
            print("%-18s %12.3f %12.3f %15.1f %7.1fx" % (name, 1e3 * np_t, 1e3 * nb, 1e3 * first, np_t / nb))
    finally:
        accel.set_backend(saved)


if __name__ == "__main__":
    main()
