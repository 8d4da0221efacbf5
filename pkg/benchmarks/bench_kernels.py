"""Benchmark the numba kernels against the pure-numpy fallback.

Run with ``python benchmarks/bench_kernels.py``.  Both paths are loaded in
one process (the env flag only selects the default used by the package),
so the comparison covers the same inputs; agreement is reported alongside
the timings.
"""

import time

import numpy as np

from sectorcalc import _kernels as K
from sectorcalc.calculus import functional_calculus, inverse_square
from sectorcalc.geometry import make_region
from sectorcalc.semigroups import CommutingTuple, random_sectorial_matrix


def _time(fn, *args, repeat=5):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_reductions(n=200_000, d=4):
    rng = np.random.default_rng(0)
    coeffs = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    mats = rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))
    rows = [("reduce_weighted (numpy)", *_time(K.py_reduce_weighted, coeffs, mats))]
    if K.NUMBA_ACTIVE:
        K.nb_reduce_weighted(coeffs[:8], mats[:8])  # compile
        rows.append(("reduce_weighted (numba)", *_time(K.nb_reduce_weighted, coeffs, mats)))
        agree = np.linalg.norm(rows[0][2] - rows[1][2]) / np.linalg.norm(rows[0][2])
        print(f"  reduction agreement: {agree:.3e}")
    for name, t, _ in rows:
        print(f"  {name:30s} {t * 1e3:9.2f} ms")


def bench_resolvent_stack(n=20_000, d=6):
    rng = np.random.default_rng(1)
    a = random_sectorial_matrix(rng, d)
    nodes = rng.standard_normal(n) + 1j * rng.standard_normal(n) + 4.0
    rows = [("resolvent_stack (numpy)", *_time(K.py_resolvent_stack, a, 1.0 + 0j, nodes))]
    if K.NUMBA_ACTIVE:
        K.nb_resolvent_stack(a, 1.0, nodes[:4])
        rows.append(("resolvent_stack (numba)", *_time(K.nb_resolvent_stack, a, 1.0, nodes)))
        agree = np.linalg.norm(rows[0][2] - rows[1][2]) / np.linalg.norm(rows[0][2])
        print(f"  stack agreement: {agree:.3e}")
    for name, t, _ in rows:
        print(f"  {name:30s} {t * 1e3:9.2f} ms")


def bench_calculus():
    dom = (-np.pi / 2 + 0.05, np.pi / 2 - 0.05)
    rng = np.random.default_rng(2)
    tup = CommutingTuple([random_sectorial_matrix(rng, 6)], [dom])
    region = make_region([-np.pi / 4], [np.pi / 4], [0.0])
    f = inverse_square(1, [1.0])

    def run():
        return functional_calculus(f, tup, [1.0], region, [0.25], tol=1e-9)

    original = (K.reduce_weighted, K.resolvent_stack)
    saved = {}
    try:
        for label, impls in (("numba", ("nb_reduce_weighted", "nb_resolvent_stack")),
                             ("numpy", ("py_reduce_weighted", "py_resolvent_stack"))):
            if label == "numba" and not K.NUMBA_ACTIVE:
                continue
            K.reduce_weighted = getattr(K, impls[0])
            K.resolvent_stack = getattr(K, impls[1])
            t, val = _time(run, repeat=3)
            saved[label] = val
            print(f"  full k=1 calculus ({label:5s})  {t * 1e3:9.2f} ms")
    finally:
        K.reduce_weighted, K.resolvent_stack = original
    if len(saved) == 2:
        agree = np.linalg.norm(saved["numba"] - saved["numpy"])
        print(f"  calculus agreement: {agree:.3e}")


if __name__ == "__main__":
    print(f"numba available: {K.NUMBA_ACTIVE}")
    print("weighted reductions:")
    bench_reductions()
    print("resolvent stacks:")
    bench_resolvent_stack()
    print("end-to-end contour calculus:")
    bench_calculus()
