"""Compare the numba kernels with the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 200]

The backend is chosen per call from GAUSSRANK_NUMBA, so both paths are timed
in one process on identical inputs, and their outputs are compared.
"""

import argparse
import os
import time

import numpy as np

from gaussrank import _kernels
from gaussrank import variety as V
from gaussrank.expr import Program
from gaussrank.gauss import _combos
from gaussrank.numeric import complex_normal


def _time(fn, repeat):
    fn()  # warm-up (numba compiles here)
    start = time.perf_counter()
    for _ in range(repeat):
        out = fn()
    return (time.perf_counter() - start) / repeat, out


def _both(fn, repeat):
    results = {}
    for flag in ("1", "0"):
        os.environ["GAUSSRANK_NUMBA"] = flag
        results[flag] = _time(fn, repeat)
    os.environ.pop("GAUSSRANK_NUMBA", None)
    return results


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    cases = []
    for m, N, deg in [(2, 4, 3), (3, 6, 3), (2, 5, 5)]:
        X = V.random_polynomial_variety(rng, m, N, deg)
        prog = Program(X.coords, m)
        u = complex_normal(rng, m)
        cases.append((f"jet program  m={m} N={N} deg={deg} nodes={len(prog)}",
                      lambda prog=prog, u=u: prog.run(u, order=3).value))
    for n, N in [(2, 4), (3, 6), (4, 9)]:
        W = complex_normal(rng, (n + 1, N + 1))
        combos = _combos(N, n)
        cases.append((f"pluecker minors n={n} N={N} count={len(combos)}",
                      lambda W=W, c=combos: _kernels.minors(W, c)))

    if not _kernels.HAS_NUMBA:
        print("numba not importable; only the numpy path is available")
    print(f"{'kernel':<48} {'numba us':>10} {'numpy us':>10} {'speedup':>8}  max|diff|")
    for label, fn in cases:
        res = _both(fn, args.repeat)
        (t_nb, out_nb), (t_np, out_np) = res["1"], res["0"]
        diff = float(np.max(np.abs(np.asarray(out_nb) - np.asarray(out_np))))
        print(f"{label:<48} {t_nb * 1e6:10.1f} {t_np * 1e6:10.1f} {t_np / t_nb:8.1f}  {diff:.1e}")


if __name__ == "__main__":
    main()
