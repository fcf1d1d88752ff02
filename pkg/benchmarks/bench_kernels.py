"""Time the compiled kernels against the NumPy fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--max-degree 12]

Each row traces parities of the template C_D and computes its diagonal
phases with both implementations, checks the outputs agree, and prints the
best-of-N wall time per kernel.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from hobocirc import _pykernels, kernels
from hobocirc.template import template


def best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--min-degree", type=int, default=6)
    ap.add_argument("--max-degree", type=int, default=12)
    args = ap.parse_args(argv)

    if kernels.BACKEND != "cython":
        print("compiled extension not available; only the fallback can be timed")
    fast = kernels._impl
    print(f"{'D':>3} {'ops':>7} {'trace py [ms]':>14} {'trace ext [ms]':>15} {'phase py [ms]':>14} {'phase ext [ms]':>15}")
    for d in range(args.min_degree, args.max_degree + 1):
        c = template(d)
        kinds, a, b, theta, _ = kernels.encode_ops(c)
        init = [1 << i for i in range(c.q)]

        obs_py, fin_py = _pykernels.trace_parities(init, kinds, a, b)
        obs_ext, fin_ext = fast.trace_parities(init, kinds, a, b)
        assert np.array_equal(obs_py, obs_ext) and list(fin_py) == list(fin_ext)
        ph_py, lab_py = _pykernels.diagonal_phases(c.n, kinds, a, b, theta)
        ph_ext, lab_ext = fast.diagonal_phases(c.n, kinds, a, b, theta)
        assert np.allclose(ph_py, ph_ext) and np.array_equal(lab_py, lab_ext)

        t_tp = best_of(lambda: _pykernels.trace_parities(init, kinds, a, b), args.repeat)
        t_te = best_of(lambda: fast.trace_parities(init, kinds, a, b), args.repeat)
        t_pp = best_of(lambda: _pykernels.diagonal_phases(c.n, kinds, a, b, theta), args.repeat)
        t_pe = best_of(lambda: fast.diagonal_phases(c.n, kinds, a, b, theta), args.repeat)
        print(f"{d:>3} {len(kinds):>7} {t_tp * 1e3:>14.3f} {t_te * 1e3:>15.3f} {t_pp * 1e3:>14.3f} {t_pe * 1e3:>15.3f}")


if __name__ == "__main__":
    main()
