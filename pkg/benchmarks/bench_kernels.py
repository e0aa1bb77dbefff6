#!/usr/bin/env python3
"""Benchmark the contraction backends: numba @njit loop vs numpy bincount.

Runs the raw scatter-accumulate kernel on representative contraction plans
and a full closing-moment evaluation workload at N=5, K=3.  The active
backend for library calls is chosen at import time from MCF_NUMBA; here both
implementations are timed side by side regardless of the flag.

Usage: python benchmarks/bench_kernels.py [--repeats 200]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from momentclosure import _kernels
from momentclosure.symtensor import SymTensor, _contraction_plan, contract
import momentclosure as mc


def time_fn(fn, repeats):
    fn()  # warm up (JIT compile, plan cache)
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def bench_raw(plans, repeats):
    rows = []
    for rank_a, rank_b, k in plans:
        io, ia, ib, w, n_out = _contraction_plan(rank_a, rank_b, k)
        a = np.random.default_rng(0).standard_normal(ia.max() + 1)
        b = np.random.default_rng(1).standard_normal(ib.max() + 1)

        def run_numpy():
            _kernels.coo_accumulate_numpy(np.zeros(n_out), io, ia, ib, w, a, b)

        t_np = time_fn(run_numpy, repeats)
        t_nb = None
        if _kernels.coo_accumulate_numba is not None:
            def run_numba():
                _kernels.coo_accumulate_numba(np.zeros(n_out), io, ia, ib, w, a, b)

            t_nb = time_fn(run_numba, repeats)
        rows.append(((rank_a, rank_b, k), w.size, t_np, t_nb))
    return rows


def bench_workload(repeats):
    lat = mc.build_lattice(mc.exponential_seed(1.0, 0.0, 8, 5, 3), 5, 3)
    rng = np.random.default_rng(0)
    states = [
        mc.equilibrium_multiplier(5, 0.0, 3.0) + mc.random_deviation(5, rng, 0.05)
        for _ in range(8)
    ]

    def run():
        for l in states:
            mc.eval_moments(lat, l)

    return time_fn(run, max(1, repeats // 20))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=200)
    args = ap.parse_args()

    print(f"active backend: {_kernels.BACKEND} (set MCF_NUMBA=0 to force numpy)\n")
    print(f"{'plan (ra,rb,k)':>16} {'nnz':>8} {'numpy':>12} {'numba':>12} {'speedup':>8}")
    for plan, nnz, t_np, t_nb in bench_raw(
        [(5, 5, 5), (11, 5, 5), (16, 5, 5), (13, 4, 4), (6, 5, 0)], args.repeats
    ):
        nb = f"{t_nb * 1e6:10.1f}us" if t_nb else "       n/a"
        ratio = f"{t_np / t_nb:7.2f}x" if t_nb else "     n/a"
        print(f"{str(plan):>16} {nnz:>8} {t_np * 1e6:10.1f}us {nb} {ratio}")

    t = bench_workload(args.repeats)
    print(f"\nclosing-moment workload (N=5, K=3, 8 states, {_kernels.BACKEND}): {t * 1e3:.2f} ms")


if __name__ == "__main__":
    main()
