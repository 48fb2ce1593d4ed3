#!/usr/bin/env python3
"""Compare the numba and numpy backends of the oracle's enumeration kernel.

Runs the (profile x sequence) search on real oracle inputs built from seeded
instances, checks both backends return the same triple, and prints timings.

    python3 benchmarks/bench_kernels.py --n 6 7 8 --repeats 3
"""

import argparse
import itertools
import time

import numpy as np

from tariffsched._kernels import best_profile_sequence, numba_enabled
from tariffsched.gen import generate
from tariffsched.oracle import _scale, enumerate_profiles


def kernel_inputs(n, seed):
    inst = generate(n, k=4, dmax=6, emax=5, seed=seed, pmax=2)
    tariff = inst.tariff
    total = sum(j.p for j in inst.jobs)
    profiles = enumerate_profiles(tariff, total)
    scale = _scale(inst)
    ends = np.array(
        [[t + 1 for iv, c in zip(tariff.intervals, cnt) for t in range(iv.start, iv.start + c)] for cnt in profiles],
        dtype=np.int64,
    )
    tcost = np.array(
        [int(sum(c * iv.cost for iv, c in zip(tariff.intervals, cnt) if c) * scale) for cnt in profiles],
        dtype=np.int64,
    )
    perms = np.array(list(itertools.permutations(range(len(inst.jobs)))), dtype=np.int64)
    p = np.array([j.p for j in inst.jobs], dtype=np.int64)
    w = np.array([int(j.w * scale) for j in inst.jobs], dtype=np.int64)
    return ends, tcost, perms, p, w


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[5, 6, 7, 8])
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    if not numba_enabled():
        print("numba disabled (TARIFFSCHED_NUMBA=0 or not importable); timing numpy only")
    else:
        # compile outside the timed region
        best_profile_sequence(*kernel_inputs(2, args.seed), use_numba=True)

    print(f"{'n':>3} {'profiles':>9} {'perms':>7} {'numpy s':>9} {'numba s':>9} {'speedup':>8}  same")
    for n in args.n:
        data = kernel_inputs(n, args.seed)
        t_np, r_np = timeit(lambda: best_profile_sequence(*data, use_numba=False), args.repeats)
        if numba_enabled():
            t_nb, r_nb = timeit(lambda: best_profile_sequence(*data, use_numba=True), args.repeats)
            same = r_nb == r_np
            print(f"{n:>3} {len(data[0]):>9} {len(data[2]):>7} {t_np:>9.4f} {t_nb:>9.4f} {t_np / t_nb:>7.1f}x  {same}")
        else:
            print(f"{n:>3} {len(data[0]):>9} {len(data[2]):>7} {t_np:>9.4f} {'-':>9} {'-':>8}  -")


if __name__ == "__main__":
    main()
