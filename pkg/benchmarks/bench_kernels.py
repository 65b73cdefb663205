"""Benchmark the word-sweep kernels: numba backend vs numpy fallback.

Usage:  python benchmarks/bench_kernels.py [--repeats N]

The workloads mirror what the equivalence oracles do at larger scale: a
deterministic sweep over ~0.8M words on a 64-point machine, a multi-valued
(bitmask) sweep over ~0.5M words on a 24-point machine, and the open-set
scan that materialises a 20-point topology.  Both backends are invoked
directly, so the TOPOMATA_KERNELS environment variable does not matter here.
"""

import argparse
import random
import time

import numpy as np

from topomata import _kernels


def time_call(fn, *args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def dta_workload(rng):
    n, m_sym, depth = 64, 3, 12
    tables = np.array([[rng.randrange(n) for _ in range(n)]
                       for _ in range(m_sym)], dtype=np.int64)
    ident = np.arange(n, dtype=np.int64)
    klass = np.array([rng.randrange(3) for _ in range(n)], dtype=np.uint8)
    size = _kernels.sweep_size(m_sym, depth)
    args = (tables, ident, ident, np.int64(0), klass, depth)
    return f"dta sweep ({size} words, {n} points)", "dta_sweep", args, size


def nta_workload(rng):
    n, m_sym, depth = 24, 2, 18
    full = (1 << n) - 1
    img = np.array([[rng.randrange(full + 1) for _ in range(n)]
                    for _ in range(m_sym)], dtype=np.int64)
    ident = np.array([1 << v for v in range(n)], dtype=np.int64)
    acc = np.int64(rng.randrange(full + 1))
    rej = np.int64(rng.randrange(full + 1) & ~acc)
    size = _kernels.sweep_size(m_sym, depth)
    args = (img, ident, ident, np.int64(1), acc, rej, True, depth)
    return f"nta sweep ({size} words, {n} points)", "nta_sweep", args, size


def open_flags_workload(rng):
    n = 20
    rows = [1 << i for i in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < 0.15:
                rows[i] |= 1 << j
    changed = True
    while changed:  # transitive closure
        changed = False
        for i in range(n):
            acc = rows[i]
            m = rows[i]
            while m:
                low = m & -m
                acc |= rows[low.bit_length() - 1]
                m ^= low
            if acc != rows[i]:
                rows[i] = acc
                changed = True
    mins = np.array(rows, dtype=np.int64)
    return f"open-set scan (2^{n} masks)", "open_flags", (mins,), 1 << n


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()
    rng = random.Random(42)

    print("compiling numba kernels (first call includes compilation)...")
    _kernels.warmup()

    workloads = [dta_workload(rng), nta_workload(rng), open_flags_workload(rng)]
    header = f"{'workload':<42} {'numpy':>10} {'numba':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, name, call_args, size in workloads:
        times = {}
        outputs = {}
        for backend in ("numpy", "numba"):
            impl = _kernels.get_impl(name, backend)
            if name == "open_flags":
                full_args = call_args
            else:
                out = np.empty(size, dtype=np.uint8)
                full_args = call_args + (out,)
            impl(*full_args)  # warm (and for numba: compile) once
            times[backend] = time_call(impl, *full_args,
                                       repeats=args.repeats)
            outputs[backend] = (full_args[-1].copy() if name != "open_flags"
                                else impl(*full_args))
        assert np.array_equal(outputs["numpy"], outputs["numba"]), \
            f"backend mismatch on {label}"
        speed = times["numpy"] / times["numba"]
        print(f"{label:<42} {times['numpy'] * 1e3:>8.2f}ms "
              f"{times['numba'] * 1e3:>8.2f}ms {speed:>7.1f}x")


if __name__ == "__main__":
    main()
