"""Compiled vs fallback kernels on the workloads the package actually runs.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from flatleaves import _kernels_py, kernels
from flatleaves.invariant import candidate_vectors
from flatleaves.klein import build_klein
from flatleaves.leaves import sweep_strata

try:
    from flatleaves import _kernels as compiled
except ImportError:
    compiled = None


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def orbit_workload(n: int):
    g = build_klein(n).group
    mats = np.array([m.tolist() for m in g.elements], dtype=np.int64)
    return mats, candidate_vectors(n, 2)


def mask_workload(n: int, d: int, seed: int = 0):
    r = np.random.default_rng(seed)
    h, mc = n, n - 1
    q = d * n
    rows = r.integers(-q, q, size=(h, mc, mc)).astype(np.int64)
    offs = r.integers(-q, q, size=(h, mc)).astype(np.int64)
    pts = r.integers(0, d, size=(200_000, mc)).astype(np.int64)
    return rows, offs, pts, q


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if compiled is None:
        print("compiled extension not built; nothing to compare")
        return
    p = kernels.MODULUS_PRIME
    print(f"{'workload':<34}{'cython s':>10}{'python s':>10}{'speedup':>9}")
    for n in (5, 6, 7):
        mats, vecs = orbit_workload(n)
        assert np.array_equal(np.asarray(compiled.orbit_ranks(mats, vecs, p)), _kernels_py.orbit_ranks(mats, vecs, p))
        tc = best_of(lambda: compiled.orbit_ranks(mats, vecs, p), args.repeat)
        tp = best_of(lambda: _kernels_py.orbit_ranks(mats, vecs, p), args.repeat)
        print(f"{f'orbit_ranks klein{n} ({len(vecs)} vecs)':<34}{tc:>10.4f}{tp:>10.4f}{tp / tc:>8.1f}x")
    for n, d in ((6, 6), (8, 8)):
        rows, offs, pts, q = mask_workload(n, d)
        assert np.array_equal(np.asarray(compiled.coset_masks(rows, offs, pts, q)), _kernels_py.coset_masks(rows, offs, pts, q))
        tc = best_of(lambda: compiled.coset_masks(rows, offs, pts, q), args.repeat)
        tp = best_of(lambda: _kernels_py.coset_masks(rows, offs, pts, q), args.repeat)
        print(f"{f'coset_masks h={n} (200k points)':<34}{tc:>10.4f}{tp:>10.4f}{tp / tc:>8.1f}x")
    fx = build_klein(8)
    tc = best_of(lambda: sweep_strata(fx.vprime, fx.group, 8), 1)
    saved = kernels.coset_masks
    kernels.coset_masks = _kernels_py.coset_masks
    try:
        tp = best_of(lambda: sweep_strata(fx.vprime, fx.group, 8), 1)
    finally:
        kernels.coset_masks = saved
    print(f"{'sweep_strata klein8 end to end':<34}{tc:>10.4f}{tp:>10.4f}{tp / tc:>8.1f}x")


if __name__ == "__main__":
    main()
