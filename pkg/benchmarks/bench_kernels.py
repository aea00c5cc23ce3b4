"""Compiled vs pure-Python kernels on representative inputs.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each kernel runs on identical inputs in both backends; results are compared
before timings are printed.
"""

from __future__ import annotations

import argparse
import random
import sys
import time

import numpy as np

from mclsearch import _pykernels, bundles, checks, compat, cover, kernels
from mclsearch.cliques import mclaughlin_lines


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def cases(idx):
    rng = random.Random(1)

    inst = cover.bundle_instance(idx, 1)
    yield ("exact cover, first 2000 bundles at a point",
           lambda m: m.ExactCover(inst.ncols, inst.rows).count_solutions(limit=2000))

    tables = bundles.apex_tables(idx, 1)
    sample = checks.sample_bundles_at(idx, 1, 200, rng)
    sols = tables.local_rows(np.asarray(sample, dtype=np.int32))
    args = (sols, tables.row_pairs, tables.row_nbrs, tables.m_line, tables.m_nb, tables.m_pairs, tables.npairs)
    yield "bundle invariants, 200 bundles", lambda m: m.bundle_invariants(*args)

    nrng = np.random.default_rng(2)
    fps = nrng.integers(0, 2**63, size=(50000, 5), dtype=np.uint64) & nrng.integers(0, 2**63, size=(50000, 5), dtype=np.uint64)
    cand = np.arange(50000, dtype=np.int32)
    word = nrng.integers(0, 2**16, size=5, dtype=np.uint64)
    yield "fingerprint filter, 50000 rows", lambda m: m.filter_disjoint(fps, cand, word)

    left = np.asarray(checks.sample_bundles_at(idx, 1, 40, rng), dtype=np.int32)
    right = np.asarray(checks.sample_bundles_at(idx, 8, 40, rng), dtype=np.int32)
    masks = compat.line_mask_array(idx)
    yield "naive compatibility, 40 x 40 bundles", lambda m: m.naive_compatible(masks, left, right)

    n = 60
    adj = np.zeros((n, 2), dtype=np.uint64)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.5:
                adj[i, 0] |= np.uint64(1 << j)
                adj[j, 0] |= np.uint64(1 << i)
    yield "independent 5-sets, 60 vertices", lambda m: m.count_independent_sets(adj, n, 5)


def same(a, b):
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return np.array_equal(np.asarray(a), np.asarray(b))
    return a == b


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    compiled = kernels.compiled_backend()
    if compiled is None:
        print("compiled backend not built; nothing to compare", file=sys.stderr)
        return 1
    idx = mclaughlin_lines()
    print(f"{'kernel':42s} {'cython s':>10s} {'python s':>10s} {'speedup':>8s}")
    for name, fn in cases(idx):
        tc, rc = best_of(lambda: fn(compiled), args.repeat)
        tp, rp = best_of(lambda: fn(_pykernels), args.repeat)
        if not same(rc, rp):
            print(f"{name}: backends disagree", file=sys.stderr)
            return 1
        print(f"{name:42s} {tc:10.4f} {tp:10.4f} {tp / tc:7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
