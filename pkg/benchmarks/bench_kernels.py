"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]

Prints one row per kernel with the best-of-N time for each backend and the
speedup. Both backends are checked to return the same value on every input.
"""
import argparse
import sys
import time

import numpy as np

from planarlab import _backend, models


def _inputs(quick):
    scale = 4 if quick else 1
    rng = np.random.default_rng(0)
    n_perm = 200_000 // scale
    perm = rng.permutation(n_perm).astype(np.int64)

    w = models.sample_word_pair(16384 // scale, 16384 // scale, 1024, models.RngStream(0, 0))
    order, lo, hi = models.match_ranges(w)
    small = models.sample_word_pair(1500 // scale, 1500 // scale, 16, models.RngStream(1, 0))
    grid = models.sample_geometric_grid(600 // scale, 0.5, models.RngStream(2, 0)).weights.astype(np.int64)
    mat = models.sample_bernoulli_matrix(1000 // scale, 0.3, models.RngStream(3, 0)).entries
    return [
        (f"lis_strict N={n_perm}", "lis_strict", (perm,)),
        (f"lcs_sparse n={w.r} k=1024", "lcs_sparse", (order, lo, hi)),
        (f"lcs_dp n={small.r}", "lcs_dp", (small.word_a.astype(np.int64), small.word_b.astype(np.int64))),
        (f"max_weight_planar n={grid.shape[0]}", "max_weight_planar", (np.ascontiguousarray(grid),)),
        (f"odb_height n={mat.shape[0]}", "odb_height", (np.ascontiguousarray(mat),)),
    ]


def _best(fn, args, repeat):
    best = float("inf")
    value = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        value = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, value


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller inputs")
    args = ap.parse_args(argv)

    cy, py = _backend.compiled_kernels, _backend.python_kernels
    if cy is None:
        print("compiled kernels not available; build with `pip install -e . --no-build-isolation`")
        return 1
    print(f"{'kernel':34s} {'cython s':>10s} {'python s':>10s} {'speedup':>8s}")
    for label, name, call_args in _inputs(args.quick):
        t_cy, v_cy = _best(getattr(cy, name), call_args, args.repeat)
        t_py, v_py = _best(getattr(py, name), call_args, max(1, args.repeat // 3))
        if v_cy != v_py:
            print(f"{label}: backends disagree ({v_cy} vs {v_py})")
            return 1
        print(f"{label:34s} {t_cy:10.4f} {t_py:10.4f} {t_py / t_cy:8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
