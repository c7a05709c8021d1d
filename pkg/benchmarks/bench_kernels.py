"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel runs once first so JIT compilation is not timed.  Outputs are
compared as well; the script exits 1 if any pair disagrees.
"""
import argparse
import math
import sys
import time

import numpy as np

from cocyclelab import kernels
from cocyclelab.walls_trees import TreeBall


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    rng = np.random.default_rng(0)
    pts = rng.random(16)
    w = rng.random(16)
    ns = np.arange(1, 5001, dtype=np.int64)
    u_re, u_im = kernels.unit_phase_dd(pts)
    b2 = w.copy()
    ms = np.arange(1, 20001, dtype=np.int64)
    x = rng.random(200_000)
    tb = TreeBall(2, 6)
    return {
        "phi": (lambda: kernels.phi_numba(997, x), lambda: kernels.phi_numpy(997, x)),
        "atomic_c": (lambda: kernels.atomic_c_numba(pts, w, ns), lambda: kernels.atomic_c_numpy(pts, w, ns)),
        "orbit_norm_sq": (lambda: kernels.orbit_norm_sq_numba(u_re, u_im, b2, 2000),
                          lambda: kernels.orbit_norm_sq_numpy(u_re, u_im, b2, 2000)),
        "edelstein_norm_sq": (lambda: kernels.edelstein_norm_sq_numba(ms, 12, kernels.FACT_INT, kernels.FACT_FLOAT),
                              lambda: kernels.edelstein_norm_sq_numpy(ms, 12)),
        "tree_halfspace_sums": (lambda: kernels.tree_halfspace_sums_numba(tb.anc, tb.edge_child, tb.edge_depth, 2.0),
                                lambda: kernels.tree_halfspace_sums_numpy(tb.anc, tb.edge_child, tb.edge_depth, 2.0)),
    }


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not kernels._jit.NUMBA_AVAILABLE:
        print("numba is not installed; nothing to compare")
        return 0
    print(f"{'kernel':<22}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}  agree")
    bad = 0
    for name, (fast, slow) in cases().items():
        agree = np.allclose(fast(), slow(), rtol=1e-12, atol=1e-12)
        bad += not agree
        tf, ts = best_of(fast, args.repeat), best_of(slow, args.repeat)
        speed = ts / tf if tf > 0 else math.inf
        print(f"{name:<22}{tf * 1e3:>12.3f}{ts * 1e3:>12.3f}{speed:>9.1f}x  {agree}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
