"""Compare the compiled and numpy scan kernels.

    python3 benchmarks/bench_kernels.py --sizes 128 256 512 --repeat 3

Prints one row per (kernel, size, backend) with the best wall time and the
largest difference from the numpy result.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from paralog.grid import GridSpec
from paralog.kernels import backends
from paralog.norms import _separations, bmo_cylinders


def _best(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench(sizes, repeat, seed):
    rng = np.random.default_rng(seed)
    impls = backends()
    rows = []
    for n in sizes:
        v = rng.standard_normal((n, n))
        seps, _ = _separations(n, True, 64)
        spec = GridSpec.box(n, n, (-4.0, 4.0), (-16.0, 16.0))
        cyls = bmo_cylinders(spec)
        ref = {}
        for name in ("python",) + tuple(k for k in impls if k != "python"):
            mod = impls[name]
            t_h, h = _best(lambda: mod.pair_maxima(v, True, seps), repeat)
            t_b, b = _best(lambda: [mod.bmo_scan(v, c.half_width_x, c.half_width_t,
                                                 c.stride_x, c.stride_t, True)[0]
                                    for c in cyls], repeat)
            if name == "python":
                ref = {"pairs": h[0], "bmo": np.array(b)}
            rows.append(("pair_maxima", n, name, t_h, float(np.max(np.abs(h[0] - ref["pairs"])))))
            rows.append(("bmo_scan", n, name, t_b, float(np.max(np.abs(np.array(b) - ref["bmo"])))))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[128, 256, 512])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    print(f"{'kernel':<12} {'size':>5} {'backend':<8} {'best_s':>9} {'max_diff':>10}")
    for kernel, n, name, t, diff in bench(args.sizes, args.repeat, args.seed):
        print(f"{kernel:<12} {n:>5} {name:<8} {t:>9.4f} {diff:>10.2e}")


if __name__ == "__main__":
    main()
