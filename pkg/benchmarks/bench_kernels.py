"""Compare the compiled and NumPy trace-product kernels.

Usage::

    python3 benchmarks/bench_kernels.py --repeat 5
    python3 benchmarks/bench_kernels.py --sizes 40,100,200 --orders 0,1,3 --csv bench.csv

Both backends are run on identical Gram matrices; the script checks that
they agree before reporting timings.
"""
import argparse
import csv
import sys
import timeit

import numpy as np

from mdeptest import _kernels_py

try:
    from mdeptest import _kernels
except ImportError:  # extension not built
    _kernels = None


def _ints(text):
    return [int(v) for v in text.split(",") if v]


def bench_one(fn, args, repeat):
    # best of `repeat`, each timing a single call
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def run(sizes, orders, p_ratio, repeat, seed=0):
    rng = np.random.default_rng(seed)
    rows = []
    for n in sizes:
        p = p_ratio * n
        X = rng.standard_normal((n, p))
        Y = rng.standard_normal((n, p))
        g = X @ X.T
        g12 = X @ Y.T
        for M in orders:
            for kernel, arg in (("trace_product_grid", g), ("cross_trace_grid", g12)):
                py_fn = getattr(_kernels_py, kernel)
                t_py = bench_one(py_fn, (arg, M), repeat)
                row = {"kernel": kernel, "n": n, "M": M, "numpy_s": t_py, "compiled_s": None, "speedup": None}
                if _kernels is not None:
                    c_fn = getattr(_kernels, kernel)
                    ref, got = py_fn(arg, M)[0], c_fn(arg, M)[0]
                    if not np.allclose(ref, got, rtol=1e-10, atol=1e-10):
                        raise SystemExit(f"backends disagree for {kernel} n={n} M={M}")
                    t_c = bench_one(c_fn, (arg, M), repeat)
                    row["compiled_s"] = t_c
                    row["speedup"] = t_py / t_c
                rows.append(row)
    return rows


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=_ints, default=[40, 100, 200])
    parser.add_argument("--orders", type=_ints, default=[0, 1, 3])
    parser.add_argument("--p-ratio", type=int, default=2, help="p = ratio * n")
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--csv", help="also write the table to this file")
    args = parser.parse_args(argv)

    if _kernels is None:
        print("compiled extension not available; timing the NumPy kernels only", file=sys.stderr)
    rows = run(args.sizes, args.orders, args.p_ratio, args.repeat)
    print(f"{'kernel':<20}{'n':>6}{'M':>4}{'numpy [ms]':>13}{'compiled [ms]':>15}{'speedup':>9}")
    for r in rows:
        comp = "-" if r["compiled_s"] is None else f"{1e3 * r['compiled_s']:.2f}"
        speed = "-" if r["speedup"] is None else f"{r['speedup']:.1f}x"
        print(f"{r['kernel']:<20}{r['n']:>6}{r['M']:>4}{1e3 * r['numpy_s']:>13.2f}{comp:>15}{speed:>9}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)


if __name__ == "__main__":
    main()
