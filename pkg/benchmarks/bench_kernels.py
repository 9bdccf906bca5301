"""Compare the compiled and numpy kernels on the workloads the library runs.

    python benchmarks/bench_kernels.py [--repeat N]

Prints one row per workload with the best time of each backend and the ratio.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from horostar import Horofunction, _kernels_py

try:
    from horostar import _ckernels
except ImportError:
    _ckernels = None


def _gap_args(horizon):
    vec = lambda *v: np.array(v, dtype=float)  # noqa: E731
    # x_n toward max(-x, -y-3), y_n toward max(x-2, -y): a diverging pair
    return (vec(1, 1), vec(0, -3), vec(-1, 1), vec(2, 0), vec(0, 0), horizon // 2, horizon)


def _grid_args(dim, steps):
    h1 = Horofunction.normalize(dim, range(1, dim + 1), [-1] * dim, range(dim))
    h2 = Horofunction.normalize(dim, range(1, dim + 1), [1] + [-1] * (dim - 1), [0] * dim)
    return (*h1.term_arrays(), *h2.term_arrays(), np.full(dim, -4.0), 8.0 / steps, (steps + 1,) * dim)


WORKLOADS = [
    ("gap series, horizon 1e5", "affine_gap_series", _gap_args(10**5)),
    ("gap series, horizon 1e6", "affine_gap_series", _gap_args(10**6)),
    ("grid sup-diff, 2-d 256^2", "grid_sup_diff", _grid_args(2, 256)),
    ("grid sup-diff, 3-d 128^3", "grid_sup_diff", _grid_args(3, 128)),
]


def best_time(fn, args, repeat):
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    print(f"{'workload':28s} {'numpy [ms]':>11s} {'cython [ms]':>12s} {'speed-up':>9s}")
    for label, name, call_args in WORKLOADS:
        py = best_time(getattr(_kernels_py, name), call_args, args.repeat)
        if _ckernels is None:
            print(f"{label:28s} {py * 1e3:11.2f} {'n/a':>12s} {'n/a':>9s}")
            continue
        cy = best_time(getattr(_ckernels, name), call_args, args.repeat)
        print(f"{label:28s} {py * 1e3:11.2f} {cy * 1e3:12.2f} {py / cy:8.1f}x")


if __name__ == "__main__":
    main()
