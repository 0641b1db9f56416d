"""Time the numba kernels against the numpy reference backend.

Usage:
    python3 benchmarks/bench_kernels.py [--repeat N]

Each kernel runs once untimed so numba compilation is excluded, then the
best of ``--repeat`` wall-clock runs is reported for both backends.
"""

import argparse
import time

import numpy as np

from robustcalib import _kernels_np

try:
    from robustcalib import _kernels_nb
except ImportError:
    _kernels_nb = None

RAMP, HINGE, LOGISTIC, SQUARED = 0, 3, 4, 5


def _cases():
    rng = np.random.default_rng(42)
    etas = np.linspace(0.5, 1.0, 2001)
    x = rng.standard_normal((800, 2)) / 4.0
    y = np.where(rng.random(800) < 0.5, -1.0, 1.0)
    p = rng.standard_normal(3)
    return {
        "ccr_grid_min logistic 2001x2001": lambda m: m.ccr_grid_min(LOGISTIC, 0.2, etas, -1.0, 1.0, 2001),
        "interval_table squared 2001x2001": lambda m: m.interval_table(SQUARED, 0.2, etas, -0.2, 0.2,
                                                                       False, 2001, 1e-10),
        "golden_gap hinge": lambda m: m.golden_gap(HINGE, 0.2, -1.0, 0.2, False, 2001, 1e-10,
                                                   0.6, 0.9, 1e-8),
        "surrogate_grad ramp n=800 x200": lambda m: [m.surrogate_grad(RAMP, 0.2, x, y, p)
                                                     for _ in range(200)],
    }


def _best(fn, module, repeat: int) -> float:
    fn(module)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(module)
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    print(f"{'kernel':36s} {'numpy [s]':>10s} {'numba [s]':>10s} {'speedup':>8s}")
    for name, fn in _cases().items():
        t_np = _best(fn, _kernels_np, args.repeat)
        if _kernels_nb is None:
            print(f"{name:36s} {t_np:10.4f} {'n/a':>10s} {'n/a':>8s}")
            continue
        t_nb = _best(fn, _kernels_nb, args.repeat)
        print(f"{name:36s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:7.1f}x")


if __name__ == "__main__":
    main()
