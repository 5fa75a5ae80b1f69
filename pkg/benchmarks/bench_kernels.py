"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--reps 200] [--repeat 3]
"""

import argparse
import timeit

import numpy as np

from skewbox.kernels import available_backends, backend_module
from skewbox.mosaic import SimConfig, simulate_cell


def bench_medcouple(sizes, repeat):
    rng = np.random.default_rng(0)
    for n in sizes:
        xs = np.sort(rng.standard_normal(n))
        row = [f"medcouple n={n:<5d}"]
        for name in available_backends():
            mod = backend_module(name)
            loops = max(1, 20000 // (n * n // 10 + 1))
            best = min(timeit.repeat(lambda: mod.medcouple_sorted(xs), number=loops, repeat=repeat)) / loops
            row.append(f"{name} {best * 1e6:10.1f} us")
        print("  ".join(row))


def bench_cell(scenario, n, reps, repeat):
    cfg = SimConfig(scenario=scenario, n=n, reps=reps, seed=1)
    row = [f"{scenario} cell n={n} reps={reps}"]
    for name in available_backends():
        best = min(
            timeit.repeat(lambda: simulate_cell(0, 0, 0.3, 1.5, cfg, ("tukey", "hubert", "walker"), backend=name),
                          number=1, repeat=repeat)
        )
        row.append(f"{name} {best * 1e3:9.1f} ms")
    print("  ".join(row))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print("backends:", ", ".join(available_backends()))
    bench_medcouple((10, 20, 50, 100, 200), args.repeat)
    bench_cell("swamping", 20, args.reps, args.repeat)
    bench_cell("masking", 100, args.reps, args.repeat)


if __name__ == "__main__":
    main()
