"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_kernels.py [--size 256] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from gridforecast import kernels


def cases(size, rng):
    heat = rng.random((size, size))
    conv = kernels.box_sum(heat, 23, 11)
    lines = rng.integers(-10, size + 10, (200, 4))
    return {
        "box_sum 23x11": lambda: kernels.box_sum(heat, 23, 11),
        "greedy_sample n=6": lambda: kernels.greedy_sample(conv.copy(), 6, 11, 5),
        "greedy_sample n=30": lambda: kernels.greedy_sample(conv.copy(), 30, 11, 5),
        "draw_line x200": lambda: [kernels.draw_line(np.zeros((size, size), np.uint8), *map(int, l))
                                   for l in lines],
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=256)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = kernels.available_backends()
    rng = np.random.default_rng(0)
    results = {}
    previous = kernels.BACKEND
    for name in backends:
        kernels.use_backend(name)
        for label, fn in cases(args.size, rng).items():
            results[label, name] = min(timeit.repeat(fn, number=1, repeat=args.repeat))
    kernels.use_backend(previous)
    print(f"{args.size}x{args.size} raster, best of {args.repeat} (ms)")
    print(f"{'kernel':<22}" + "".join(f"{b:>10}" for b in backends)
          + ("   speedup" if len(backends) > 1 else ""))
    for label in cases(args.size, rng):
        row = [results[label, b] * 1e3 for b in backends]
        line = f"{label:<22}" + "".join(f"{v:>10.3f}" for v in row)
        if len(backends) > 1:
            line += f"{row[1] / row[0]:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
