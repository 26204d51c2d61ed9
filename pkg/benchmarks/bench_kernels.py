"""Compare the compiled kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Each kernel runs on identical inputs under both backends; outputs are
checked for equality before timings are reported.
"""
import argparse
import random
import timeit

import numpy as np

from nilmetric import kernels
from nilmetric.core import random_word
from nilmetric.exact import first_diagonal_generators, full_generators


def _collect_case(dim, length, count, seed=0):
    rng = random.Random(seed)
    ranks = kernels.rank_of(dim)
    words = [[(ranks[g], e) for g, e in random_word(dim, length, rng)] for _ in range(count)]
    return lambda b: [kernels.collect_units(dim, w, backend=b) for w in words]


def _bfs_case(dim, gens, radius):
    return lambda b: kernels.bfs_ball(dim, gens, radius, 10 ** 8, backend=b)


def _dp_case(k, size):
    return lambda b: kernels.min_power_parts(k, size, backend=b)


CASES = [
    ("collect T4, 200 words of length 200", _collect_case(4, 200, 200)),
    ("collect T6, 50 words of length 400", _collect_case(6, 400, 50)),
    ("bfs T3 full gens, radius 12", _bfs_case(3, full_generators(3), 12)),
    ("bfs T4 first diagonal, radius 9", _bfs_case(4, first_diagonal_generators(4), 9)),
    ("min cubes table, size 2^20", _dp_case(3, 1 << 20)),
    ("min 5th powers table, size 2^22", _dp_case(5, 1 << 22)),
]


def _same(a, b):
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    if isinstance(a, (list, tuple)):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    return a == b


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    names = sorted(kernels.backends())
    if "cython" not in names:
        print("compiled extension not available; only the Python backend will be timed")
    print(f"{'case':42s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) == 2 else ""))
    for title, run in CASES:
        results = {b: run(b) for b in names}
        if len(names) == 2 and not _same(results["cython"], results["python"]):
            raise SystemExit(f"backends disagree on {title}")
        times = {b: min(timeit.repeat(lambda: run(b), number=1, repeat=args.repeat)) for b in names}
        row = f"{title:42s}" + "".join(f"{times[b]:11.3f}s" for b in names)
        if len(names) == 2:
            row += f"{times['python'] / times['cython']:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
