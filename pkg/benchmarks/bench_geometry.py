"""Time the numba and numpy geometry kernels on random layouts.

Run with ``python benchmarks/bench_geometry.py [--edges 50 200 800] [--repeat 5]``.
The first numba call includes JIT compilation (or cache load) and is reported
separately.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from ecorelint.geometry import kernels


def random_segments(rng: np.random.Generator, edges: int, bends: int = 2):
    pts = rng.uniform(0, 1000, size=(edges, bends + 2, 2))
    seg = np.concatenate([pts[:, :-1], pts[:, 1:]], axis=2).reshape(-1, 4)
    owner = np.repeat(np.arange(edges), bends + 1)
    boxes = np.column_stack([rng.uniform(0, 1000, (edges, 2)), rng.uniform(5, 40, (edges, 2))])
    return seg, owner, boxes


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--edges", type=int, nargs="+", default=[50, 200, 800])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    seg, owner, boxes = random_segments(rng, 10)
    start = time.perf_counter()
    kernels.count_crossings(seg, owner, True)
    kernels.smallest_angle(seg, owner, True)
    kernels.count_label_overlaps(boxes, seg, True)
    print(f"numba warm-up (compile or cache load): {time.perf_counter() - start:.3f}s")
    if not kernels.HAVE_NUMBA:
        print("numba is not installed; both columns run the numpy code")

    print(f"{'kernel':<16}{'edges':>7}{'segments':>10}{'numba ms':>11}{'numpy ms':>11}{'speedup':>9}")
    for edges in args.edges:
        seg, owner, boxes = random_segments(rng, edges)
        for name, call in (
            ("crossings", lambda nb: kernels.count_crossings(seg, owner, nb)),
            ("min angle", lambda nb: kernels.smallest_angle(seg, owner, nb)),
            ("label overlaps", lambda nb: kernels.count_label_overlaps(boxes, seg, nb)),
        ):
            a, b = call(True), call(False)
            assert a == b or (a != a and b != b), f"{name}: backends disagree ({a} vs {b})"
            t_nb = best_of(lambda: call(True), args.repeat)
            t_np = best_of(lambda: call(False), args.repeat)
            print(f"{name:<16}{edges:>7}{len(seg):>10}{t_nb * 1e3:>11.2f}{t_np * 1e3:>11.2f}"
                  f"{t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
