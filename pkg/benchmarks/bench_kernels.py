"""Compare the compiled and vectorized scan backends on the hot kernels.

Usage:  python3 benchmarks/bench_kernels.py [--quick]

Covers the three scan-bound workloads: full-strategy verification,
per-vertex correct counts, and the exhaustive board search.  The numba
backend pays a one-off compilation cost (cached on disk afterwards), so
each timing reports a warm second run.
"""

import argparse
import time

from hats import kernels, verify_strategy, correct_count
from hats.catalogue import named_game
from hats.rookcheck import Board, BoardPair, solve_rook


def timed(fn):
    fn()  # warm-up: compilation and caches
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def bench(backend, quick):
    kernels.set_backend(backend)
    rows = []
    bow = named_game("medium-bow" if quick else "big-bow")
    _, t = timed(lambda: verify_strategy(bow.game, bow.witness))
    rows.append((f"verify bow ({bow.game.total_arrangements:,} arrangements)", t))
    _, t = timed(lambda: correct_count(bow.game, bow.witness, bow.game.names[0]))
    rows.append(("correct-count scan", t))
    pair = BoardPair(Board(2, 2), Board(5, 5)) if quick else \
        BoardPair(Board(2, 3), Board(4, 4))
    _, t = timed(lambda: solve_rook(pair))
    rows.append((f"rook exhaustion {pair}", t))
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true",
                    help="smaller instances (useful for the pure-numpy path)")
    args = ap.parse_args()
    results = {}
    for backend in kernels.available_backends():
        print(f"== backend: {backend} ==")
        for label, t in bench(backend, args.quick):
            results.setdefault(label, {})[backend] = t
            print(f"  {label:<55} {t * 1000:10.1f} ms")
    kernels.set_backend(None)
    if len(results) and all(len(v) == 2 for v in results.values()):
        print("== speedup (numpy / numba) ==")
        for label, v in results.items():
            print(f"  {label:<55} {v['numpy'] / max(v['numba'], 1e-9):10.1f}x")


if __name__ == "__main__":
    main()
