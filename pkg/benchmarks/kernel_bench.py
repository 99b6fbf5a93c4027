"""Benchmark the compiled flip-replay kernel against the pure fallback.

Usage: python benchmarks/kernel_bench.py [repeats]

Replays the flip programs of long random twist words over the curve
battery with both kernels and reports flips per second and the speedup.
Both kernels must agree exactly on every output vector.
"""

from __future__ import annotations

import random
import sys
import time

from mcgwalk.engine import kernel, kernel_py
from mcgwalk.engine.system import get_system


def _random_word(rng: random.Random, genus: int, length: int):
    return tuple(
        (rng.randrange(1, 2 * genus + 2), rng.choice((1, -1))) for _ in range(length)
    )


def run(repeats: int = 200) -> None:
    genus = 2
    system = get_system(genus)
    rng = random.Random(12345)
    programs = [system.compile_word(_random_word(rng, genus, 60)) for _ in range(10)]
    vectors = list(system.edge_battery)

    backends = [("compiled" if kernel.BACKEND == "compiled" else "python", kernel.replay)]
    if kernel.BACKEND == "compiled":
        backends.append(("python", kernel_py.replay))

    results = {}
    outputs = {}
    for (name, replay) in backends:
        start = time.perf_counter()
        flips = 0
        out = []
        for _r in range(repeats):
            for prog in programs:
                for vec in vectors:
                    out.append(replay(list(vec), prog.steps, prog.perm))
                    flips += prog.n_flips
        elapsed = time.perf_counter() - start
        results[name] = (flips, elapsed)
        outputs[name] = out
        print(f"{name:>8}: {flips / elapsed / 1e6:7.2f} Mflip/s  ({elapsed:.2f}s)")

    if len(outputs) == 2:
        assert outputs["compiled"] == outputs["python"], "kernel outputs differ"
        speedup = results["python"][1] / results["compiled"][1]
        print(f" speedup: {speedup:.2f}x (identical outputs)")
    else:
        print(" compiled kernel unavailable; ran pure-python fallback only")


if __name__ == "__main__":
    run(int(sys.argv[1]) if len(sys.argv) > 1 else 200)
