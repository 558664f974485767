"""Benchmark the compiled Monte Carlo kernel against the numpy fallback.

Run as ``python -m ssris.bench``. Both implementations must produce
bit-identical samples; the benchmark re-checks that on every row.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from .backend import available_backends


def _run(impl, seed: int, num_samples: int, num_elements: int):
    bg = np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(0,)))
    start = time.perf_counter()
    out = impl.rayleigh_block_sums(bg, num_samples, num_elements)
    return out, time.perf_counter() - start


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=500_000)
    parser.add_argument("--elements", default="10,32,100",
                        help="comma-separated element counts")
    parser.add_argument("--seed", type=int, default=12345)
    args = parser.parse_args(argv)

    impls = available_backends()
    element_counts = [int(m) for m in args.elements.split(",")]
    print(f"backends: {', '.join(impls)}   samples per row: {args.samples}")
    print(f"{'M':>6} " + " ".join(f"{name:>12}" for name in impls) + "  speedup")
    for m in element_counts:
        times = {}
        outputs = {}
        for name, impl in impls.items():
            outputs[name], times[name] = _run(impl, args.seed, args.samples, m)
        first = next(iter(outputs.values()))
        if not all(np.array_equal(first, out) for out in outputs.values()):
            print(f"{m:>6}  BACKENDS DISAGREE")
            return 1
        cells = " ".join(f"{times[name]:>10.3f}s " for name in impls)
        if "compiled" in times and "python" in times:
            ratio = f"{times['python'] / times['compiled']:7.2f}x"
        else:
            ratio = "      -"
        print(f"{m:>6} {cells} {ratio}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
