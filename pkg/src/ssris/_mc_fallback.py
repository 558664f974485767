"""Pure-numpy Monte Carlo kernel, the fallback for the compiled one.

Kept operation-for-operation in step with ``_mc_kernel.pyx``: normals are
consumed in the same order (re, im pairs, element-major within a sample)
and the per-sample magnitudes are accumulated in the same order, so both
implementations return bit-identical arrays from the same bit generator
state. Do not "optimize" the column loop into a pairwise sum.
"""

from __future__ import annotations

import numpy as np

# Upper bound on standard-normal draws materialized per chunk (~32 MB).
_DRAWS_PER_CHUNK = 1 << 22


def rayleigh_block_sums(bit_generator, num_samples: int, num_elements: int) -> np.ndarray:
    """Y_i = sum_k |h_ik| for h ~ CN(0, 1) i.i.d., one row per sample."""
    if num_samples < 0:
        raise ValueError("num_samples must be nonnegative")
    if num_elements < 1:
        raise ValueError("num_elements must be >= 1")
    gen = np.random.Generator(bit_generator)
    out = np.empty(num_samples, dtype=np.float64)
    rows_per_chunk = max(1, _DRAWS_PER_CHUNK // (2 * num_elements))
    done = 0
    while done < num_samples:
        rows = min(rows_per_chunk, num_samples - done)
        # C-order fill; splitting the block over chunks leaves the stream
        # position after each row identical to the compiled kernel's.
        draws = gen.standard_normal((rows, 2 * num_elements))
        re = draws[:, 0::2]
        im = draws[:, 1::2]
        mags = np.sqrt(0.5 * (re * re + im * im))
        acc = mags[:, 0].copy()
        for k in range(1, num_elements):
            acc += mags[:, k]
        out[done:done + rows] = acc
        done += rows
    return out
