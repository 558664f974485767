# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Monte Carlo kernel: sums of complex-Gaussian magnitudes.

Draws directly from a numpy bit generator through the C API, consuming
normals in exactly the order the pure-numpy fallback does, so both
backends emit bit-identical samples from the same generator state.
"""

from libc.math cimport sqrt

import numpy as np

from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport random_standard_normal


def rayleigh_block_sums(bit_generator, Py_ssize_t num_samples, Py_ssize_t num_elements):
    """Y_i = sum_k |h_ik| for h ~ CN(0, 1) i.i.d., one row per sample.

    Consumes 2*num_elements standard normals per sample (re, im pairs,
    element-major) from ``bit_generator``.
    """
    if num_samples < 0:
        raise ValueError("num_samples must be nonnegative")
    if num_elements < 1:
        raise ValueError("num_elements must be >= 1")
    capsule = bit_generator.capsule
    if not PyCapsule_IsValid(capsule, "BitGenerator"):
        raise ValueError("invalid BitGenerator capsule")
    cdef bitgen_t *rng = <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")
    out = np.empty(num_samples, dtype=np.float64)
    cdef double[::1] y = out
    cdef Py_ssize_t i, k
    cdef double acc, re, im
    with bit_generator.lock, nogil:
        for i in range(num_samples):
            acc = 0.0
            for k in range(num_elements):
                re = random_standard_normal(rng)
                im = random_standard_normal(rng)
                acc += sqrt(0.5 * (re * re + im * im))
            y[i] = acc
    return out
