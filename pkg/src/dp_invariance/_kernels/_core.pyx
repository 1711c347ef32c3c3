# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled draw kernels.

Fused generate-and-reduce loops over numpy's own C exponential sampler,
so the random stream is bitwise identical to the numpy fallback; only
the floating-point summation order differs.
"""

cimport numpy as cnp
import numpy as np
from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport random_standard_exponential

cnp.import_array()


cdef bitgen_t *_state(bit_gen) except NULL:
    cdef const char *name = "BitGenerator"
    capsule = bit_gen.capsule
    if not PyCapsule_IsValid(capsule, name):
        raise ValueError("expected a numpy BitGenerator")
    return <bitgen_t *> PyCapsule_GetPointer(capsule, name)


def exp_ratio_draws(bit_gen, double[::1] values, Py_ssize_t n_draws):
    """Per draw: e_j ~ Exp(1), return sum(e*values)/sum(e)."""
    cdef bitgen_t *rng = _state(bit_gen)
    cdef Py_ssize_t n = values.shape[0]
    out = np.empty(n_draws, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t d, j
    cdef double e, num, den
    with bit_gen.lock, nogil:
        for d in range(n_draws):
            num = 0.0
            den = 0.0
            for j in range(n):
                e = random_standard_exponential(rng)
                num += e * values[j]
                den += e
            o[d] = num / den
    return out


def exp_quantile_draws(bit_gen, double[::1] sorted_values, double q, Py_ssize_t n_draws):
    """Per draw: smallest value whose cumulative Exp(1) weight reaches q."""
    cdef bitgen_t *rng = _state(bit_gen)
    cdef Py_ssize_t n = sorted_values.shape[0]
    out = np.empty(n_draws, dtype=np.float64)
    scratch = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef double[::1] e = scratch
    cdef Py_ssize_t d, j, idx
    cdef double total, target, cum
    with bit_gen.lock, nogil:
        for d in range(n_draws):
            total = 0.0
            for j in range(n):
                e[j] = random_standard_exponential(rng)
                total += e[j]
            target = q * total
            cum = 0.0
            idx = n - 1
            for j in range(n):
                cum += e[j]
                if cum >= target:
                    idx = j
                    break
            o[d] = sorted_values[idx]
    return out
