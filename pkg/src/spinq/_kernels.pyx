# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Semantics must match ``spinq._fallback`` exactly."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline void _set_digits(long long c, long long* digits, int n, long long q) noexcept nogil:
    cdef int j
    for j in range(n - 1, -1, -1):
        digits[j] = c % q
        c = c // q


def partition_sum(const double complex[::1] weights,
                  const long long[::1] offsets,
                  const long long[::1] var_idx,
                  const long long[::1] var_ptr,
                  int n, long long q, long long start, long long stop):
    """Sequential sum of configuration weights over ``[start, stop)``."""
    cdef int m = offsets.shape[0]
    cdef long long[::1] digits = np.zeros(max(n, 1), dtype=np.int64)
    cdef long long* d = &digits[0]
    cdef double complex acc = 0
    cdef double complex prod
    cdef long long c, local
    cdef int i, j, p
    with nogil:
        if start < stop:
            _set_digits(start, d, n, q)
        c = start
        while c < stop:
            prod = 1
            for i in range(m):
                local = 0
                for p in range(var_ptr[i], var_ptr[i + 1]):
                    local = local * q + d[var_idx[p]]
                prod = prod * weights[offsets[i] + local]
            acc = acc + prod
            c += 1
            # odometer increment, last variable fastest
            j = n - 1
            while j >= 0:
                d[j] += 1
                if d[j] < q:
                    break
                d[j] = 0
                j -= 1
    return acc


def phi_counts(const long long[::1] var_idx,
               const long long[::1] var_ptr,
               const long long[::1] modes,
               const long long[::1] strides,
               int n, long long q, long long start, long long stop,
               long long[::1] out):
    """Accumulate the composite qudit index of every configuration into ``out``."""
    cdef int m = strides.shape[0]
    cdef long long[::1] digits = np.zeros(max(n, 1), dtype=np.int64)
    cdef long long* d = &digits[0]
    cdef long long c, local, idx
    cdef int i, j, p
    with nogil:
        if start < stop:
            _set_digits(start, d, n, q)
        c = start
        while c < stop:
            idx = 0
            for i in range(m):
                local = 0
                if modes[i] == 1:
                    for p in range(var_ptr[i], var_ptr[i + 1]):
                        local += d[var_idx[p]]
                    local = local % q
                else:
                    for p in range(var_ptr[i], var_ptr[i + 1]):
                        local = local * q + d[var_idx[p]]
                idx += local * strides[i]
            out[idx] += 1
            c += 1
            j = n - 1
            while j >= 0:
                d[j] += 1
                if d[j] < q:
                    break
                d[j] = 0
                j -= 1


def fork_chain(unsigned char[::1] bits, long long[::1] rowcount, int cols,
               double p_add, double p_remove,
               const long long[::1] sites, const double[::1] uniforms,
               long long[::1] pops, long long[::1] codes, long long code):
    """Single-bit-flip Metropolis steps over a fork array, updated in place.

    Returns ``(accepted, popcount, code)`` after the last step.
    """
    cdef long long steps = sites.shape[0]
    cdef bint record = codes.shape[0] > 0
    cdef long long pop = 0
    cdef long long accepted = 0
    cdef long long t, k
    cdef int r
    cdef Py_ssize_t i
    for i in range(bits.shape[0]):
        pop += bits[i]
    with nogil:
        for t in range(steps):
            k = sites[t]
            r = <int>(k // cols)
            if bits[k]:
                if rowcount[r] > 1 and uniforms[t] < p_remove:
                    bits[k] = 0
                    rowcount[r] -= 1
                    pop -= 1
                    accepted += 1
                    if record:
                        code ^= (<long long>1) << k
            else:
                if uniforms[t] < p_add:
                    bits[k] = 1
                    rowcount[r] += 1
                    pop += 1
                    accepted += 1
                    if record:
                        code ^= (<long long>1) << k
            pops[t] = pop
            if record:
                codes[t] = code
    return accepted, pop, code
