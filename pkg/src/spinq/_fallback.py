"""Pure-Python/numpy versions of the compiled kernels in ``_kernels.pyx``.

Signatures and semantics match the compiled module one-to-one; the test-suite
runs both against each other.
"""
import numpy as np


def _digits(start, stop, n, q):
    c = np.arange(start, stop, dtype=np.int64)
    out = np.empty((n, c.size), dtype=np.int64)
    for j in range(n - 1, -1, -1):
        out[j] = c % q
        c = c // q
    return out


def _cmul(a, b):
    # numpy's SIMD complex multiply may fuse multiply-adds; separate real ops round like the C loop
    out = np.empty_like(a)
    out.real = a.real * b.real - a.imag * b.imag
    out.imag = a.real * b.imag + a.imag * b.real
    return out


def partition_sum(weights, offsets, var_idx, var_ptr, n, q, start, stop):
    if stop <= start:
        return 0j
    d = _digits(start, stop, n, q)
    prod = np.ones(stop - start, dtype=np.complex128)
    for i in range(len(offsets)):
        local = np.zeros(stop - start, dtype=np.int64)
        for p in range(var_ptr[i], var_ptr[i + 1]):
            local = local * q + d[var_idx[p]]
        prod = _cmul(prod, weights[offsets[i] + local])
    # cumsum is a strictly sequential reduction, matching the compiled loop
    return complex(np.cumsum(prod)[-1])


def phi_counts(var_idx, var_ptr, modes, strides, n, q, start, stop, out):
    if stop <= start:
        return
    d = _digits(start, stop, n, q)
    idx = np.zeros(stop - start, dtype=np.int64)
    for i in range(len(strides)):
        local = np.zeros(stop - start, dtype=np.int64)
        if modes[i] == 1:
            for p in range(var_ptr[i], var_ptr[i + 1]):
                local = local + d[var_idx[p]]
            local %= q
        else:
            for p in range(var_ptr[i], var_ptr[i + 1]):
                local = local * q + d[var_idx[p]]
        idx += local * strides[i]
    np.add.at(out, idx, 1)


def fork_chain(bits, rowcount, cols, p_add, p_remove, sites, uniforms, pops, codes, code):
    record = codes.shape[0] > 0
    pop = int(bits.sum())
    accepted = 0
    b = bits.tolist()
    rc = rowcount.tolist()
    site_list = sites.tolist()
    u_list = uniforms.tolist()
    pop_out = [0] * len(site_list)
    code_out = [0] * len(site_list) if record else None
    for t, k in enumerate(site_list):
        r = k // cols
        if b[k]:
            if rc[r] > 1 and u_list[t] < p_remove:
                b[k] = 0
                rc[r] -= 1
                pop -= 1
                accepted += 1
                if record:
                    code ^= 1 << k
        elif u_list[t] < p_add:
            b[k] = 1
            rc[r] += 1
            pop += 1
            accepted += 1
            if record:
                code ^= 1 << k
        pop_out[t] = pop
        if record:
            code_out[t] = code
    bits[:] = b
    rowcount[:] = rc
    pops[:] = pop_out
    if record:
        codes[:] = code_out
    return accepted, pop, code
