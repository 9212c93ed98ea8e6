import numpy as np
import pytest

from spinq import kernels
from spinq.cdt import metropolis_sample
from spinq.model import CHUNK, partition_function_exact
from spinq.overlap import phi_state

from conftest import brute_z, random_model, rel_err

BOTH = pytest.mark.skipif(len(kernels.available_backends()) < 2, reason="compiled kernels not built")


def under(name, fn, *args, **kw):
    prev = kernels.use_backend(name)
    try:
        return fn(*args, **kw)
    finally:
        kernels.use_backend(prev)


def test_backend_switching():
    names = kernels.available_backends()
    assert "python" in names and kernels.backend_name() in names
    prev = kernels.use_backend("python")
    assert kernels.backend_name() == "python"
    kernels.use_backend(prev)
    with pytest.raises(ValueError):
        kernels.use_backend("gpu")


def test_each_backend_matches_brute_force(rng, backend):
    for _ in range(10):
        m = random_model(rng, n_max=6)
        assert rel_err(under(backend, partition_function_exact, m), brute_z(m)) <= 1e-12


@BOTH
def test_partition_sum_parity(rng):
    for _ in range(20):
        m = random_model(rng, n_max=9)
        assert under("compiled", partition_function_exact, m) == under("python", partition_function_exact, m)


@BOTH
def test_partition_sum_parity_across_chunks(rng):
    m = random_model(rng, n_max=2)
    while m.q ** m.n <= CHUNK:
        m = random_model(rng, n_max=18, q_choices=(2,))
    a = under("compiled", partition_function_exact, m, threads=3)
    assert a == under("python", partition_function_exact, m)


@BOTH
def test_raw_partition_sum_sub_range(rng):
    m = random_model(rng, n_max=6, q_choices=(3,))
    packed = m.packed()
    size = m.q ** m.n
    lo, hi = size // 3, size - 2
    a = under("compiled", kernels.partition_sum, *packed, m.n, m.q, lo, hi)
    b = under("python", kernels.partition_sum, *packed, m.n, m.q, lo, hi)
    assert a == b
    assert under("compiled", kernels.partition_sum, *packed, m.n, m.q, 5, 5) == 0


@BOTH
def test_phi_counts_parity(rng):
    for _ in range(20):
        m = random_model(rng, n_max=6, dense_bits=18)
        a = under("compiled", phi_state, m).amplitudes
        b = under("python", phi_state, m).amplitudes
        assert np.array_equal(a, b)


@BOTH
def test_fork_chain_parity():
    for rows, cols, lam in ((2, 2, 0.0), (3, 4, 0.5), (9, 9, -0.2)):
        a = under("compiled", metropolis_sample, rows, cols, lam, 30_000, 5, thin=500)
        b = under("python", metropolis_sample, rows, cols, lam, 30_000, 5, thin=500)
        assert a.samples == b.samples and a.final == b.final and a.histogram == b.histogram


@BOTH
def test_raw_fork_chain_rejects_emptying_a_row():
    for name in ("compiled", "python"):
        bits = np.array([1, 0, 0, 1], dtype=np.uint8)
        rowcount = np.array([1, 1], dtype=np.int64)
        sites = np.array([0, 3, 1, 0], dtype=np.int64)
        uniforms = np.zeros(4)
        pops = np.empty(4, dtype=np.int64)
        codes = np.empty(4, dtype=np.int64)
        acc, pop, code = under(name, kernels.fork_chain, bits, rowcount, 2, 1.0, 1.0, sites, uniforms, pops,
                               codes, 0b1001)
        # sites 0 and 3 are the only forks of their rows; site 1 is added, after which site 0 may go
        assert (acc, pop, code) == (2, 2, 0b1010)
        assert pops.tolist() == [2, 2, 3, 2]
        assert bits.tolist() == [0, 1, 0, 1] and rowcount.tolist() == [1, 1]


def test_benchmark_runs():
    import subprocess
    import sys
    from pathlib import Path
    script = Path(__file__).resolve().parent.parent / "benchmarks" / "bench_kernels.py"
    out = subprocess.run([sys.executable, str(script), "--quick", "--repeat", "1"], capture_output=True, text=True,
                         check=True).stdout
    assert "fork_chain" in out and "MISMATCH" not in out
