"""Time the compiled and pure-Python kernel backends on the same workloads.

    python benchmarks/bench_kernels.py [--repeat 3] [--quick]

Both backends produce bit-identical results; the script checks that too.
"""
import argparse
import time

import numpy as np

from spinq import kernels
from spinq.cdt import metropolis_sample
from spinq.model import SpinModel, ising_graph, partition_function_exact, potts_edge
from spinq.overlap import phi_state


def workloads(quick):
    rng = np.random.default_rng(0)
    n = 16 if quick else 20
    ring = ising_graph(n, [(i, (i + 1) % n) for i in range(n)] + [(i, (i + 5) % n) for i in range(0, n, 3)],
                       J=list(rng.normal(size=n + len(range(0, n, 3)))), h=list(rng.normal(size=n)),
                       beta=0.4 + 0.2j)
    plain_ring = ising_graph(n, [(i, (i + 1) % n) for i in range(n)])
    potts = SpinModel(10 if quick else 12, 3, [potts_edge(i, i + 1, 0.3 * (i + 1), 3) for i in range(9)], 0.7)
    steps = 2 * 10 ** 5 if quick else 2 * 10 ** 6
    return [
        (f"partition_sum  ising n={n}", lambda: partition_function_exact(ring)),
        (f"partition_sum  potts q=3 n={potts.n}", lambda: partition_function_exact(potts)),
        (f"phi_counts     ising ring n={n}", lambda: phi_state(plain_ring).amplitudes),
        (f"fork_chain     4x6, {steps} steps", lambda: metropolis_sample(4, 6, 0.3, steps, seed=1).samples),
    ]


def best_of(fn, repeat):
    times, out = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def same(a, b):
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    return a == b


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller workloads")
    args = ap.parse_args()
    backends = kernels.available_backends()
    if "compiled" not in backends:
        print("compiled kernels are not built; only the python backend is available")
    print(f"{'workload':40s}" + "".join(f"{b:>12s}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, fn in workloads(args.quick):
        times, outs = [], []
        for b in backends:
            prev = kernels.use_backend(b)
            try:
                t, out = best_of(fn, args.repeat)
            finally:
                kernels.use_backend(prev)
            times.append(t)
            outs.append(out)
        row = f"{name:40s}" + "".join(f"{t:11.4f}s" for t in times)
        if len(backends) > 1:
            row += f"{times[1] / times[0]:11.1f}x"
            if not same(outs[0], outs[1]):
                row += "  MISMATCH"
        print(row)


if __name__ == "__main__":
    main()
