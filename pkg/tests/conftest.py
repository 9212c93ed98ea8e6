import itertools
import math

import numpy as np
import pytest

from spinq import kernels
from spinq.model import (SpinModel, energy_table, equality_constraint, field, ising_edge, potts_edge,
                         potts_field, weight_table)


def brute_z(model):
    """Plain nested-loop partition function, independent of the chunked kernels."""
    tables = model.weight_tables()
    total = 0j
    for s in itertools.product(range(model.q), repeat=model.n):
        w = 1 + 0j
        for inter, t in zip(model.interactions, tables):
            w *= t[tuple(s[v] for v in inter.vars)]
        total += w
    return total


def rel_err(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def crand(rng, scale=1.0, size=None):
    return scale * (rng.normal(size=size) + 1j * rng.normal(size=size))


def random_model(rng, n_max=6, q_choices=(2, 3), dense_bits=22, max_inter=8, hard=True):
    """Random model mixing Ising, Potts, table and constraint interactions, within the dense cap."""
    q = int(rng.choice(q_choices))
    n = int(rng.integers(1, n_max + 1))
    beta = complex(rng.uniform(0.1, 1.0), rng.uniform(-0.5, 0.5))
    inters, bits = [], 0.0
    for _ in range(int(rng.integers(0, max_inter + 1))):
        k = int(rng.integers(1, min(3, n) + 1))
        vars_ = [int(v) for v in rng.choice(n, size=k, replace=False)]
        kinds = ["table"]
        if q == 2:
            kinds += ["ising"] if k == 2 else ["field"] if k == 1 else []
        else:
            kinds += ["potts"] if k <= 2 else []
        if hard and k >= 2:
            kinds.append("equal")
        kind = kinds[int(rng.integers(len(kinds)))]
        if kind == "ising":
            inter = ising_edge(*vars_, crand(rng, 0.5))
        elif kind == "field":
            inter = field(vars_[0], crand(rng, 0.5))
        elif kind == "potts":
            inter = potts_edge(*vars_, crand(rng, 0.5), q) if k == 2 else potts_field(vars_[0], crand(rng, 0.5), q)
        elif kind == "equal":
            inter = equality_constraint(vars_, q)
        elif hard and rng.random() < 0.2:
            inter = weight_table(vars_, crand(rng, 1.0, q ** k), q)
        else:
            inter = energy_table(vars_, crand(rng, 0.5, q ** k), q)
        cost = math.log2(2 if (q == 2 and k == 2 and inter.tag in ("ising", "constraint-equal")) else q ** k)
        if bits + cost > dense_bits:
            break
        bits += cost
        inters.append(inter)
    return SpinModel(n, q, inters, beta)


def random_graph(rng, n, p=0.5):
    return [(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < p]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    previous = kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(previous)
