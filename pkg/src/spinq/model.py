"""Classical spin models: interactions, energies, Boltzmann weights and exact Z.

Conventions
-----------
* Variables take values ``0 .. q-1``; configurations are enumerated
  lexicographically with variable 0 most significant (last variable fastest).
* An interaction table has shape ``(q,) * k`` and is indexed by the local
  configuration of its variables in the order they are listed.
* ``kind == "energy"`` tables hold energies ``h(s)`` and contribute
  ``exp(-beta * h(s))``; ``kind == "weight"`` tables hold Boltzmann weights
  directly and do not depend on ``beta`` (hard constraints, pinned boundaries,
  vertex weights with forbidden configurations).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from dataclasses import field as dc_field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import BadCouplingCount, HardConstraintPresent, IndexOutOfRange, InvalidModel, TooLarge

DEFAULT_ENUM_BITS = 24
CHUNK = 1 << 16


@dataclass(frozen=True, eq=False)
class Interaction:
    vars: tuple
    table: np.ndarray
    kind: str = "energy"
    tag: str = "table"
    params: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(int(v) for v in self.vars))
        object.__setattr__(self, "table", np.asarray(self.table, dtype=np.complex128))
        if self.kind not in ("energy", "weight"):
            raise InvalidModel(f"unknown interaction kind {self.kind!r}")
        if len(self.vars) < 1:
            raise InvalidModel("interaction arity must be >= 1")

    @property
    def arity(self) -> int:
        return len(self.vars)

    @property
    def hard(self) -> bool:
        return self.kind == "weight"

    def weights(self, beta: complex) -> np.ndarray:
        if self.kind == "weight":
            return self.table
        return np.exp(-beta * self.table)

    def replace(self, **changes) -> "Interaction":
        kw = dict(vars=self.vars, table=self.table, kind=self.kind, tag=self.tag, params=dict(self.params))
        kw.update(changes)
        return Interaction(**kw)


# -- interaction constructors -------------------------------------------------

def _sign_table(k: int) -> np.ndarray:
    """(-1)^(s_1 + ... + s_k) over {0,1}^k."""
    grids = np.indices((2,) * k).sum(axis=0)
    return np.where(grids % 2 == 0, 1.0, -1.0)


def ising_edge(a: int, b: int, J: complex) -> Interaction:
    """Energy ``-J (-1)^(s_a + s_b)``."""
    return Interaction((a, b), -complex(J) * _sign_table(2), tag="ising", params={"J": complex(J)})


def field(a: int, h: complex) -> Interaction:
    """Energy ``-h (-1)^(s_a)``."""
    return Interaction((a,), -complex(h) * _sign_table(1), tag="field", params={"h": complex(h)})


def ising_plaquette(vars: Sequence[int], K: complex) -> Interaction:
    """Z2 gauge plaquette ``-K (-1)^(sum of its edge spins)``; any arity."""
    return Interaction(tuple(vars), -complex(K) * _sign_table(len(vars)), tag="ising",
                       params={"J": complex(K)})


def potts_edge(a: int, b: int, J: complex, q: int) -> Interaction:
    """Energy ``-J delta(s_a, s_b)``."""
    return Interaction((a, b), -complex(J) * np.eye(q), tag="potts", params={"J": complex(J)})


def potts_field(a: int, h: complex, q: int) -> Interaction:
    """Energy ``-h delta(s_a, 0)``."""
    t = np.zeros(q, dtype=np.complex128)
    t[0] = -complex(h)
    return Interaction((a,), t, tag="potts", params={"h": complex(h)})


def energy_table(vars: Sequence[int], energies, q: int, tag: str = "table") -> Interaction:
    k = len(vars)
    arr = np.asarray(energies, dtype=np.complex128)
    if arr.size != q ** k:
        raise InvalidModel(f"energy table needs {q ** k} entries, got {arr.size}")
    return Interaction(tuple(vars), arr.reshape((q,) * k), tag=tag)


def weight_table(vars: Sequence[int], weights, q: int, tag: str = "table") -> Interaction:
    k = len(vars)
    arr = np.asarray(weights, dtype=np.complex128)
    if arr.size != q ** k:
        raise InvalidModel(f"weight table needs {q ** k} entries, got {arr.size}")
    return Interaction(tuple(vars), arr.reshape((q,) * k), kind="weight", tag=tag)


def equality_constraint(vars: Sequence[int], q: int) -> Interaction:
    """Hard constraint: weight 1 iff all listed variables are equal, else 0."""
    k = len(vars)
    t = np.zeros((q,) * k, dtype=np.complex128)
    for s in range(q):
        t[(s,) * k] = 1.0
    return Interaction(tuple(vars), t, kind="weight", tag="constraint-equal")


def pin(a: int, value: int, q: int) -> Interaction:
    """Hard constraint fixing ``s_a = value``."""
    t = np.zeros(q, dtype=np.complex128)
    t[value] = 1.0
    return Interaction((a,), t, kind="weight", tag="pin", params={"value": int(value)})


# -- model --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SpinModel:
    n: int
    q: int
    interactions: tuple
    beta: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "interactions", tuple(self.interactions))
        object.__setattr__(self, "beta", complex(self.beta))
        if self.n < 1:
            raise InvalidModel("a model needs at least one variable")
        if self.q < 2:
            raise InvalidModel("q must be >= 2")
        for idx, inter in enumerate(self.interactions):
            for v in inter.vars:
                if not 0 <= v < self.n:
                    raise IndexOutOfRange(f"interaction {idx} references variable {v} (n={self.n})",
                                          interaction=idx, variable=v)
            if inter.table.shape != (self.q,) * inter.arity:
                raise InvalidModel(f"interaction {idx} table shape {inter.table.shape} "
                                   f"does not match q={self.q}, arity={inter.arity}")

    def with_interactions(self, interactions: Iterable[Interaction], n: int | None = None) -> "SpinModel":
        return SpinModel(self.n if n is None else n, self.q, tuple(interactions), self.beta)

    def with_beta(self, beta: complex) -> "SpinModel":
        return SpinModel(self.n, self.q, self.interactions, beta)

    def weight_tables(self) -> list:
        return [inter.weights(self.beta) for inter in self.interactions]

    def packed(self):
        """Flattened weights and index arrays in the layout the kernels expect."""
        tables = self.weight_tables()
        sizes = [t.size for t in tables]
        offsets = np.zeros(len(tables), dtype=np.int64)
        if tables:
            offsets[1:] = np.cumsum(sizes)[:-1]
            weights = np.ascontiguousarray(np.concatenate([t.ravel() for t in tables]))
        else:
            weights = np.zeros(1, dtype=np.complex128)
        var_ptr = np.zeros(len(tables) + 1, dtype=np.int64)
        var_ptr[1:] = np.cumsum([inter.arity for inter in self.interactions])
        var_idx = np.array([v for inter in self.interactions for v in inter.vars] or [0], dtype=np.int64)
        return weights, offsets, var_idx, var_ptr


def _check_config(model: SpinModel, config) -> tuple:
    s = tuple(int(x) for x in config)
    if len(s) != model.n:
        raise IndexOutOfRange(f"configuration has length {len(s)}, model has {model.n} variables")
    for v, x in enumerate(s):
        if not 0 <= x < model.q:
            raise IndexOutOfRange(f"variable {v} has value {x} outside [0, {model.q})", variable=v)
    return s


def evaluate_energy(model: SpinModel, config) -> complex:
    s = _check_config(model, config)
    for idx, inter in enumerate(model.interactions):
        if inter.hard:
            raise HardConstraintPresent(f"interaction {idx} stores weights, not energies", interaction=idx)
    total = 0j
    for inter in model.interactions:
        total += inter.table[tuple(s[v] for v in inter.vars)]
    return total


def config_weight(model: SpinModel, config) -> complex:
    s = _check_config(model, config)
    w = 1 + 0j
    for table, inter in zip(model.weight_tables(), model.interactions):
        w *= table[tuple(s[v] for v in inter.vars)]
    return complex(w)


def check_enumerable(n: int, q: int, cap_bits: int) -> int:
    size = q ** n
    if size > 2 ** cap_bits:
        raise TooLarge(f"q^n = {q}^{n} exceeds the enumeration cap of 2^{cap_bits}",
                       bits=n * math.log2(q), cap_bits=cap_bits)
    return size


def chunk_ranges(size: int, chunk: int = CHUNK):
    return [(lo, min(lo + chunk, size)) for lo in range(0, size, chunk)]


def partition_function_exact(model: SpinModel, cap_bits: int = DEFAULT_ENUM_BITS, threads: int = 1) -> complex:
    """Sum of Boltzmann weights over all ``q**n`` configurations.

    The configuration space is cut into fixed lexicographic chunks of
    ``CHUNK`` configurations. Each chunk is summed sequentially and the chunk
    partials are added in chunk order, so the result is bit-identical for any
    ``threads``.
    """
    size = check_enumerable(model.n, model.q, cap_bits)
    weights, offsets, var_idx, var_ptr = model.packed()
    ranges = chunk_ranges(size)

    def run(r):
        return kernels.partition_sum(weights, offsets, var_idx, var_ptr, model.n, model.q, r[0], r[1])

    if threads > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(run, ranges))
    else:
        partials = [run(r) for r in ranges]
    total = 0j
    for p in partials:
        total += p
    return total


def relabel(model: SpinModel, perm: Sequence[int]) -> SpinModel:
    """Rename variable ``v`` to ``perm[v]``."""
    return model.with_interactions(inter.replace(vars=tuple(perm[v] for v in inter.vars))
                                   for inter in model.interactions)


def ising_graph(n: int, edges: Sequence, J=1.0, h=None, beta: complex = 1.0, with_fields: bool = False) -> SpinModel:
    """Ising model on a graph: edge interactions first, then one field per vertex.

    ``J`` and ``h`` are scalars or per-edge / per-vertex sequences. Fields are
    emitted when ``h`` is given or ``with_fields`` is set (``h = 0`` then).
    """
    edges = [tuple(e) for e in edges]
    Js = [J] * len(edges) if np.isscalar(J) else list(J)
    if len(Js) != len(edges):
        raise BadCouplingCount(f"{len(edges)} edges but {len(Js)} couplings")
    inters = [ising_edge(a, b, j) for (a, b), j in zip(edges, Js)]
    if h is not None or with_fields:
        hs = [0.0 if h is None else h] * n if (h is None or np.isscalar(h)) else list(h)
        if len(hs) != n:
            raise BadCouplingCount(f"{n} vertices but {len(hs)} fields")
        inters += [field(a, x) for a, x in enumerate(hs)]
    return SpinModel(n, 2, inters, beta)
