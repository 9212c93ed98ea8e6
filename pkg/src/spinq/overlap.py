"""Partition functions as the pairing of two unnormalized states.

``phi_state`` places one qudit per interaction and sums, over all spin
configurations, the product basis state of the local configurations.
``alpha_covector`` is the product covector whose local coefficients are the
Boltzmann weights. Their bilinear pairing is ``Z``.

Two-level Ising-type interactions (and two-level equality constraints) only
depend on the parity of their spins, so their qudit is a qubit holding
``s_1 + ... + s_k mod 2``; every other interaction gets a ``q**k`` qudit
holding the composite local configuration (last variable fastest).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .errors import DimensionMismatch, IndexOutOfRange, TooLarge, WrongFamily
from .model import CHUNK, DEFAULT_ENUM_BITS, SpinModel, check_enumerable, chunk_ranges

DEFAULT_DENSE_CAP = 2 ** 22

Y_COVECTOR = np.array([1.0, -1.0j])  # <0_Y| = <0| - i<1|
PARITY_TAGS = ("ising", "constraint-equal")


@dataclass(frozen=True, eq=False)
class StateVector:
    qudit_dims: tuple
    amplitudes: np.ndarray
    labels: tuple  # originating interaction index of each qudit

    def __post_init__(self):
        object.__setattr__(self, "qudit_dims", tuple(int(d) for d in self.qudit_dims))
        object.__setattr__(self, "amplitudes", np.asarray(self.amplitudes, dtype=np.complex128).ravel())
        object.__setattr__(self, "labels", tuple(self.labels))
        if self.amplitudes.size != int(np.prod(self.qudit_dims, dtype=np.int64)):
            raise DimensionMismatch(f"{self.amplitudes.size} amplitudes for dims {self.qudit_dims}")

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.qudit_dims)


@dataclass(frozen=True, eq=False)
class ProductCovector:
    coefficients: tuple  # one 1-D complex array per qudit

    def __post_init__(self):
        object.__setattr__(self, "coefficients",
                           tuple(np.asarray(c, dtype=np.complex128).ravel() for c in self.coefficients))

    @property
    def dims(self) -> tuple:
        return tuple(c.size for c in self.coefficients)


def _is_parity_qudit(inter, q: int) -> bool:
    if q != 2 or inter.tag not in PARITY_TAGS:
        return False
    parity = np.indices(inter.table.shape).sum(axis=0) % 2
    t = inter.table
    even, odd = t[parity == 0], t[parity == 1]
    return bool(np.all(even == even[0]) and (odd.size == 0 or np.all(odd == odd[0])))


def qudit_layout(model: SpinModel):
    """Per interaction: (mode, dim). Mode 1 is the parity qubit, mode 0 the full qudit."""
    out = []
    for inter in model.interactions:
        if _is_parity_qudit(inter, model.q):
            out.append((1, 2))
        else:
            out.append((0, model.q ** inter.arity))
    return out


def phi_state(model: SpinModel, dense_cap: int = DEFAULT_DENSE_CAP,
              cap_bits: int = DEFAULT_ENUM_BITS) -> StateVector:
    """Dense ``sum_s (x)_i |s^(i)>`` built by enumerating every configuration.

    A model without interactions gives the zero-qudit scalar ``q**n``.
    """
    size = check_enumerable(model.n, model.q, cap_bits)
    layout = qudit_layout(model)
    dims = tuple(d for _, d in layout)
    total = int(np.prod(dims, dtype=np.int64)) if dims else 1
    if total > dense_cap:
        raise TooLarge(f"phi state needs {total} amplitudes, cap is {dense_cap}")
    strides = np.ones(len(dims), dtype=np.int64)
    for i in range(len(dims) - 2, -1, -1):
        strides[i] = strides[i + 1] * dims[i + 1]
    modes = np.array([mode for mode, _ in layout] or [0], dtype=np.int64)[: len(dims)]
    var_ptr = np.zeros(len(dims) + 1, dtype=np.int64)
    var_ptr[1:] = np.cumsum([inter.arity for inter in model.interactions])
    var_idx = np.array([v for inter in model.interactions for v in inter.vars] or [0], dtype=np.int64)
    counts = np.zeros(total, dtype=np.int64)
    for lo, hi in chunk_ranges(size, CHUNK):
        kernels.phi_counts(var_idx, var_ptr, np.ascontiguousarray(modes), strides,
                           model.n, model.q, lo, hi, counts)
    return StateVector(dims, counts.astype(np.complex128), tuple(range(len(dims))))


def alpha_covector(model: SpinModel) -> ProductCovector:
    coeffs = []
    for (mode, _), w in zip(qudit_layout(model), model.weight_tables()):
        if mode == 1:
            flat = w.ravel()
            # index 0 is the all-zero configuration, index q**(k-1) flips only the first spin
            coeffs.append(np.array([flat[0], flat[w.size // 2]]))
        else:
            coeffs.append(w.ravel().copy())
    return ProductCovector(coeffs)


def pair(alpha: ProductCovector, phi: StateVector) -> complex:
    """Bilinear pairing ``<alpha|phi>`` without complex conjugation."""
    if alpha.dims != phi.qudit_dims:
        raise DimensionMismatch(f"covector dims {alpha.dims} vs state dims {phi.qudit_dims}")
    t = phi.tensor()
    for c in reversed(alpha.coefficients):
        t = t @ c
    return complex(t)


def project(phi: StateVector, gamma: Mapping[int, Sequence[complex]]) -> StateVector:
    """Contract the qudits listed in ``gamma`` with the given coefficient vectors.

    Returns ``(I (x) <gamma|) |phi>`` on the remaining qudits, in their original order.
    """
    m = len(phi.qudit_dims)
    vecs = {}
    for idx, vec in gamma.items():
        idx = int(idx)
        if not 0 <= idx < m:
            raise IndexOutOfRange(f"qudit {idx} out of range for {m} qudits", qudit=idx)
        v = np.asarray(vec, dtype=np.complex128).ravel()
        if v.size != phi.qudit_dims[idx]:
            raise DimensionMismatch(f"qudit {idx} has dimension {phi.qudit_dims[idx]}, got vector of {v.size}")
        vecs[idx] = v
    t = phi.tensor()
    for idx in sorted(vecs, reverse=True):
        t = np.tensordot(t, vecs[idx], axes=([idx], [0]))
    keep = [i for i in range(m) if i not in vecs]
    return StateVector(tuple(phi.qudit_dims[i] for i in keep), np.asarray(t).ravel(),
                       tuple(phi.labels[i] for i in keep))


# -- Ising-with-fields structure ----------------------------------------------

def ising_structure(model: SpinModel):
    """Split an Ising-with-fields model into ``(edges, field_qudit_of_vertex)``.

    ``edges`` is a list of ``(qudit, a, b)``. Raises ``WrongFamily`` unless every
    interaction is a two-body Ising edge or a one-body field and each vertex has
    exactly one field.
    """
    if model.q != 2:
        raise WrongFamily("stabilizer structure needs q = 2")
    edges, field_of = [], {}
    for i, inter in enumerate(model.interactions):
        if inter.tag == "ising" and inter.arity == 2 and inter.vars[0] != inter.vars[1]:
            edges.append((i, *inter.vars))
        elif inter.tag == "field" and inter.arity == 1:
            a = inter.vars[0]
            if a in field_of:
                raise WrongFamily(f"vertex {a} has more than one field")
            field_of[a] = i
        else:
            raise WrongFamily(f"interaction {i} ({inter.tag}, arity {inter.arity}) is not an Ising edge or field")
    if len(field_of) != model.n:
        raise WrongFamily("every vertex needs exactly one field interaction")
    return edges, field_of


def check_stabilizers(model: SpinModel, phi: StateVector) -> bool:
    """True iff every generator ``X_a (x)_{b~a} X_ab`` and ``Z_ab Z_a Z_b`` fixes ``phi`` exactly."""
    edges, field_of = ising_structure(model)
    if phi.qudit_dims != (2,) * len(model.interactions):
        raise DimensionMismatch("phi does not match the model's qubit layout")
    t = phi.tensor()
    m = t.ndim
    for a in range(model.n):
        axes = [field_of[a]] + [e for e, x, y in edges if a in (x, y)]
        if not np.array_equal(np.flip(t, axis=axes), t):
            return False
    for e, a, b in edges:
        idx = np.indices((2,) * m)
        sign = (-1.0) ** (idx[e] + idx[field_of[a]] + idx[field_of[b]])
        if not np.array_equal(sign * t, t):
            return False
    return True


def project_edges_y(model: SpinModel, phi: StateVector) -> StateVector:
    """Project every Ising edge qubit of ``phi`` onto ``<0_Y|``; leaves the vertex qubits."""
    edges, _ = ising_structure(model)
    return project(phi, {e: Y_COVECTOR for e, _, _ in edges})


def vertex_phase_correction(model: SpinModel, state: StateVector) -> StateVector:
    """Apply ``diag(1, i**deg(a))`` to each remaining vertex qubit."""
    edges, field_of = ising_structure(model)
    deg = np.zeros(model.n, dtype=int)
    for _, a, b in edges:
        deg[a] += 1
        deg[b] += 1
    vertex_of = {q: a for a, q in field_of.items()}
    t = state.tensor().copy()
    for axis, label in enumerate(state.labels):
        a = vertex_of[label]
        shape = [1] * t.ndim
        shape[axis] = 2
        t = t * np.array([1.0, 1j ** deg[a]]).reshape(shape)
    return StateVector(state.qudit_dims, t.ravel(), state.labels)
