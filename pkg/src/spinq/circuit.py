"""Layered gate circuits over q-level wires and their dense contraction.

Gates need not be unitary. Within a layer gates act on disjoint wires and are
stored sorted by their target tuple, so the order in which they were listed
never changes a contraction result.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BadDimensions, PeriodicUnsupported, TooWide

DEFAULT_MAX_WIDTH = 22
DEFAULT_MAX_PERIODIC_WIDTH = 14
_TRACE_BATCH = 256


@dataclass(frozen=True, eq=False)
class Gate:
    targets: tuple
    matrix: np.ndarray
    diagonal: bool = False

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        mat = np.asarray(self.matrix, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise BadDimensions(f"gate matrix must be square, got shape {mat.shape}")
        if self.diagonal and np.count_nonzero(mat - np.diag(np.diag(mat))):
            raise BadDimensions("gate flagged diagonal has non-zero off-diagonal entries")
        if len(set(self.targets)) != len(self.targets):
            raise BadDimensions(f"repeated target in {self.targets}")
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def from_diagonal(cls, targets, diag) -> "Gate":
        return cls(targets, np.diag(np.asarray(diag, dtype=np.complex128).ravel()), diagonal=True)

    def scaled(self, factor: complex) -> "Gate":
        return Gate(self.targets, self.matrix * factor, self.diagonal)


@dataclass(frozen=True)
class Boundary:
    kind: str = "open"
    left: tuple | None = None
    right: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("fixed", "open", "periodic"):
            raise BadDimensions(f"unknown boundary kind {self.kind!r}")
        if self.kind == "fixed":
            if self.left is None or self.right is None:
                raise BadDimensions("fixed boundary needs left and right strings")
            object.__setattr__(self, "left", tuple(int(x) for x in self.left))
            object.__setattr__(self, "right", tuple(int(x) for x in self.right))


@dataclass(frozen=True, eq=False)
class Circuit:
    width: int
    q: int
    layers: tuple
    boundary: Boundary = field(default_factory=Boundary)

    def __post_init__(self):
        layers = []
        for li, layer in enumerate(self.layers):
            used = set()
            for g in layer:
                k = len(g.targets)
                if g.matrix.shape[0] != self.q ** k:
                    raise BadDimensions(f"layer {li}: gate on {g.targets} has dimension "
                                        f"{g.matrix.shape[0]}, expected {self.q ** k}")
                for t in g.targets:
                    if not 0 <= t < self.width:
                        raise BadDimensions(f"layer {li}: target {t} outside width {self.width}")
                    if t in used:
                        raise BadDimensions(f"layer {li}: wire {t} used by two gates")
                    used.add(t)
            layers.append(tuple(sorted(layer, key=lambda g: g.targets)))
        object.__setattr__(self, "layers", tuple(layers))
        b = self.boundary
        if b.kind == "fixed":
            for name, s in (("left", b.left), ("right", b.right)):
                if len(s) != self.width or any(not 0 <= x < self.q for x in s):
                    raise BadDimensions(f"{name} boundary {s} invalid for width {self.width}, q={self.q}")

    @property
    def gates(self):
        return [g for layer in self.layers for g in layer]

    def with_boundary(self, boundary: Boundary) -> "Circuit":
        return Circuit(self.width, self.q, self.layers, boundary)

    def with_layers(self, layers) -> "Circuit":
        return Circuit(self.width, self.q, tuple(layers), self.boundary)


def then(first: Circuit, second: Circuit, boundary: Boundary | None = None) -> Circuit:
    """Circuit applying ``first`` and then ``second``."""
    if first.width != second.width or first.q != second.q:
        raise BadDimensions("composed circuits must share width and q")
    return Circuit(first.width, first.q, first.layers + second.layers, boundary or first.boundary)


def apply_gate(t: np.ndarray, gate: Gate, q: int) -> np.ndarray:
    """Apply ``gate`` to a tensor whose first axes are the wires (extra trailing axes are batch)."""
    k = len(gate.targets)
    tg = list(gate.targets)
    if gate.diagonal:
        d = np.diag(gate.matrix).reshape((q,) * k)
        moved = np.moveaxis(t, tg, range(k))
        moved = moved * d.reshape(d.shape + (1,) * (moved.ndim - k))
        return np.moveaxis(moved, range(k), tg)
    m = gate.matrix.reshape((q,) * (2 * k))
    out = np.tensordot(m, t, axes=(list(range(k, 2 * k)), tg))
    return np.moveaxis(out, range(k), tg)


def propagate(circuit: Circuit, state: np.ndarray) -> np.ndarray:
    """Push a state (shape ``(q**width,)`` or ``(q**width, batch)``) through every layer."""
    q, w = circuit.q, circuit.width
    batch = state.shape[1:] if state.ndim > 1 else ()
    t = np.asarray(state, dtype=np.complex128).reshape((q,) * w + batch)
    for layer in circuit.layers:
        for g in layer:
            t = apply_gate(t, g, q)
    return t.reshape((q ** w,) + batch)


def basis_index(s: Sequence[int], q: int) -> int:
    idx = 0
    for x in s:
        idx = idx * q + int(x)
    return idx


def check_width(circuit: Circuit, max_width: int):
    if circuit.q ** circuit.width > 2 ** max_width:
        raise TooWide(f"{circuit.width} wires of dimension {circuit.q} exceed the cap of 2^{max_width} amplitudes",
                      width=circuit.width)


def contract(circuit: Circuit, max_width: int = DEFAULT_MAX_WIDTH,
             max_periodic_width: int = DEFAULT_MAX_PERIODIC_WIDTH, threads: int = 1) -> complex:
    """``<L|C|R>`` (fixed), ``<+|C|+>`` with unnormalized caps (open) or ``tr C`` (periodic)."""
    q, w = circuit.q, circuit.width
    b = circuit.boundary
    if b.kind == "periodic":
        check_width(circuit, max_periodic_width)
        return trace(circuit, threads=threads)
    check_width(circuit, max_width)
    if b.kind == "fixed":
        psi = np.zeros(q ** w, dtype=np.complex128)
        psi[basis_index(b.right, q)] = 1.0
        out = propagate(circuit, psi)
        return complex(out[basis_index(b.left, q)])
    out = propagate(circuit, np.ones(q ** w, dtype=np.complex128))
    return complex(out.sum())


def trace(circuit: Circuit, threads: int = 1) -> complex:
    """Trace by a sweep over computational basis inputs, batched, reduced in basis order."""
    dim = circuit.q ** circuit.width
    ranges = [(lo, min(lo + _TRACE_BATCH, dim)) for lo in range(0, dim, _TRACE_BATCH)]

    def run(r):
        lo, hi = r
        block = np.zeros((dim, hi - lo), dtype=np.complex128)
        block[np.arange(lo, hi), np.arange(hi - lo)] = 1.0
        out = propagate(circuit, block)
        return out[np.arange(lo, hi), np.arange(hi - lo)]

    if threads > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            diags = list(pool.map(run, ranges))
    else:
        diags = [run(r) for r in ranges]
    total = 0j
    for d in diags:
        for x in d:
            total += x
    return total


def amplitude(circuit: Circuit, left: np.ndarray, right: np.ndarray) -> complex:
    """Bilinear ``left^T C right`` for arbitrary (dense) boundary vectors."""
    if circuit.boundary.kind == "periodic":
        raise PeriodicUnsupported("amplitude needs explicit boundary vectors")
    out = propagate(circuit, np.asarray(right, dtype=np.complex128))
    return complex(np.asarray(left, dtype=np.complex128) @ out)
