"""Lattice models that map to circuits: vertex models, edge models, 3D Z2 gauge theory.

Every lattice builds both its circuit (``to_circuit``) and the equivalent
:class:`~spinq.model.SpinModel` (``to_model``), whose exact partition function
is the reference for the contraction.

Time runs from the circuit input (the ``right`` boundary string) to its
output (``left``). With ``fixed`` boundaries the first and last time slices are
pinned to ``right`` and ``left``; with ``open`` boundaries they are summed
freely; with ``periodic`` boundaries the last slice connects back to the first.
Coupling arrays are stored time-major, then in spatial order.

Layer conventions:

* vertex model: brick pattern; layer ``d`` acts on wire pairs ``(p, p+1)`` with
  ``p = d % 2, d % 2 + 2, ...``; gate rows are ``(out_p, out_p+1)``, columns
  ``(in_p, in_p+1)``.
* edge model: per time column, its field gates, then its vertical edges
  (greedily packed into disjoint layers), then the horizontal edges leaving the
  column. Boundary columns keep their vertical edges.
* gauge theory: per time slice, all space-like plaquette gates, then the
  time-like single-wire gates advancing to the next slice.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .circuit import Boundary, Circuit, Gate
from .errors import BadCouplingCount, BadDimensions
from .model import Interaction, SpinModel, pin, weight_table

# (out_i, out_j, in_k, in_l) support of each six-vertex weight; s = 0 is an arrow along time
SIX_VERTEX_CONFIGS = {
    "a1": (0, 0, 0, 0),
    "a2": (1, 1, 1, 1),
    "b1": (0, 1, 0, 1),
    "b2": (1, 0, 1, 0),
    "c1": (1, 0, 0, 1),
    "c2": (0, 1, 1, 0),
}


def pack_layers(target_sets: Sequence[Sequence[int]]) -> list:
    """Greedy first-fit assignment of gates to layers with disjoint wires."""
    layers, used = [], []
    for idx, targets in enumerate(target_sets):
        for li, u in enumerate(used):
            if not u.intersection(targets):
                layers[li].append(idx)
                u.update(targets)
                break
        else:
            layers.append([idx])
            used.append(set(targets))
    return layers


def _boundary_strings(boundary: Boundary, width: int):
    if boundary.kind == "fixed" and (len(boundary.left) != width or len(boundary.right) != width):
        raise BadDimensions(f"boundary strings must have length {width}")


def _as_tables(values, shape, name):
    arr = np.asarray(values, dtype=np.complex128)
    if arr.shape != shape:
        if arr.size == int(np.prod(shape)):
            return arr.reshape(shape)
        raise BadCouplingCount(f"{name}: expected shape {shape}, got {arr.shape}")
    return arr


def _couplings(value, count, name):
    if np.isscalar(value):
        return np.full(count, complex(value))
    arr = np.asarray(value, dtype=np.complex128).ravel()
    if arr.size != count:
        raise BadCouplingCount(f"{name}: expected {count} couplings, got {arr.size}")
    return arr


def _ising_pair_energy(J):
    sign = np.array([[1.0, -1.0], [-1.0, 1.0]])
    return -J[..., None, None] * sign


def _ising_plaquette_energy(K):
    sign = np.where(np.indices((2, 2, 2, 2)).sum(axis=0) % 2 == 0, 1.0, -1.0)
    return -K[..., None, None, None, None] * sign


# -- vertex model ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class VertexLattice:
    """Tilted square lattice: wires are edges, each gate is a four-edge vertex."""
    width: int
    depth: int
    weights: np.ndarray  # (n_vertices, q, q, q, q) Boltzmann weights
    q: int = 2
    boundary: Boundary = field(default_factory=Boundary)

    def __post_init__(self):
        if self.width < 2 or self.depth < 1:
            raise BadDimensions("vertex lattice needs width >= 2 and depth >= 1")
        q = self.q
        nv = len(self.vertices())
        object.__setattr__(self, "weights", _as_tables(self.weights, (nv, q, q, q, q), "vertex weights"))
        _boundary_strings(self.boundary, self.width)

    def vertices(self):
        """``(layer, p)`` for every vertex, layer-major."""
        return [(d, p) for d in range(self.depth) for p in range(d % 2, self.width - 1, 2)]

    @classmethod
    def six_vertex(cls, width, depth, weights, boundary=None):
        """Six-vertex model with homogeneous weights ``(a1, a2, b1, b2, c1, c2)`` (or a dict)."""
        if isinstance(weights, dict):
            w = [weights[k] for k in SIX_VERTEX_CONFIGS]
        else:
            w = list(weights)
        if len(w) != 6:
            raise BadCouplingCount(f"six-vertex needs 6 weights, got {len(w)}")
        table = np.zeros((2, 2, 2, 2), dtype=np.complex128)
        for value, cfg in zip(w, SIX_VERTEX_CONFIGS.values()):
            table[cfg] = value
        nv = len([(d, p) for d in range(depth) for p in range(d % 2, width - 1, 2)])
        return cls(width, depth, np.broadcast_to(table, (nv, 2, 2, 2, 2)).copy(), 2, boundary or Boundary())

    @classmethod
    def from_energies(cls, width, depth, energies, beta, q=2, boundary=None):
        return cls(width, depth, np.exp(-complex(beta) * np.asarray(energies, dtype=np.complex128)),
                   q, boundary or Boundary())

    def _segments(self):
        """Variable ids of wire segments: (input ids, per-vertex (out_p, out_p1, in_p, in_p1), output ids)."""
        n = self.width
        gates_on = [0] * n
        for _, p in self.vertices():
            gates_on[p] += 1
            gates_on[p + 1] += 1
        current = list(range(n))
        seen = [0] * n
        next_id = n
        per_vertex = []
        periodic = self.boundary.kind == "periodic"
        for _, p in self.vertices():
            ins = (current[p], current[p + 1])
            outs = []
            for wire in (p, p + 1):
                seen[wire] += 1
                if periodic and seen[wire] == gates_on[wire]:
                    outs.append(wire)  # last segment closes onto the first
                else:
                    outs.append(next_id)
                    next_id += 1
            current[p], current[p + 1] = outs
            per_vertex.append((outs[0], outs[1], ins[0], ins[1]))
        return list(range(n)), per_vertex, list(current), next_id

    def to_model(self) -> SpinModel:
        inputs, per_vertex, outputs, nvars = self._segments()
        inters = [weight_table(vs, w, self.q, tag="vertex") for vs, w in zip(per_vertex, self.weights)]
        if self.boundary.kind == "fixed":
            inters += [pin(v, x, self.q) for v, x in zip(inputs, self.boundary.right)]
            inters += [pin(v, x, self.q) for v, x in zip(outputs, self.boundary.left)]
        return SpinModel(nvars, self.q, inters, 1.0)

    def to_circuit(self) -> Circuit:
        q = self.q
        layers = [[] for _ in range(self.depth)]
        for (d, p), w in zip(self.vertices(), self.weights):
            layers[d].append(Gate((p, p + 1), w.reshape(q * q, q * q)))
        return Circuit(self.width, q, tuple(layers), self.boundary)


# -- edge model -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class EdgeLattice:
    """Square lattice with spins on vertices: ``sites`` wires evolved over ``columns`` time steps.

    ``horizontal[t, i]`` is the energy table ``h(s_{t+1,i}, s_{t,i})`` of the
    time-like edge leaving column ``t``; ``vertical[t, i]`` is ``h(s_{t,i}, s_{t,i+1})``;
    ``fields[t, i]`` is the one-body table of site ``(t, i)``.
    """
    sites: int
    columns: int
    beta: complex
    horizontal: np.ndarray
    vertical: np.ndarray
    fields: np.ndarray | None = None
    q: int = 2
    boundary: Boundary = field(default_factory=Boundary)

    def __post_init__(self):
        n, T, q = self.sites, self.columns, self.q
        if n < 1 or T < 1:
            raise BadDimensions("edge lattice needs sites >= 1 and columns >= 1")
        object.__setattr__(self, "beta", complex(self.beta))
        object.__setattr__(self, "horizontal", _as_tables(self.horizontal, (self.n_horizontal, n, q, q), "horizontal"))
        object.__setattr__(self, "vertical", _as_tables(self.vertical, (T, max(n - 1, 0), q, q), "vertical"))
        if self.fields is not None:
            object.__setattr__(self, "fields", _as_tables(self.fields, (T, n, q), "fields"))
        _boundary_strings(self.boundary, n)

    @property
    def n_horizontal(self) -> int:
        return self.columns if self.boundary.kind == "periodic" else self.columns - 1

    @classmethod
    def ising(cls, sites, columns, J_h, J_v, h=None, beta=1.0, boundary=None):
        boundary = boundary or Boundary()
        nh = columns if boundary.kind == "periodic" else columns - 1
        jh = _couplings(J_h, nh * sites, "J_h").reshape(nh, sites)
        jv = _couplings(J_v, columns * max(sites - 1, 0), "J_v").reshape(columns, max(sites - 1, 0))
        fields = None
        if h is not None:
            hh = _couplings(h, columns * sites, "h").reshape(columns, sites)
            fields = -hh[..., None] * np.array([1.0, -1.0])
        return cls(sites, columns, beta, _ising_pair_energy(jh), _ising_pair_energy(jv), fields, 2, boundary)

    def var(self, t: int, i: int) -> int:
        return t * self.sites + i

    def to_model(self) -> SpinModel:
        n, T, q = self.sites, self.columns, self.q
        inters = []
        for t in range(T):
            if self.fields is not None:
                inters += [Interaction((self.var(t, i),), self.fields[t, i], tag="field-table") for i in range(n)]
            inters += [Interaction((self.var(t, i), self.var(t, i + 1)), self.vertical[t, i], tag="vertical")
                       for i in range(n - 1)]
            if t < self.n_horizontal:
                nxt = (t + 1) % T
                inters += [Interaction((self.var(nxt, i), self.var(t, i)), self.horizontal[t, i], tag="horizontal")
                           for i in range(n)]
        if self.boundary.kind == "fixed":
            inters += [pin(self.var(0, i), x, q) for i, x in enumerate(self.boundary.right)]
            inters += [pin(self.var(T - 1, i), x, q) for i, x in enumerate(self.boundary.left)]
        return SpinModel(n * T, q, inters, self.beta)

    def to_circuit(self) -> Circuit:
        n, T, q, beta = self.sites, self.columns, self.q, self.beta
        layers = []
        vpairs = [(i, i + 1) for i in range(n - 1)]
        vlayers = pack_layers(vpairs)
        for t in range(T):
            if self.fields is not None:
                layers.append([Gate.from_diagonal((i,), np.exp(-beta * self.fields[t, i])) for i in range(n)])
            for group in vlayers:
                layers.append([Gate.from_diagonal(vpairs[i], np.exp(-beta * self.vertical[t, i]).ravel())
                               for i in group])
            if t < self.n_horizontal:
                layers.append([Gate((i,), np.exp(-beta * self.horizontal[t, i])) for i in range(n)])
        return Circuit(n, q, tuple(layers), self.boundary)


# -- 3D Z2 gauge theory in temporal gauge -----------------------------------------

@dataclass(frozen=True, eq=False)
class GaugeLattice:
    """3D lattice gauge theory, temporal gauge: spins on the spatial edges of each time slice.

    Spatial edges are numbered x-edges first, then y-edges, each in row-major
    ``(y, x)`` order. ``plaquette[t, p]`` is the four-body energy table of
    space-like plaquette ``p`` in slice ``t`` (edge order bottom, right, top,
    left); ``temporal[t, e]`` is ``h(s_{t+1,e}, s_{t,e})``.
    """
    lx: int
    ly: int
    steps: int
    beta: complex
    plaquette: np.ndarray
    temporal: np.ndarray
    periodic_space: bool = True
    boundary: Boundary = field(default_factory=Boundary)
    q: int = 2

    def __post_init__(self):
        if self.lx < 1 or self.ly < 1 or self.steps < 1:
            raise BadDimensions("gauge lattice needs lx, ly, steps >= 1")
        if self.periodic_space and (self.lx < 2 or self.ly < 2):
            raise BadDimensions("periodic spatial slices need lx, ly >= 2")
        object.__setattr__(self, "beta", complex(self.beta))
        q = self.q
        P, E = len(self.plaquettes()), self.n_edges
        object.__setattr__(self, "plaquette", _as_tables(self.plaquette, (self.steps, P, q, q, q, q), "plaquette"))
        object.__setattr__(self, "temporal", _as_tables(self.temporal, (self.n_temporal, E, q, q), "temporal"))
        _boundary_strings(self.boundary, E)

    @property
    def n_temporal(self) -> int:
        return self.steps if self.boundary.kind == "periodic" else self.steps - 1

    @property
    def _site_dims(self):
        if self.periodic_space:
            return self.lx, self.ly
        return self.lx + 1, self.ly + 1

    @property
    def n_xedges(self) -> int:
        return self.lx * self._site_dims[1]

    @property
    def n_edges(self) -> int:
        return self.count_edges(self.lx, self.ly, self.periodic_space)

    def xedge(self, x: int, y: int) -> int:
        sx, sy = self._site_dims
        return (y % sy) * self.lx + (x % self.lx if self.periodic_space else x)

    def yedge(self, x: int, y: int) -> int:
        sx, sy = self._site_dims
        return self.n_xedges + (y % self.ly if self.periodic_space else y) * sx + (x % sx)

    def plaquettes(self):
        return [(self.xedge(x, y), self.yedge(x + 1, y), self.xedge(x, y + 1), self.yedge(x, y))
                for y in range(self.ly) for x in range(self.lx)]

    @staticmethod
    def count_edges(lx: int, ly: int, periodic_space: bool = True) -> int:
        if periodic_space:
            return 2 * lx * ly
        return lx * (ly + 1) + (lx + 1) * ly

    @classmethod
    def ising(cls, lx, ly, steps, K, J_t, beta=1.0, periodic_space=True, boundary=None):
        """Z2 gauge couplings: ``-K (-1)^(sum of plaquette spins)``, ``-J_t (-1)^(s + s')`` in time."""
        boundary = boundary or Boundary()
        P, E = lx * ly, cls.count_edges(lx, ly, periodic_space)
        nt = steps if boundary.kind == "periodic" else steps - 1
        k = _couplings(K, steps * P, "K").reshape(steps, P)
        jt = _couplings(J_t, nt * E, "J_t").reshape(nt, E)
        return cls(lx, ly, steps, beta, _ising_plaquette_energy(k), _ising_pair_energy(jt),
                   periodic_space, boundary)

    def var(self, t: int, e: int) -> int:
        return t * self.n_edges + e

    def to_model(self) -> SpinModel:
        E, T, q = self.n_edges, self.steps, self.q
        plaqs = self.plaquettes()
        inters = []
        for t in range(T):
            inters += [Interaction(tuple(self.var(t, e) for e in pl), self.plaquette[t, p], tag="plaquette")
                       for p, pl in enumerate(plaqs)]
            if t < self.n_temporal:
                nxt = (t + 1) % T
                inters += [Interaction((self.var(nxt, e), self.var(t, e)), self.temporal[t, e], tag="temporal")
                           for e in range(E)]
        if self.boundary.kind == "fixed":
            inters += [pin(self.var(0, e), x, q) for e, x in enumerate(self.boundary.right)]
            inters += [pin(self.var(T - 1, e), x, q) for e, x in enumerate(self.boundary.left)]
        return SpinModel(E * T, q, inters, self.beta)

    def to_circuit(self) -> Circuit:
        E, T, q, beta = self.n_edges, self.steps, self.q, self.beta
        plaqs = self.plaquettes()
        groups = pack_layers(plaqs)
        layers = []
        for t in range(T):
            for group in groups:
                layers.append([Gate.from_diagonal(plaqs[p], np.exp(-beta * self.plaquette[t, p]).ravel())
                               for p in group])
            if t < self.n_temporal:
                layers.append([Gate((e,), np.exp(-beta * self.temporal[t, e])) for e in range(E)])
        return Circuit(E, q, tuple(layers), self.boundary)


# the circuit builders under their conventional names

def vertex_to_circuit(lattice: VertexLattice) -> Circuit:
    return lattice.to_circuit()


def edge_to_circuit(lattice: EdgeLattice) -> Circuit:
    return lattice.to_circuit()


def lgt_to_circuit(lattice: GaugeLattice) -> Circuit:
    return lattice.to_circuit()
