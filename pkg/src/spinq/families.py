"""Named model families, built from plain parameter dictionaries.

Graph families return a :class:`SpinModel` directly; lattice families are
built as lattice objects (which also know their circuit) and converted.
"""
from __future__ import annotations

import inspect

import numpy as np

from .circuit import Boundary
from .errors import BadCouplingCount, BadDimensions, BadParameters, UnknownFamily
from .lattices import EdgeLattice, GaugeLattice, VertexLattice
from .model import SpinModel, ising_graph, potts_edge, potts_field

LATTICE_FAMILIES = ("six-vertex-2d", "vertex-2d-general", "edge-2d", "lgt-3d-temporal")
GRAPH_FAMILIES = ("ising-graph", "potts-graph")
FAMILIES = GRAPH_FAMILIES + LATTICE_FAMILIES


def as_boundary(b) -> Boundary:
    if b is None:
        return Boundary()
    if isinstance(b, Boundary):
        return b
    if isinstance(b, str):
        return Boundary(b)
    if isinstance(b, dict):
        return Boundary(b.get("kind", "open"), b.get("left"), b.get("right"))
    raise BadParameters(f"cannot interpret boundary {b!r}")


def _edges(n, edges):
    out = []
    for e in edges:
        if len(e) != 2:
            raise BadDimensions(f"edge {e} does not have two endpoints")
        a, b = int(e[0]), int(e[1])
        if not (0 <= a < n and 0 <= b < n):
            raise BadDimensions(f"edge {e} outside {n} vertices")
        out.append((a, b))
    return out


def _per_item(value, count, name):
    if value is None:
        return None
    if np.isscalar(value):
        return [complex(value)] * count
    vals = [complex(v) for v in np.asarray(value, dtype=np.complex128).ravel()]
    if len(vals) != count:
        raise BadCouplingCount(f"{name}: expected {count} values, got {len(vals)}")
    return vals


def _ising(n, edges, J=1.0, h=None, beta=1.0):
    if n < 1:
        raise BadDimensions("need at least one vertex")
    edges = _edges(n, edges)
    return ising_graph(n, edges, _per_item(J, len(edges), "J"), _per_item(h, n, "h"), complex(beta))


def _potts(n, q, edges, J=1.0, h=None, beta=1.0):
    """Potts energies ``-J delta(s_a, s_b)`` on edges and ``-h delta(s_a, 0)`` on vertices."""
    if n < 1 or q < 2:
        raise BadDimensions("need n >= 1 and q >= 2")
    edges = _edges(n, edges)
    inters = [potts_edge(a, b, j, q) for (a, b), j in zip(edges, _per_item(J, len(edges), "J"))]
    hs = _per_item(h, n, "h")
    if hs is not None:
        inters += [potts_field(a, x, q) for a, x in enumerate(hs)]
    return SpinModel(n, q, inters, complex(beta))


def _six_vertex(width, depth, weights, boundary=None):
    return VertexLattice.six_vertex(width, depth, weights, as_boundary(boundary))


def _vertex_general(width, depth, q=2, weights=None, energies=None, beta=1.0, boundary=None):
    if (weights is None) == (energies is None):
        raise BadParameters("give exactly one of weights or energies")
    if weights is not None:
        return VertexLattice(width, depth, weights, q, as_boundary(boundary))
    return VertexLattice.from_energies(width, depth, energies, beta, q, as_boundary(boundary))


def _edge(sites, columns, J_h=None, J_v=None, h=None, beta=1.0, boundary=None, q=2,
          horizontal=None, vertical=None, fields=None):
    """Ising couplings (``J_h``, ``J_v``, ``h``) or general energy tables."""
    b = as_boundary(boundary)
    if horizontal is not None or vertical is not None:
        if J_h is not None or J_v is not None or h is not None:
            raise BadParameters("give either Ising couplings or energy tables, not both")
        nh = columns if b.kind == "periodic" else columns - 1
        if horizontal is None:
            horizontal = np.zeros((nh, sites, q, q))
        if vertical is None:
            vertical = np.zeros((columns, max(sites - 1, 0), q, q))
        return EdgeLattice(sites, columns, beta, horizontal, vertical, fields, q, b)
    if q != 2:
        raise BadParameters("Ising couplings need q = 2; use energy tables otherwise")
    return EdgeLattice.ising(sites, columns, 0.0 if J_h is None else J_h, 0.0 if J_v is None else J_v,
                             h, beta, b)


def _lgt(lx, ly, steps, K=0.0, J_t=0.0, beta=1.0, periodic_space=True, boundary=None):
    return GaugeLattice.ising(lx, ly, steps, K, J_t, beta, bool(periodic_space), as_boundary(boundary))


_BUILDERS = {
    "ising-graph": _ising,
    "potts-graph": _potts,
    "six-vertex-2d": _six_vertex,
    "vertex-2d-general": _vertex_general,
    "edge-2d": _edge,
    "lgt-3d-temporal": _lgt,
}


def _call(family, params):
    if family not in _BUILDERS:
        raise UnknownFamily(f"unknown family {family!r}; known: {', '.join(FAMILIES)}", family=family)
    fn = _BUILDERS[family]
    sig = inspect.signature(fn)
    unknown = set(params) - set(sig.parameters)
    if unknown:
        raise BadParameters(f"{family}: unknown parameters {sorted(unknown)}")
    missing = [p.name for p in sig.parameters.values()
               if p.default is inspect.Parameter.empty and p.name not in params]
    if missing:
        raise BadParameters(f"{family}: missing parameters {missing}")
    return fn(**params)


def build_lattice(family: str, **params):
    """Lattice object (with ``to_model`` and ``to_circuit``) for a lattice family."""
    if family in GRAPH_FAMILIES:
        raise BadParameters(f"{family} is a graph family with no circuit layout")
    return _call(family, params)


def instantiate_family(family: str, **params) -> SpinModel:
    built = _call(family, params)
    return built if isinstance(built, SpinModel) else built.to_model()


__all__ = ["FAMILIES", "LATTICE_FAMILIES", "GRAPH_FAMILIES", "as_boundary", "build_lattice",
           "instantiate_family"]
