"""File formats: model and lattice documents, state export, fork arrays, JSON output.

Complex numbers are written as ``{"re": x, "im": y}``; plain numbers are
accepted on input. Output floats carry 17 significant digits.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .cdt import FoliatedTriangulation, ForkArray
from .errors import InvalidModel
from .families import GRAPH_FAMILIES, as_boundary, build_lattice, instantiate_family
from .model import (Interaction, SpinModel, energy_table, equality_constraint, field, ising_edge,
                    ising_plaquette, potts_edge, potts_field, weight_table)
from .overlap import StateVector


# -- complex values -------------------------------------------------------------

def parse_complex(obj) -> complex:
    if isinstance(obj, bool):
        raise InvalidModel(f"expected a number, got {obj!r}")
    if isinstance(obj, (int, float)):
        return complex(obj)
    if isinstance(obj, dict) and set(obj) <= {"re", "im"}:
        return complex(float(obj.get("re", 0.0)), float(obj.get("im", 0.0)))
    raise InvalidModel(f"expected a number or {{re, im}}, got {obj!r}")


def parse_complex_array(obj):
    """Nested lists of numbers / ``{re, im}`` -> complex ndarray (scalars pass through)."""
    if isinstance(obj, list):
        return np.array([parse_complex_array(x) for x in obj], dtype=np.complex128)
    return parse_complex(obj)


def complex_json(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def complex_list(arr) -> list:
    return [complex_json(z) for z in np.asarray(arr, dtype=np.complex128).ravel()]


# -- models -------------------------------------------------------------------

def _interaction_from_json(d: dict, q: int, i: int) -> Interaction:
    try:
        vars_ = [int(v) for v in d["vars"]]
        kind = d["type"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidModel(f"interaction {i}: needs 'vars' and 'type'") from exc
    k = len(vars_)
    if kind == "ising":
        if q != 2 or k < 2:
            raise InvalidModel(f"interaction {i}: ising needs q = 2 and at least two variables")
        J = parse_complex(d.get("J", 1.0))
        return ising_edge(*vars_, J) if k == 2 else ising_plaquette(vars_, J)
    if kind == "field":
        if q != 2 or k != 1:
            raise InvalidModel(f"interaction {i}: field needs q = 2 and one variable")
        return field(vars_[0], parse_complex(d.get("h", 0.0)))
    if kind == "potts":
        if k == 2:
            return potts_edge(*vars_, parse_complex(d.get("J", 1.0)), q)
        if k == 1:
            return potts_field(vars_[0], parse_complex(d.get("h", 0.0)), q)
        raise InvalidModel(f"interaction {i}: potts needs one or two variables")
    if kind == "constraint-equal":
        return equality_constraint(vars_, q)
    if kind == "table":
        tag = d.get("tag", "table")
        if ("energies" in d) == ("weights" in d):
            raise InvalidModel(f"interaction {i}: table needs exactly one of 'energies' or 'weights'")
        if "energies" in d:
            return energy_table(vars_, parse_complex_array(d["energies"]), q, tag)
        return weight_table(vars_, parse_complex_array(d["weights"]), q, tag)
    raise InvalidModel(f"interaction {i}: unknown type {kind!r}")


def model_from_json(doc: dict) -> SpinModel:
    """A model document, or a family document (``{"family": ..., ...params}``)."""
    if "family" in doc:
        return instantiate_family(doc["family"], **family_params(doc))
    try:
        n = int(doc["variables"]["count"])
        q = int(doc["variables"].get("levels", 2))
        inters = doc["interactions"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidModel("model needs 'variables {count, levels}' and 'interactions'") from exc
    beta = parse_complex(doc.get("beta", 1.0))
    return SpinModel(n, q, [_interaction_from_json(d, q, i) for i, d in enumerate(inters)], beta)


def _interaction_to_json(inter: Interaction) -> dict:
    vars_ = list(inter.vars)
    if inter.tag == "ising" and "J" in inter.params:
        return {"vars": vars_, "type": "ising", "J": complex_json(inter.params["J"])}
    if inter.tag == "field" and "h" in inter.params:
        return {"vars": vars_, "type": "field", "h": complex_json(inter.params["h"])}
    if inter.tag == "potts" and ("J" in inter.params or "h" in inter.params):
        key = "J" if inter.arity == 2 else "h"
        return {"vars": vars_, "type": "potts", key: complex_json(inter.params[key])}
    if inter.tag == "constraint-equal" and inter.hard:
        return {"vars": vars_, "type": "constraint-equal"}
    key = "weights" if inter.hard else "energies"
    out = {"vars": vars_, "type": "table", key: complex_list(inter.table)}
    if inter.tag != "table":
        out["tag"] = inter.tag
    return out


def model_to_json(model: SpinModel) -> dict:
    return {
        "variables": {"count": model.n, "levels": model.q},
        "beta": complex_json(model.beta),
        "interactions": [_interaction_to_json(i) for i in model.interactions],
    }


# -- lattices -------------------------------------------------------------------

_COMPLEX_PARAMS = {"J", "h", "J_h", "J_v", "K", "J_t", "beta", "weights", "energies",
                   "horizontal", "vertical", "fields"}


def family_params(doc: dict) -> dict:
    """Flatten ``dims``, ``couplings``, ``beta`` and ``boundary`` into builder keyword arguments."""
    params = {}
    for section in ("dims", "couplings"):
        params.update(doc.get(section, {}))
    for key, value in doc.items():
        if key not in ("family", "dims", "couplings"):
            params[key] = value
    for key in list(params):
        if key in _COMPLEX_PARAMS and params[key] is not None:
            params[key] = parse_complex_array(params[key])
    if "boundary" in params:
        params["boundary"] = as_boundary(params["boundary"])
    return params


def lattice_from_json(doc: dict):
    family = doc.get("family")
    if family is None:
        raise InvalidModel("lattice document needs a 'family'")
    if family in GRAPH_FAMILIES:
        raise InvalidModel(f"{family} has no circuit layout; use a lattice family")
    return build_lattice(family, **family_params(doc))


# -- states -------------------------------------------------------------------

def state_to_json(state: StateVector) -> dict:
    """Nonzero amplitudes as ``{index, re, im}``, row-major over the qudit list."""
    amps = state.amplitudes
    nz = np.flatnonzero(amps)
    return {
        "qudit_dims": list(state.qudit_dims),
        "labels": list(state.labels),
        "amplitudes": [{"index": int(i), "re": amps[i].real, "im": amps[i].imag} for i in nz],
    }


def state_from_json(doc: dict) -> StateVector:
    dims = tuple(int(d) for d in doc["qudit_dims"])
    amps = np.zeros(int(np.prod(dims, dtype=np.int64)), dtype=np.complex128)
    for a in doc["amplitudes"]:
        amps[int(a["index"])] = complex(a.get("re", 0.0), a.get("im", 0.0))
    return StateVector(dims, amps, tuple(doc.get("labels", range(len(dims)))))


def gamma_from_json(doc) -> dict:
    """``{"gamma": [{"qudit": i, "vector": [...]}, ...]}`` -> ``{i: vector}``."""
    items = doc["gamma"] if isinstance(doc, dict) else doc
    return {int(it["qudit"]): parse_complex_array(it["vector"]) for it in items}


# -- triangulations -------------------------------------------------------------

def triangulation_to_json(tri: FoliatedTriangulation) -> dict:
    return {
        "rows": tri.rows,
        "cols": tri.cols,
        "vertices": [list(p) for p in tri.positions],
        "slices": [list(s) for s in tri.slices],
        "edges": [[a, b, kind] for (a, b), kind in sorted(tri.edges.items())],
        "faces": [list(f) for f in tri.faces],
    }


def triangulation_from_json(doc: dict) -> FoliatedTriangulation:
    positions = tuple(tuple(int(x) for x in p) for p in doc["vertices"])
    edges = {(min(a, b), max(a, b)): kind for a, b, kind in doc["edges"]}
    faces = tuple((int(a), int(b), int(c), int(s), o) for a, b, c, s, o in doc["faces"])
    slices = tuple(tuple(int(v) for v in s) for s in doc["slices"])
    return FoliatedTriangulation(int(doc["rows"]), int(doc["cols"]), positions, slices, edges, faces)


def read_fork_array(path) -> ForkArray:
    return ForkArray.from_text(Path(path).read_text())


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


# -- output ---------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    s = "%.17g" % x
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def dumps(obj, pretty: bool = False, _level: int = 0) -> str:
    """JSON text with floats at 17 significant digits (``json`` would print the shortest repr)."""
    nl = "\n" + "  " * (_level + 1) if pretty else ""
    end = "\n" + "  " * _level if pretty else ""
    sep = "," if pretty else ", "
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [json.dumps(str(k)) + ": " + dumps(v, pretty, _level + 1) for k, v in obj.items()]
        return "{" + nl + (sep + nl).join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[" + nl + (sep + nl).join(dumps(v, pretty, _level + 1) for v in obj) + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps(complex_json(obj), pretty, _level)
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist(), pretty, _level)
    return json.dumps(str(obj))
