"""Merge and deletion rules, and specialization of a clique to an arbitrary graph.

Merging a two-body equality-type interaction identifies its endpoints (graph
edge contraction); the result has the partition function of the original model
with that interaction replaced by a hard equality constraint. Deleting an
interaction has the partition function of the original model with that
coupling set to zero.
"""
from __future__ import annotations

from .errors import IndexOutOfRange, NotMergeable, TargetTooLarge, WrongFamily
from .model import SpinModel, field, ising_edge

MERGEABLE_TAGS = ("ising", "potts", "constraint-equal")


def _check_index(model: SpinModel, index: int) -> int:
    index = int(index)
    if not 0 <= index < len(model.interactions):
        raise IndexOutOfRange(f"interaction {index} out of range ({len(model.interactions)} interactions)",
                              interaction=index)
    return index


def merge(model: SpinModel, index: int) -> SpinModel:
    """Contract interaction ``index``: its larger-numbered variable is folded into the smaller.

    Variables above the removed one shift down by one. Parallel interactions
    created by the contraction are kept as separate interactions.
    """
    index = _check_index(model, index)
    inter = model.interactions[index]
    if inter.arity != 2 or inter.tag not in MERGEABLE_TAGS:
        raise NotMergeable(f"interaction {index} ({inter.tag}, arity {inter.arity}) is not a two-body "
                           "equality-type interaction", interaction=index)
    a, b = sorted(inter.vars)
    if a == b:
        raise NotMergeable(f"interaction {index} is a self-loop", interaction=index)

    def relabel(v):
        if v == b:
            return a
        return v - 1 if v > b else v

    rest = [other.replace(vars=tuple(relabel(v) for v in other.vars))
            for i, other in enumerate(model.interactions) if i != index]
    return model.with_interactions(rest, n=model.n - 1)


def delete(model: SpinModel, index: int) -> SpinModel:
    index = _check_index(model, index)
    return model.with_interactions(inter for i, inter in enumerate(model.interactions) if i != index)


def specialize_clique(n: int, target: SpinModel) -> SpinModel:
    """Complete-graph Ising model on ``n`` vertices that reproduces ``target``.

    Edges of the target keep their couplings, all other clique edges get
    ``J = 0`` and surplus vertices are left decoupled, so
    ``Z(result) = 2**(n - n') * Z(target)``. Edges come first in
    lexicographic ``(a, b)`` order, then the target's fields in vertex order.
    """
    if target.q != 2:
        raise WrongFamily("clique specialization is defined for Ising models (q = 2)")
    if target.n > n:
        raise TargetTooLarge(f"target has {target.n} vertices, clique only {n}")
    couplings, fields = {}, {}
    for i, inter in enumerate(target.interactions):
        if inter.tag == "ising" and inter.arity == 2:
            a, b = sorted(inter.vars)
            if a == b or (a, b) in couplings:
                raise WrongFamily(f"interaction {i} makes the target graph non-simple")
            couplings[(a, b)] = inter.params["J"]
        elif inter.tag == "field" and inter.arity == 1:
            a = inter.vars[0]
            if a in fields:
                raise WrongFamily(f"vertex {a} carries two fields")
            fields[a] = inter.params["h"]
        else:
            raise WrongFamily(f"interaction {i} is not an Ising edge or field")
    inters = [ising_edge(a, b, couplings.get((a, b), 0.0)) for a in range(n) for b in range(a + 1, n)]
    inters += [field(a, fields[a]) for a in sorted(fields)]
    return SpinModel(n, 2, inters, target.beta)
