import math

import numpy as np
import pytest

from spinq.errors import IndexOutOfRange, NotMergeable, TargetTooLarge, WrongFamily
from spinq.model import (SpinModel, energy_table, equality_constraint, field, ising_edge, ising_graph,
                         partition_function_exact, potts_edge)
from spinq.rewrite import delete, merge, specialize_clique

from conftest import random_graph, rel_err


def constrained(model, index):
    """The same model with interaction ``index`` swapped for a hard equality."""
    inters = list(model.interactions)
    inters[index] = equality_constraint(inters[index].vars, model.q)
    return model.with_interactions(inters)


def zeroed(model, index):
    inters = list(model.interactions)
    inters[index] = inters[index].replace(table=np.zeros_like(inters[index].table), kind="energy")
    return model.with_interactions(inters)


def test_merge_path_structure():
    out = merge(ising_graph(3, [(0, 1), (1, 2)], J=[1.0, 0.5]), 0)
    assert out.n == 2 and len(out.interactions) == 1
    assert out.interactions[0].vars == (0, 1) and out.interactions[0].params["J"] == 0.5


def test_merge_hard_edge():
    m = SpinModel(2, 2, [equality_constraint((0, 1), 2)])
    out = merge(m, 0)
    assert partition_function_exact(out) == 2 == partition_function_exact(m)


def test_merge_triangle_gives_parallel_edges():
    m = ising_graph(3, [(0, 1), (1, 2), (0, 2)], J=[0.3, -0.7, 1.1], beta=0.8 + 0.1j)
    out = merge(m, 0)
    assert out.n == 2 and sorted(i.vars for i in out.interactions) == [(0, 1), (0, 1)]
    assert rel_err(partition_function_exact(out), partition_function_exact(constrained(m, 0))) < 1e-12


def test_merge_rejects():
    m = SpinModel(3, 2, [field(0, 1.0), energy_table((0, 1), [0, 1, 2, 3], 2), ising_edge(1, 1, 1.0)])
    for i in range(3):
        with pytest.raises(NotMergeable):
            merge(m, i)
    with pytest.raises(IndexOutOfRange):
        merge(m, 3)


def test_delete_examples():
    assert partition_function_exact(delete(SpinModel(2, 2, [ising_edge(0, 1, 1.0)]), 0)) == 4
    assert partition_function_exact(delete(SpinModel(1, 2, [field(0, 1.0)]), 0)) == 2
    with pytest.raises(IndexOutOfRange):
        delete(SpinModel(1, 2, []), 0)


def test_delete_equals_zero_coupling(rng):
    for _ in range(20):
        n = 4
        edges = random_graph(rng, n, 0.7) or [(0, 1)]
        m = ising_graph(n, edges, J=list(rng.normal(size=len(edges)) + 1j * rng.normal(size=len(edges))),
                        h=list(rng.normal(size=n)), beta=0.6 - 0.3j)
        i = int(rng.integers(len(m.interactions)))
        assert rel_err(partition_function_exact(delete(m, i)), partition_function_exact(zeroed(m, i))) <= 1e-12


def test_merge_potts(rng):
    m = SpinModel(3, 3, [potts_edge(0, 1, 0.4, 3), potts_edge(1, 2, -0.5 + 0.2j, 3), potts_edge(0, 2, 0.9, 3)],
                  0.7)
    for i in range(3):
        assert rel_err(partition_function_exact(merge(m, i)), partition_function_exact(constrained(m, i))) <= 1e-12


def test_clique_examples():
    target = SpinModel(2, 2, [ising_edge(0, 1, 1.0)])
    out = specialize_clique(3, target)
    assert len(out.interactions) == 3
    assert rel_err(partition_function_exact(out), 2 * (2 * math.e + 2 / math.e)) < 1e-12
    k3 = ising_graph(3, [(0, 1), (0, 2), (1, 2)], J=[0.2, -0.4, 0.6])
    out = specialize_clique(3, k3)
    assert [i.vars for i in out.interactions] == [i.vars for i in k3.interactions]
    assert [i.params for i in out.interactions] == [i.params for i in k3.interactions]


def test_clique_ratio(rng):
    for _ in range(5):
        target = ising_graph(3, [(0, 1), (1, 2), (0, 2)], J=list(rng.normal(size=3)), beta=0.9 + 0.2j)
        ratio = partition_function_exact(specialize_clique(4, target)) / partition_function_exact(target)
        assert abs(ratio - 2) <= 2e-12


def test_clique_errors():
    with pytest.raises(TargetTooLarge):
        specialize_clique(2, ising_graph(3, [(0, 1)]))
    with pytest.raises(WrongFamily):
        specialize_clique(3, SpinModel(2, 3, [potts_edge(0, 1, 1.0, 3)]))
    with pytest.raises(WrongFamily):
        specialize_clique(3, ising_graph(2, [(0, 1), (1, 0)]))
