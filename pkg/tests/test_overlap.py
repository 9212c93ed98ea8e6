import itertools
import math

import numpy as np
import pytest

from spinq.errors import DimensionMismatch, IndexOutOfRange, TooLarge, WrongFamily
from spinq.model import SpinModel, equality_constraint, field, ising_edge, ising_graph, partition_function_exact, potts_edge
from spinq.overlap import (Y_COVECTOR, ProductCovector, StateVector, alpha_covector, check_stabilizers, pair,
                           phi_state, project, project_edges_y, vertex_phase_correction)

from conftest import random_graph, random_model, rel_err


def graph_state(n, edges):
    """prod CZ |+>^n, amplitude (-1)^(number of edges with both ends 1)."""
    amps = np.empty(2 ** n, dtype=np.complex128)
    for idx, s in enumerate(itertools.product((0, 1), repeat=n)):
        amps[idx] = (-1) ** sum(s[a] * s[b] for a, b in edges)
    return amps


def proportional_residual(x, y):
    """Residual of ``x`` after the best single complex scalar fit to ``y``."""
    c = np.vdot(y, x) / np.vdot(y, y)
    return float(np.max(np.abs(x - c * y)) / np.max(np.abs(x)))


def test_phi_single_edge_with_fields():
    phi = phi_state(ising_graph(2, [(0, 1)], with_fields=True))
    assert phi.qudit_dims == (2, 2, 2)
    t = phi.tensor()
    ones = {tuple(i) for i in np.argwhere(t == 1)}
    assert ones == {(0, 0, 0), (1, 0, 1), (1, 1, 0), (0, 1, 1)}
    assert np.count_nonzero(t) == 4


def test_phi_single_field():
    assert np.array_equal(phi_state(SpinModel(1, 2, [field(0, 0.3)])).amplitudes, [1, 1])


def test_phi_without_interactions_is_configuration_count():
    phi = phi_state(SpinModel(3, 2, []))
    assert phi.qudit_dims == () and phi.amplitudes.tolist() == [8]
    assert pair(alpha_covector(SpinModel(3, 2, [])), phi) == 8


def test_phi_cap():
    m = SpinModel(8, 3, [potts_edge(i, (i + 1) % 8, 1.0, 3) for i in range(8)])
    with pytest.raises(TooLarge):
        phi_state(m, dense_cap=2 ** 10)


def test_alpha_coefficients():
    a = alpha_covector(SpinModel(2, 2, [ising_edge(0, 1, 1.0)]))
    assert np.allclose(a.coefficients[0], [math.e, 1 / math.e], rtol=1e-15)
    a = alpha_covector(SpinModel(1, 2, [field(0, 0.0)]))
    assert np.array_equal(a.coefficients[0], [1, 1])
    a = alpha_covector(SpinModel(2, 2, [equality_constraint((0, 1), 2)]))
    assert np.array_equal(a.coefficients[0], [1, 0])


def test_pair_examples():
    m = SpinModel(2, 2, [ising_edge(0, 1, 1.0)])
    assert rel_err(pair(alpha_covector(m), phi_state(m)), 2 * math.e + 2 / math.e) < 1e-15
    m = SpinModel(3, 3, [potts_edge(0, 1, 0.4, 3), potts_edge(1, 2, -0.2, 3)])
    phi = phi_state(m)
    ones = ProductCovector([np.ones(d) for d in phi.qudit_dims])
    assert pair(ones, phi) == 27


def test_pair_dimension_mismatch():
    phi = phi_state(SpinModel(2, 2, [ising_edge(0, 1, 1.0)]))
    with pytest.raises(DimensionMismatch):
        pair(ProductCovector([np.ones(3)]), phi)


def test_pair_matches_enumeration(rng):
    for _ in range(50):
        m = random_model(rng, n_max=6)
        assert rel_err(pair(alpha_covector(m), phi_state(m)), partition_function_exact(m)) <= 1e-9


def test_local_coefficient_identity(rng):
    for _ in range(10):
        J, beta = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
        m = SpinModel(2, 2, [ising_edge(0, 1, J), field(0, J)], beta)
        edge, fld = alpha_covector(m).coefficients
        for sa, sb in itertools.product((0, 1), repeat=2):
            assert abs(edge[(sa + sb) % 2] - np.exp(beta * J * (-1) ** (sa + sb))) < 1e-12
            assert abs(fld[sa] - np.exp(beta * J * (-1) ** sa)) < 1e-12


def test_project_examples():
    m = ising_graph(2, [(0, 1)], with_fields=True)
    phi = phi_state(m)
    out = project(phi, {0: Y_COVECTOR})
    assert np.allclose(out.amplitudes, [1, -1j, -1j, 1], atol=0)
    assert out.labels == (1, 2)
    full = project(phi, {i: c for i, c in enumerate(alpha_covector(m).coefficients)})
    assert full.qudit_dims == () and full.amplitudes[0] == pair(alpha_covector(m), phi)
    same = project(phi, {})
    assert np.array_equal(same.amplitudes, phi.amplitudes) and same.qudit_dims == phi.qudit_dims


def test_project_errors():
    phi = phi_state(ising_graph(2, [(0, 1)], with_fields=True))
    with pytest.raises(IndexOutOfRange):
        project(phi, {3: Y_COVECTOR})
    with pytest.raises(DimensionMismatch):
        project(phi, {0: np.ones(3)})


def test_stabilizer_examples():
    m = ising_graph(2, [(0, 1)], with_fields=True)
    phi = phi_state(m)
    assert check_stabilizers(m, phi)
    tri = ising_graph(3, [(0, 1), (1, 2), (0, 2)], with_fields=True)
    assert check_stabilizers(tri, phi_state(tri))
    bumped = phi.amplitudes.copy()
    bumped[0] += 1e-3
    assert not check_stabilizers(m, StateVector(phi.qudit_dims, bumped, phi.labels))


def test_stabilizers_need_ising_structure():
    m = SpinModel(2, 3, [potts_edge(0, 1, 1.0, 3)])
    with pytest.raises(WrongFamily):
        check_stabilizers(m, phi_state(m))
    m = ising_graph(2, [(0, 1)])
    with pytest.raises(WrongFamily):
        check_stabilizers(m, phi_state(m))


def test_graph_state_identity_random_graphs(rng):
    for _ in range(15):
        n = int(rng.integers(2, 5))
        edges = random_graph(rng, n)
        m = ising_graph(n, edges, with_fields=True)
        state = vertex_phase_correction(m, project_edges_y(m, phi_state(m)))
        assert proportional_residual(state.amplitudes, graph_state(n, edges)) <= 1e-9
