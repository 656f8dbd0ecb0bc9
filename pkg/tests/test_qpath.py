import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lopath import path
from lopath.circuits import BS, BS_MATRIX, Circuit, classical_matrix
from lopath.diagram import Diagram
from lopath.fock import amplitude_permanent, enumerate_basis
from lopath.linalg import permanent, permanent_naive
from lopath.path import WeightedBipartiteGraph, eval_matrix, path_axioms, rewrite
from lopath.qpath import (
    ContractError,
    annihilation_operator,
    bosonic_semantics,
    commutator,
    creation_operator,
    eval_closed,
    eval_open,
    evaluate_event,
    event_diagram,
    matching_sum,
    normalize_closed,
    number_state_index,
    open_amplitude,
    perfect_matchings,
)
from lopath.sampling import DiagramConfig, EventConfig, random_diagram, random_event
from oracles import tensor_number_state

seeds = st.integers(0, 2**32 - 1)
HOM = Circuit(2, (BS(0),))


def test_copy_on_one_photon():
    out = bosonic_semantics(path.COPY, 2) @ tensor_number_state((1,), 2)
    np.testing.assert_array_equal(out, tensor_number_state((0, 1), 2) + tensor_number_state((1, 0), 2))


def test_scalar_acts_as_power():
    r = bosonic_semantics(path.scalar_node(2), 3)
    assert r[3, 3] == 8
    np.testing.assert_array_equal(np.diag(r), [1, 2, 4, 8])


@pytest.mark.parametrize("cutoff", range(5))
def test_merge_is_adjoint_of_copy(cutoff):
    np.testing.assert_array_equal(
        bosonic_semantics(path.MERGE, cutoff), bosonic_semantics(path.COPY, cutoff).conj().T
    )


def test_copy_then_merge_doubles():
    d = path.copy() >> path.merge()
    np.testing.assert_allclose(eval_open(d, 5), np.diag([2.0**n for n in range(6)]), atol=1e-12)
    np.testing.assert_allclose(eval_open(d, 5), eval_open(path.scalar(2), 5), atol=1e-12)


def test_endpoints():
    np.testing.assert_array_equal(eval_open(path.create(2), 3)[:, 0], tensor_number_state((2,), 3))
    np.testing.assert_array_equal(eval_open(path.annihilate(2), 3)[0], tensor_number_state((2,), 3))
    np.testing.assert_array_equal(eval_open(path.unit(), 3)[:, 0], tensor_number_state((0,), 3))
    assert eval_open(path.create(4), 3).sum() == 0


def test_identity_wire():
    np.testing.assert_array_equal(eval_open(Diagram.id(1), 4), np.eye(5))
    np.testing.assert_array_equal(eval_open(Diagram.id(2), 2), np.eye(9))


def test_creation_and_annihilation_operators():
    ad = eval_open(creation_operator(), 5)
    a = eval_open(annihilation_operator(), 5)
    for n in range(5):
        np.testing.assert_allclose(ad[:, n], math.sqrt(n + 1) * tensor_number_state((n + 1,), 5), atol=1e-15)
    for n in range(6):
        expected = math.sqrt(n) * tensor_number_state((n - 1,), 5) if n else np.zeros(6)
        np.testing.assert_allclose(a[:, n], expected, atol=1e-15)


@pytest.mark.parametrize("cutoff", [3, 4, 5, 6])
def test_commutator_is_identity_below_cutoff(cutoff):
    C = commutator(cutoff)
    assert (C[:cutoff, :cutoff] == np.eye(cutoff, dtype=int)).all()


def test_event_diagram_shapes():
    d = event_diagram(HOM, (1, 1), (2, 0))
    assert (d.dom, d.cod) == (0, 0)
    assert d.count("create") == 2 and d.count("annihilate") == 1 and d.count("discard") == 1
    assert eval_closed(event_diagram(Circuit(1), (1,), (1,))) == pytest.approx(1)


def test_hom_event():
    d = event_diagram(HOM, (1, 1), (1, 1))
    ng = normalize_closed(d)
    np.testing.assert_allclose(ng.graph.weights, BS_MATRIX.T, atol=1e-15)
    assert ng.norm_factor == 1
    assert abs(eval_closed(d)) < 1e-15
    assert abs(eval_closed(event_diagram(HOM, (1, 1), (2, 0))) - 1j / math.sqrt(2)) < 1e-15


def test_vacuum_event():
    ng = normalize_closed(path.empty())
    assert ng.graph.weights.shape == (0, 0)
    assert ng.norm_factor == 1
    assert eval_closed(path.empty()) == 1
    assert eval_closed(event_diagram(HOM, (0, 0), (0, 0))) == pytest.approx(1)


def test_two_photon_identity_event():
    d = event_diagram(Circuit(1), (2,), (2,))
    ng = normalize_closed(d)
    np.testing.assert_array_equal(ng.graph.weights, np.ones((2, 2)))
    assert ng.norm_factor == 0.5
    assert eval_closed(d) == 1
    assert eval_open(d)[0, 0] == pytest.approx(1)


def test_normalize_rejects_open_diagram():
    with pytest.raises(ContractError):
        normalize_closed(path.copy())


def test_mismatched_totals_are_exactly_zero():
    d = event_diagram(HOM, (1, 1), (1, 0))
    assert eval_closed(d) == 0
    assert not normalize_closed(d).balanced


def test_perfect_matchings_examples():
    g1 = WeightedBipartiteGraph(np.array([[2.5 - 1j]]))
    assert list(perfect_matchings(g1)) == [((0,), 2.5 - 1j)]
    g3 = WeightedBipartiteGraph(np.ones((3, 3), dtype=complex))
    assert len(list(perfect_matchings(g3))) == 6
    rng = np.random.default_rng(5)
    W = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    assert matching_sum(WeightedBipartiteGraph(W)) == permanent_naive(W)


def test_perfect_matchings_limits():
    from lopath.errors import ShapeError, SizeLimitError

    with pytest.raises(SizeLimitError):
        list(perfect_matchings(WeightedBipartiteGraph(np.ones((10, 10)))))
    with pytest.raises(ShapeError):
        list(perfect_matchings(WeightedBipartiteGraph(np.ones((2, 3)))))


def test_fifty_random_events_match_permanent():
    for seed in range(50):
        c, I, J = random_event(seed)
        expected = amplitude_permanent(classical_matrix(c), I, J)
        assert abs(eval_closed(event_diagram(c, I, J)) - expected) < 1e-10


@given(seeds)
def test_oracle_triangle(seed):
    c, I, J = random_event(seed, EventConfig(max_modes=4, max_photons=3, max_gates=8))
    d = event_diagram(c, I, J)
    closed = eval_closed(d)
    perm = amplitude_permanent(classical_matrix(c), I, J)
    opened = eval_open(d)[0, 0]
    assert abs(closed - perm) < 1e-9
    assert abs(closed - opened) < 1e-9
    ng = normalize_closed(d)
    if ng.balanced and ng.graph.left_size <= 4:
        assert matching_sum(ng.graph) == permanent_naive(ng.graph.weights)


@given(seeds)
def test_rewrite_steps_preserve_bosonic_semantics(seed):
    c, I, J = random_event(seed, EventConfig(max_modes=3, max_photons=2, max_gates=4))
    d = event_diagram(c, I, J)
    target = eval_open(d)[0, 0]
    steps = []
    nf = rewrite(d, on_step=lambda phase, diagram: steps.append(diagram))
    for step in steps:
        assert abs(nf.factor * eval_open(step)[0, 0] - target) < 1e-10


def _truncation_safe_columns(wires, cutoff):
    return [
        number_state_index(occ, cutoff)
        for occ in itertools.product(range(cutoff + 1), repeat=wires)
        if sum(occ) <= cutoff
    ]


@pytest.mark.parametrize("name, lhs, rhs", path_axioms(), ids=[a[0] for a in path_axioms()])
def test_axioms_hold_in_bosonic_model(name, lhs, rhs):
    cutoff = 3
    cols = _truncation_safe_columns(lhs.dom, cutoff)
    np.testing.assert_allclose(eval_open(lhs, cutoff)[:, cols], eval_open(rhs, cutoff)[:, cols], atol=1e-12)


@given(seeds)
def test_open_amplitude_matches_contraction(seed):
    d = random_diagram(seed, DiagramConfig(max_wires=3, max_generators=8))
    cutoff = 2
    E = eval_open(d, cutoff)
    nf = rewrite(d)
    for t in range(cutoff + 1):
        for x in enumerate_basis(d.dom, t) if d.dom else ([()] if t == 0 else []):
            for y in enumerate_basis(d.cod, t) if d.cod else ([()] if t == 0 else []):
                expected = E[number_state_index(y, cutoff), number_state_index(x, cutoff)]
                assert abs(open_amplitude(nf, x, y) - expected) < 1e-9


def test_open_amplitude_of_circuit():
    c = Circuit(3, (BS(0), BS(1)))
    d = path.lo_to_path(c)
    U = classical_matrix(c)
    for x in enumerate_basis(3, 2):
        for y in enumerate_basis(3, 2):
            assert abs(open_amplitude(d, x, y) - amplitude_permanent(U, x, y)) < 1e-12
    assert open_amplitude(d, (1, 0, 0), (1, 1, 0)) == 0


def test_eval_open_cutoff_check():
    d = creation_operator()
    eval_open(d, 3, check=True)
    out = eval_open(event_diagram(HOM, (1, 1), (2, 0)), check=True)
    assert out.shape == (1, 1)


def test_evaluate_event_request():
    req = {"circuit": HOM.to_json(), "input": [1, 1], "output": [2, 0]}
    res = evaluate_event(req)
    assert res["probability"] == pytest.approx(0.5, abs=1e-12)
    assert res["amplitude"]["im"] == pytest.approx(1 / math.sqrt(2))


def test_graph_orientation_matches_classical():
    d = path.lo_to_path(HOM)
    assert np.allclose(rewrite(d).graph.matrix, eval_matrix(d))
    assert permanent(rewrite(event_diagram(HOM, (1, 1), (1, 1))).graph.weights) == pytest.approx(0, abs=1e-15)
