import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lopath.circuits import (
    BS,
    BS_MATRIX,
    Circuit,
    Phase,
    canonical_angle,
    classical_matrix,
    clements_decompose,
    mesh_depth,
    mesh_params,
    mzi,
    mzi_matrix,
    propagate_intensity,
    with_phases,
)
from lopath.errors import DomainError, ShapeError
from lopath.linalg import direct_sum, is_unitary
from lopath.sampling import haar_unitary, random_circuit

angles = st.floats(-10, 10, allow_nan=False)
seeds = st.integers(0, 2**32 - 1)


def test_empty_circuit_is_identity():
    np.testing.assert_array_equal(classical_matrix(Circuit(3)), np.eye(3))


def test_beam_splitter_matrix():
    expected = np.array([[1j, 1], [1, 1j]]) / math.sqrt(2)
    np.testing.assert_allclose(classical_matrix(Circuit(2, (BS(0),))), expected, atol=1e-15)


def test_phase_matrix():
    np.testing.assert_allclose(classical_matrix(Circuit(1, (Phase(0.3),))), [[np.exp(0.3j)]])


def test_gate_validation():
    with pytest.raises(ShapeError):
        Circuit(2, (BS(1),))
    with pytest.raises(DomainError):
        Phase(math.inf)
    assert Phase(-math.pi / 2).angle == pytest.approx(3 * math.pi / 2)
    assert canonical_angle(2 * math.pi) == 0.0
    assert 0.0 <= canonical_angle(-1e-300) < 2 * math.pi


@given(angles, angles)
def test_mzi_closed_form(alpha, beta):
    U = classical_matrix(mzi(alpha, beta))
    s, c = math.sin(alpha), math.cos(alpha)
    e = np.exp(1j * beta)
    expected = 1j * np.exp(1j * alpha) * np.array([[-e * s, c], [e * c, s]])
    np.testing.assert_allclose(U, expected, atol=1e-12)
    assert is_unitary(U, 1e-12)


def test_mzi_special_points():
    # derived by substituting into the closed form
    np.testing.assert_allclose(classical_matrix(mzi(math.pi / 2, 0)), 1j * 1j * np.array([[-1, 0], [0, 1]]), atol=1e-15)
    np.testing.assert_allclose(np.abs(classical_matrix(mzi(0, 0))) ** 2, [[0, 1], [1, 0]], atol=1e-15)


@given(seeds, st.integers(1, 5), st.integers(0, 12))
def test_classical_matrix_properties(seed, width, n_gates):
    c = random_circuit(width, n_gates, seed)
    U = classical_matrix(c)
    assert is_unitary(U, 1e-10)
    S = np.abs(U) ** 2
    np.testing.assert_allclose(S.sum(axis=0), 1, atol=1e-10)
    np.testing.assert_allclose(S.sum(axis=1), 1, atol=1e-10)


@given(seeds, st.integers(1, 4), st.integers(0, 8), st.integers(0, 8))
def test_functoriality(seed, width, n1, n2):
    c1 = random_circuit(width, n1, seed)
    c2 = random_circuit(width, n2, seed + 1)
    np.testing.assert_allclose(
        classical_matrix(c1 >> c2), classical_matrix(c2) @ classical_matrix(c1), atol=1e-12
    )
    c3 = random_circuit(2, n2, seed + 2)
    np.testing.assert_allclose(
        classical_matrix(c1 @ c3), direct_sum(classical_matrix(c1), classical_matrix(c3)), atol=1e-12
    )


def test_intensity_examples():
    np.testing.assert_allclose(propagate_intensity(Circuit(2, (BS(0),)), [1, 0]), [0.5, 0.5], atol=1e-12)
    np.testing.assert_array_equal(propagate_intensity(Circuit(3), [1, 2, 3]), [1, 2, 3])
    for alpha in np.linspace(0, math.pi, 9):
        J = propagate_intensity(mzi(alpha, 0.7), [1, 0])
        np.testing.assert_allclose(J, [math.sin(alpha) ** 2, math.cos(alpha) ** 2], atol=1e-12)


def test_intensity_rejects_negative():
    with pytest.raises(DomainError):
        propagate_intensity(Circuit(2), [1, -1])
    with pytest.raises(ShapeError):
        propagate_intensity(Circuit(2), [1, 0, 0])


@given(seeds, st.integers(1, 4), st.integers(0, 10))
def test_intensity_conserved(seed, width, n_gates):
    c = random_circuit(width, n_gates, seed)
    I = np.random.default_rng(seed).random(width)
    assert propagate_intensity(c, I).sum() == pytest.approx(I.sum(), abs=1e-10)


@pytest.mark.parametrize("method", ["clements", "reck"])
def test_identity_decomposes_to_trivial_mesh(method):
    c, phases = clements_decompose(np.eye(4), method)
    assert c.gates == ()
    np.testing.assert_array_equal(phases, 0)


@pytest.mark.parametrize("method", ["clements", "reck"])
def test_bs_round_trip(method):
    c, phases = clements_decompose(BS_MATRIX, method)
    assert np.max(np.abs(classical_matrix(with_phases(c, phases)) - BS_MATRIX)) < 1e-10


@pytest.mark.parametrize("method", ["clements", "reck"])
@given(seed=seeds, m=st.integers(1, 8))
def test_decomposition_round_trip(method, seed, m):
    U = haar_unitary(m, seed)
    c, phases = clements_decompose(U, method)
    assert np.max(np.abs(classical_matrix(with_phases(c, phases)) - U)) < 1e-8


@given(seeds, st.integers(2, 8))
def test_clements_depth_at_most_m(seed, m):
    c, _ = clements_decompose(haar_unitary(m, seed))
    mzis = mesh_params(c)
    assert len(mzis) == m * (m - 1) // 2
    assert mesh_depth(mzis, m) <= m


def test_permutation_round_trip():
    P = np.eye(5)[[2, 0, 4, 1, 3]]
    c, phases = clements_decompose(P)
    assert np.max(np.abs(classical_matrix(with_phases(c, phases)) - P)) < 1e-10


def test_decompose_rejects_non_unitary():
    with pytest.raises(DomainError):
        clements_decompose([[1, 1], [0, 1]])
    with pytest.raises(DomainError):
        clements_decompose(np.eye(2), method="triangle")


def test_json_round_trip():
    c = random_circuit(4, 10, 3)
    assert Circuit.from_json(c.to_json()) == c
    with pytest.raises(DomainError):
        Circuit.from_json({"gates": []})


def test_layers_and_depth():
    c = Circuit(4, (BS(0), BS(2), Phase(1.0, 1), BS(1)))
    assert [len(layer) for layer in c.layers()] == [2, 1, 1]
    assert c.depth == 3
    assert np.allclose(mzi_matrix(0.2, 0.1), classical_matrix(mzi(0.2, 0.1)))
