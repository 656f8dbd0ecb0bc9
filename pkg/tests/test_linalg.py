import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from lopath.errors import DomainError, ShapeError, SizeLimitError
from lopath.linalg import (
    as_matrix,
    direct_sum,
    is_unitary,
    permanent,
    permanent_naive,
    permanent_ryser,
    repeat_rows_cols,
)
from oracles import exact_permanent

BS_UNNORM = [[1j, 1], [1, 1j]]


def random_matrix(seed, n):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


# frozen from sympy's exact Matrix.per
HOM_PERMANENTS = {
    ((1, 1), (2, 0)): 2j,
    ((1, 1), (1, 1)): 0j,
    ((1, 1), (0, 2)): 2j,
}


def test_hom_permanents_match_exact_oracle():
    I = sympy.I
    assert exact_permanent([[I, I], [1, 1]]) == 2 * I
    assert exact_permanent([[I, 1], [1, I]]) == 0
    assert exact_permanent([[1, 1], [I, I]]) == 2 * I


def test_naive_permanent_is_exact_on_gaussian_integers():
    assert permanent_naive([[1j, 1j], [1, 1]]) == 2j
    assert permanent_naive([[1j, 1], [1, 1j]]) == 0
    assert permanent_naive([[1, 1], [1j, 1j]]) == 2j
    assert permanent_naive(np.eye(2)) == 1


@pytest.mark.parametrize("IJ, value", HOM_PERMANENTS.items())
def test_repeated_submatrix_permanents(IJ, value):
    I, J = IJ
    sub = repeat_rows_cols(BS_UNNORM, I, J)
    assert permanent_naive(sub) == value
    assert abs(permanent_ryser(sub) - value) < 1e-12


def test_repeat_rows_cols_hom_matrix():
    np.testing.assert_array_equal(repeat_rows_cols(BS_UNNORM, (1, 1), (2, 0)), [[1j, 1j], [1, 1]])
    np.testing.assert_array_equal(repeat_rows_cols(BS_UNNORM, (1, 1), (1, 1)), BS_UNNORM)
    assert repeat_rows_cols(BS_UNNORM, (0, 0), (0, 0)).shape == (0, 0)


def test_repeat_rows_cols_errors():
    with pytest.raises(ShapeError):
        repeat_rows_cols(BS_UNNORM, (1, 1), (1, 0))
    with pytest.raises(ShapeError):
        repeat_rows_cols(BS_UNNORM, (1, 1, 0), (1, 1, 0))


def test_empty_permanent_is_one():
    assert permanent_ryser(np.zeros((0, 0))) == 1
    assert permanent_naive(np.zeros((0, 0))) == 1
    assert permanent([]) == 1


def test_permanent_errors():
    with pytest.raises(ShapeError):
        permanent_naive(np.ones((2, 3)))
    with pytest.raises(ShapeError):
        permanent_ryser(np.ones((2, 3)))
    with pytest.raises(SizeLimitError):
        permanent_naive(np.ones((10, 10)))


def test_ryser_matches_exact_oracle_on_integer_matrix():
    M = [[1, 2, 0], [3, -1, 1], [2, 2, 5]]
    assert permanent_ryser(M) == complex(exact_permanent(M))


def test_ryser_matches_naive_6x6():
    M = random_matrix(6, 6)
    a, b = permanent_ryser(M), permanent_naive(M)
    assert abs(a - b) <= 1e-10 * max(1.0, abs(b))


@given(st.integers(0, 7), st.integers(0, 2**32 - 1))
def test_ryser_agrees_with_naive(n, seed):
    M = random_matrix(seed, n)
    a, b = permanent_ryser(M), permanent_naive(M)
    assert abs(a - b) <= 1e-10 * max(1.0, abs(b))


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_permanent_permutation_invariance(n, seed):
    rng = np.random.default_rng(seed)
    M = random_matrix(seed, n)
    P = np.eye(n)[rng.permutation(n)]
    Q = np.eye(n)[rng.permutation(n)]
    assert abs(permanent(P @ M @ Q) - permanent(M)) <= 1e-10 * max(1.0, abs(permanent(M)))


@given(st.integers(0, 4), st.integers(0, 4), st.integers(0, 2**32 - 1))
def test_permanent_of_direct_sum(n, k, seed):
    A, B = random_matrix(seed, n), random_matrix(seed + 1, k)
    lhs = permanent(direct_sum(A, B))
    rhs = permanent(A) * permanent(B)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


@given(st.integers(2, 4), st.integers(0, 2**32 - 1), st.integers(0, 3))
def test_relabelling_modes(m, seed, n):
    rng = np.random.default_rng(seed)
    U = random_matrix(seed, m)
    I = rng.multinomial(n, [1 / m] * m)
    J = rng.multinomial(n, [1 / m] * m)
    p = rng.permutation(m)
    P = np.eye(m)[p]
    a = permanent(repeat_rows_cols(U, I, J))
    b = permanent(repeat_rows_cols(P @ U @ P.T, P @ I, P @ J))
    assert abs(a - b) <= 1e-10 * max(1.0, abs(a))


def test_is_unitary():
    assert is_unitary(np.eye(3))
    assert is_unitary(np.array(BS_UNNORM) / np.sqrt(2))
    assert not is_unitary([[1, 1], [0, 1]])
    assert not is_unitary(np.ones((2, 3)))


def test_as_matrix_rejects_non_finite():
    with pytest.raises(DomainError):
        as_matrix([[np.nan]])
    with pytest.raises(ShapeError):
        as_matrix([1, 2, 3])
    with pytest.raises(ShapeError):
        as_matrix(np.ones((2, 3)), square=True)
