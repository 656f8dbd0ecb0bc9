"""Occupation bases, the symmetric Fock functor and amplitude backends.

The ``n``-photon sector on ``m`` modes has two bases: mode lists
``X in [m]^n`` (distinguishable photons, the free Fock space) and
occupation vectors ``I in Phi_{m,n}`` (indistinguishable photons). The
isometry ``alpha_dagger`` embeds the second into the first, and a linear
map ``A`` acts on the bosonic sector as ``alpha A^{(x) n} alpha_dagger``.

Normalisation constants are ``N_I = prod_j I_j!``.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Sequence

import numpy as np

from lopath.circuits import Circuit, classical_matrix
from lopath.errors import ShapeError, SizeLimitError
from lopath.linalg import as_matrix, permanent, repeat_rows_cols

#: Largest dimension of a tensor-power space built by the Fock backend.
TENSOR_LIMIT = 10**6
#: Largest bosonic or tensor-power dimension in :func:`symmetric_operator`.
OPERATOR_LIMIT = 10**5

Occupation = tuple[int, ...]


def occupation(counts: Sequence[int]) -> Occupation:
    out = tuple(int(c) for c in counts)
    if any(c < 0 for c in out):
        raise ShapeError(f"negative photon count in {out}")
    return out


def norm_constant(I: Sequence[int]) -> int:
    """``N_I = prod_j I_j!``."""
    return math.prod(math.factorial(c) for c in I)


def basis_size(m: int, n: int) -> int:
    if m == 0:
        return 1 if n == 0 else 0
    return math.comb(m + n - 1, n)


def enumerate_basis(m: int, n: int) -> list[Occupation]:
    """All occupations of ``m`` modes by ``n`` photons, reverse-lexicographic.

    >>> enumerate_basis(2, 2)
    [(2, 0), (1, 1), (0, 2)]
    """
    if m == 0:
        return [()] if n == 0 else []
    if m == 1:
        return [(n,)]
    return [(k,) + rest for k in range(n, -1, -1) for rest in enumerate_basis(m - 1, n - k)]


def occupation_of(X: Sequence[int], m: int) -> Occupation:
    """Occupation numbers of a mode list: ``a(X)_j = #{i : X_i = j}``."""
    counts = [0] * m
    for x in X:
        if not 0 <= x < m:
            raise ShapeError(f"mode {x} out of range for {m} modes")
        counts[x] += 1
    return tuple(counts)


def _list_index(X: Sequence[int], m: int) -> int:
    idx = 0
    for x in X:
        idx = idx * m + x
    return idx


def preimage(I: Sequence[int]) -> list[tuple[int, ...]]:
    """All mode lists with occupation ``I``, in lexicographic order."""
    base = [j for j, c in enumerate(I) for _ in range(c)]
    return sorted(set(itertools.permutations(base)))


def alpha_dagger(I: Sequence[int], exact: bool = False) -> np.ndarray:
    """``alpha_dagger |I> = sqrt(N_I / n!) sum_{X in a^-1(I)} |X>``.

    Returned as a dense vector over ``[m]^n``, with mode lists indexed in
    base ``m`` (first entry most significant). With ``exact`` the entries
    are sympy numbers.
    """
    I = occupation(I)
    m, n = len(I), sum(I)
    if m**n > TENSOR_LIMIT:
        raise SizeLimitError(f"tensor power of dimension {m**n} exceeds {TENSOR_LIMIT}")
    if exact:
        import sympy

        v = np.full(m**n, sympy.Integer(0), dtype=object)
        coeff = sympy.sqrt(sympy.Rational(norm_constant(I), math.factorial(n)))
    else:
        v = np.zeros(m**n, dtype=complex)
        coeff = math.sqrt(norm_constant(I) / math.factorial(n))
    for X in preimage(I):
        v[_list_index(X, m)] = coeff
    return v


@lru_cache(maxsize=64)
def _alpha_dagger_matrix(m: int, n: int) -> np.ndarray:
    """Columns are ``alpha_dagger |I>`` for ``I`` in basis order."""
    basis = enumerate_basis(m, n)
    out = np.zeros((m**n, len(basis)), dtype=complex)
    for c, I in enumerate(basis):
        out[:, c] = alpha_dagger(I)
    out.setflags(write=False)
    return out


def _apply_tensor_power(A: np.ndarray, v: np.ndarray, n: int) -> np.ndarray:
    """``A^{(x) n} v`` without forming the Kronecker product."""
    rows, cols = A.shape
    t = v.reshape((cols,) * n) if n else v.reshape(())
    for axis in range(n):
        t = np.moveaxis(np.tensordot(A, t, axes=([1], [axis])), 0, axis)
    return t.reshape(-1) if n else t.reshape(1)


def symmetric_operator(A, n: int) -> np.ndarray:
    """Matrix of ``alpha A^{(x) n} alpha_dagger`` from ``Phi_{k,n}`` to ``Phi_{m,n}``.

    ``A`` is ``m x k``; rows and columns follow :func:`enumerate_basis`.
    """
    A = as_matrix(A)
    m, k = A.shape
    dims = (m**n, k**n, basis_size(m, n), basis_size(k, n))
    if max(dims) > OPERATOR_LIMIT:
        raise SizeLimitError(f"sector dimensions {dims} exceed {OPERATOR_LIMIT}")
    ad_in = _alpha_dagger_matrix(k, n)
    ad_out = _alpha_dagger_matrix(m, n)
    out = np.empty((ad_out.shape[1], ad_in.shape[1]), dtype=complex)
    for c in range(ad_in.shape[1]):
        out[:, c] = ad_out.conj().T @ _apply_tensor_power(A, ad_in[:, c], n)
    return out


def _check_pair(U: np.ndarray, I: Occupation, J: Occupation):
    m = U.shape[0]
    if len(I) != m or len(J) != m:
        raise ShapeError(f"occupations of length {len(I)}, {len(J)} for {m} modes")


def amplitude_fock(U, I: Sequence[int], J: Sequence[int]) -> complex:
    """``<J| alpha U^{(x) n} alpha_dagger |I>`` by explicit tensor contraction."""
    U = as_matrix(U, square=True)
    I, J = occupation(I), occupation(J)
    _check_pair(U, I, J)
    if sum(I) != sum(J):
        return 0j
    n = sum(I)
    out = _apply_tensor_power(U, alpha_dagger(I), n)
    return complex(np.vdot(alpha_dagger(J), out))


def amplitude_permanent(U, I: Sequence[int], J: Sequence[int]) -> complex:
    """``Perm(U_{I,J}) / sqrt(N_I N_J)``.

    The permanent formula indexes the matrix by (input, output), the
    transpose of our ``U[out, in]`` convention, hence ``U.T`` below.
    """
    U = as_matrix(U, square=True)
    I, J = occupation(I), occupation(J)
    _check_pair(U, I, J)
    if sum(I) != sum(J):
        return 0j
    sub = repeat_rows_cols(U.T, I, J)
    return permanent(sub) / math.sqrt(norm_constant(I) * norm_constant(J))


def output_distribution(c: Circuit | np.ndarray, I: Sequence[int], limit: int = OPERATOR_LIMIT) -> dict[Occupation, float]:
    """Probability of every output occupation for input ``I``."""
    U = classical_matrix(c) if isinstance(c, Circuit) else as_matrix(c, square=True)
    I = occupation(I)
    m, n = U.shape[0], sum(I)
    if len(I) != m:
        raise ShapeError(f"occupation of length {len(I)} for {m} modes")
    if basis_size(m, n) > limit:
        raise SizeLimitError(f"{basis_size(m, n)} outcomes exceed {limit}")
    return {J: abs(amplitude_permanent(U, I, J)) ** 2 for J in enumerate_basis(m, n)}
