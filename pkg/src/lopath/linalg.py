"""Dense complex linear algebra: permanents and repeated-index submatrices.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; scalars are
Python ``complex``.
"""

from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np

from lopath.errors import DomainError, ShapeError, SizeLimitError

#: Default absolute tolerance for approximate comparisons.
ATOL = 1e-9

#: Largest matrix accepted by :func:`permanent_naive`.
NAIVE_LIMIT = 9


def as_matrix(M, *, square: bool = False) -> np.ndarray:
    """Convert ``M`` to a finite 2-d complex array.

    Raises
    ------
    ShapeError
        If ``M`` is not 2-dimensional, or not square when ``square`` is set.
    DomainError
        If any entry is NaN or infinite.
    """
    arr = np.asarray(M, dtype=complex)
    if arr.ndim == 1 and arr.size == 0:
        arr = arr.reshape(0, 0)
    if arr.ndim != 2:
        raise ShapeError(f"expected a matrix, got array of shape {arr.shape}")
    if square and arr.shape[0] != arr.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("matrix has non-finite entries")
    return arr


def _square(M) -> np.ndarray:
    arr = np.asarray(M)
    if arr.ndim == 1 and arr.size == 0:
        return arr.reshape(0, 0)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ShapeError(f"permanent needs a square matrix, got shape {arr.shape}")
    return arr


def permanent_naive(M, limit: int = NAIVE_LIMIT) -> complex:
    """Permanent by summing over all ``n!`` permutations.

    The entries are multiplied with their own arithmetic, so integer or
    Gaussian-integer input yields an exact result.

    >>> permanent_naive([[1j, 1j], [1, 1]])
    2j
    """
    arr = _square(M)
    n = arr.shape[0]
    if n > limit:
        raise SizeLimitError(f"naive permanent limited to n <= {limit}, got {n}")
    total = 0
    rows = arr.tolist()
    for sigma in itertools.permutations(range(n)):
        prod = 1
        for i, j in enumerate(sigma):
            prod = prod * rows[i][j]
        total = total + prod
    return complex(total)


def permanent_ryser(M) -> complex:
    """Permanent by Ryser's inclusion-exclusion formula.

    Subsets of columns are visited in Gray-code order so each step adds or
    removes a single column from the running row sums, giving ``O(2^n n)``
    work overall. Object arrays (e.g. of sympy numbers) keep their own
    arithmetic and the result is returned unconverted.
    """
    arr = _square(M)
    exact = arr.dtype == object
    if not exact:
        arr = arr.astype(complex)
    n = arr.shape[0]
    if n == 0:
        return 1 if exact else 1 + 0j
    row_sums = np.zeros(n, dtype=object if exact else complex)
    total = 0 if exact else 0j
    gray = 0
    for k in range(1, 2**n):
        j = (k & -k).bit_length() - 1
        gray ^= 1 << j
        if gray >> j & 1:
            row_sums += arr[:, j]
        else:
            row_sums -= arr[:, j]
        term = np.prod(row_sums)
        total += -term if bin(gray).count("1") % 2 else term
    total = -total if n % 2 else total
    return total if exact else complex(total)


def permanent(M) -> complex:
    """Production permanent backend."""
    return permanent_ryser(M)


def repeat_rows_cols(U, I: Sequence[int], J: Sequence[int]) -> np.ndarray:
    """Build ``U_{I,J}``: ``J[j]`` copies of column ``j``, then ``I[i]`` copies of row ``i``.

    Index order is preserved, so for ``I = J = (1, ..., 1)`` the result is
    ``U`` itself.
    """
    arr = as_matrix(U, square=True)
    m = arr.shape[0]
    I = [int(x) for x in I]
    J = [int(x) for x in J]
    if len(I) != m or len(J) != m:
        raise ShapeError(f"occupations of length {len(I)}, {len(J)} for {m} modes")
    if min(I + J, default=0) < 0:
        raise ShapeError("occupation numbers must be non-negative")
    if sum(I) != sum(J):
        raise ShapeError(f"photon totals differ: {sum(I)} != {sum(J)}")
    cols = np.repeat(np.arange(m), J)
    rows = np.repeat(np.arange(m), I)
    return arr[:, cols][rows, :]


def is_unitary(M, tol: float = 1e-10) -> bool:
    """True iff ``M`` is square and ``max |M^dagger M - 1| <= tol``."""
    arr = np.asarray(M, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        return False
    if not np.all(np.isfinite(arr)):
        return False
    err = arr.conj().T @ arr - np.eye(arr.shape[0])
    return bool(np.max(np.abs(err), initial=0.0) <= tol)


def direct_sum(*blocks) -> np.ndarray:
    """Block-diagonal matrix of the given (possibly rectangular) blocks."""
    mats = [as_matrix(b) for b in blocks]
    rows = sum(b.shape[0] for b in mats)
    cols = sum(b.shape[1] for b in mats)
    out = np.zeros((rows, cols), dtype=complex)
    r = c = 0
    for b in mats:
        out[r : r + b.shape[0], c : c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out
