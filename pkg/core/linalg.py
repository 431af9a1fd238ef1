"""
Linear Algebra Kernels

Exact rank over prime fields, numeric rank and singular values over complex
doubles. These sit under the rank estimators, the entropy report and the
kernel-dimension computations.
"""

from functools import lru_cache
from typing import Optional

import numpy as np
import scipy.linalg
import sympy

from config import get_config
from core.errors import ParameterError, SVDConvergenceError
from logger import get_logger


logger = get_logger(__name__)

# Below this modulus residue products fit in int64.
_INT64_SAFE_PRIME = 1 << 31


@lru_cache(maxsize=64)
def is_field_prime(p: int) -> bool:
    """True if F_p is a field the eliminator can use: p prime and below 2^62."""
    return 2 <= p < (1 << 62) and bool(sympy.isprime(p))


def _prime(p: Optional[int]) -> int:
    if p is None:
        p = get_config().get("sampling", "prime") or 2305843009213693951
    p = int(p)
    if not is_field_prime(p):
        raise ParameterError(f"modulus {p} is not a prime below 2^62")
    return p


def reduce_mod(m, p: int) -> np.ndarray:
    """Residues of an integer matrix in 0..p-1, object dtype unless p is small."""
    arr = np.asarray(m)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if p < _INT64_SAFE_PRIME and arr.dtype != object:
        return np.mod(arr.astype(np.int64), p)
    return np.mod(arr.astype(object), p)


def _eliminate(a: np.ndarray, p: int) -> int:
    """Row-reduce ``a`` in place mod p and return the rank."""
    rows, cols = a.shape
    rank = 0
    for col in range(cols):
        if rank == rows:
            break
        nonzero = np.flatnonzero(a[rank:, col] != 0)
        if nonzero.size == 0:
            continue
        pivot = rank + int(nonzero[0])
        if pivot != rank:
            a[[rank, pivot], :] = a[[pivot, rank], :]
        inv = pow(int(a[rank, col]), -1, p)
        a[rank, col:] = (a[rank, col:] * inv) % p
        below = a[rank + 1:, col]
        hit = np.flatnonzero(below != 0) + rank + 1
        if hit.size:
            factors = a[hit, col].reshape(-1, 1)
            a[hit, col:] = (a[hit, col:] - factors * a[rank, col:]) % p
        rank += 1
    return rank


def rank_exact(m, p: Optional[int] = None) -> int:
    """
    Rank of an integer matrix over F_p.

    Gaussian elimination mod p, pivoting on the first nonzero entry of each
    column.

    Args:
        m: 2-D array of integers (any representatives)
        p: Prime modulus (defaults to sampling.prime)

    Returns:
        Rank over F_p
    """
    p = _prime(p)
    a = reduce_mod(m, p)
    if a.size == 0:
        return 0
    # Fewer rows than columns keeps the elimination short.
    if a.shape[0] > a.shape[1]:
        a = a.T.copy()
    rank = _eliminate(a, p)
    logger.debug(f"Exact rank | Shape: {np.shape(m)} | Rank: {rank}")
    return rank


def null_space_dim(m, p: Optional[int] = None) -> int:
    """Number of columns minus rank_exact(m)."""
    arr = np.asarray(m)
    cols = arr.shape[1] if arr.ndim == 2 else arr.size
    return cols - rank_exact(arr, p)


def singular_values(m) -> np.ndarray:
    """
    Singular values in descending order.

    Raises:
        SVDConvergenceError: LAPACK did not converge
    """
    arr = np.asarray(m, dtype=np.complex128)
    if arr.size == 0:
        return np.zeros(0)
    try:
        return scipy.linalg.svdvals(arr)
    except np.linalg.LinAlgError as e:
        logger.error(f"SVD failed | Shape: {arr.shape} | Error: {e}", exc_info=True)
        raise SVDConvergenceError(str(e)) from e


def rank_numeric(m, rtol: Optional[float] = None) -> int:
    """
    Count singular values above ``rtol`` times the largest one.

    Args:
        m: Complex (or real) matrix
        rtol: Relative threshold in (0, 1), defaults to numeric.rtol

    Returns:
        Numeric rank, 0 for the zero matrix
    """
    if rtol is None:
        rtol = get_config().get("numeric", "rtol") or 1e-9
    sigma = singular_values(m)
    if sigma.size == 0 or sigma[0] == 0:
        return 0
    return int(np.count_nonzero(sigma > rtol * sigma[0]))
