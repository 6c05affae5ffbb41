"""Thomas algorithm for tridiagonal systems."""

import numpy as np

from ..errors import SingularSystemError

PIVOT_FLOOR = 1e-300


def solve_tridiagonal(
    lower: np.ndarray, diag: np.ndarray, upper: np.ndarray, rhs: np.ndarray
) -> np.ndarray:
    """Solve a tridiagonal system by forward elimination and back substitution.

    Row i reads lower[i-1]*x[i-1] + diag[i]*x[i] + upper[i]*x[i+1] = rhs[i].
    Arrays may carry a trailing axis of independent systems: diag and rhs of
    shape (n, m), lower and upper of shape (n-1, m), solved column by column.

    Raises:
        SingularSystemError: if a pivot magnitude falls below 1e-300.
    """
    lower = np.asarray(lower, dtype=float)
    diag = np.asarray(diag, dtype=float)
    upper = np.asarray(upper, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    n = diag.shape[0]
    if rhs.shape[0] != n or lower.shape[0] != n - 1 or upper.shape[0] != n - 1:
        raise ValueError(
            f"Inconsistent lengths: lower {lower.shape[0]}, diag {n}, "
            f"upper {upper.shape[0]}, rhs {rhs.shape[0]}"
        )

    shape = np.broadcast_shapes(diag.shape, rhs.shape)
    c_prime = np.empty((max(n - 1, 0),) + shape[1:])
    d_prime = np.empty(shape)

    pivot = diag[0]
    _check_pivot(pivot, 0)
    if n > 1:
        c_prime[0] = upper[0] / pivot
    d_prime[0] = rhs[0] / pivot
    for i in range(1, n):
        pivot = diag[i] - lower[i - 1] * c_prime[i - 1]
        _check_pivot(pivot, i)
        if i < n - 1:
            c_prime[i] = upper[i] / pivot
        d_prime[i] = (rhs[i] - lower[i - 1] * d_prime[i - 1]) / pivot

    x = np.empty(shape)
    x[n - 1] = d_prime[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = d_prime[i] - c_prime[i] * x[i + 1]
    return x


def _check_pivot(pivot, row: int) -> None:
    smallest = float(np.min(np.abs(pivot)))
    if smallest < PIVOT_FLOOR:
        raise SingularSystemError(row, smallest)
